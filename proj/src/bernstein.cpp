#include "subkernel/bernstein.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <numeric>

namespace subkernel {

namespace {

constexpr double kNormCheckTol = 1e-8;

double pow_int_guard(double x, double p) { return std::exp(p * std::log(x)); }

}  // namespace

BernsteinFunction BernsteinFunction::make_identity() {
  BernsteinFunction f;
  f.drift = 1.0;
  f.closed = Closed::identity;
  return f;
}

BernsteinFunction BernsteinFunction::make_stable(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw InvalidBernstein("stable exponent must lie in (0, 1]");
  if (alpha == 1.0) return make_identity();
  BernsteinFunction f;
  f.closed = Closed::stable;
  f.alpha = alpha;
  // phi(u) = u^alpha = int (1 - e^{-ut}) c_a t^{-1-alpha} dt
  double coef = alpha / std::tgamma(1.0 - alpha);
  f.density = [coef, alpha](double t) { return coef * std::pow(t, -1.0 - alpha); };
  f.density_text = "stable";
  f.density_power_at_zero = -1.0 - alpha;
  f.envelope = DensityEnvelope{coef, 1.0 + alpha, 1.0};
  return f;
}

BernsteinFunction BernsteinFunction::make_ratio() {
  BernsteinFunction f;
  f.closed = Closed::ratio;
  f.density = [](double t) { return std::exp(-t); };
  f.density_text = "exp(-t)";
  f.density_power_at_zero = 0.0;
  f.envelope = DensityEnvelope{1.0, 0.0, 1.0};  // e^{-t} <= 1; Poisson factor does the rest
  return f;
}

BernsteinFunction BernsteinFunction::make_custom(double drift,
                                                 std::function<double(double)> density,
                                                 double power_at_zero,
                                                 std::string text) {
  if (drift < 0.0) throw InvalidBernstein("drift must be nonnegative");
  BernsteinFunction f;
  f.drift = drift;
  f.density = std::move(density);
  f.density_power_at_zero = power_at_zero;
  f.density_text = std::move(text);
  return f;
}

double BernsteinFunction::density_at(double t) const {
  if (!density) throw DensityUnavailable("Levy measure has no density part");
  return scale * density(t);
}

double eval(const BernsteinFunction& phi, double u) {
  if (u < 0.0) throw DomainError("eval: u must be nonnegative");
  if (u == 0.0) return 0.0;
  switch (phi.closed) {
    case BernsteinFunction::Closed::identity:
      return phi.scale * u;
    case BernsteinFunction::Closed::stable:
      return phi.scale * std::pow(u, phi.alpha);
    case BernsteinFunction::Closed::ratio:
      return phi.scale * u / (1.0 + u);
    case BernsteinFunction::Closed::none:
      break;
  }
  double v = phi.drift * u;
  if (phi.density) {
    auto integrand = [&phi, u](double t) { return -std::expm1(-u * t) * phi.density(t); };
    // integrand ~ u * t * nu(t) near 0
    double decay = phi.density_power_at_zero + 1.0;
    auto r = integrate_levy(integrand, phi.quad.upper_cutoff, decay, phi.quad);
    v += r.value;
  }
  for (auto [loc, mass] : phi.atoms) v += mass * -std::expm1(-u * loc);
  return phi.scale * v;
}

double inverse(const BernsteinFunction& phi, double v, double lo, double hi) {
  if (!(lo < hi)) throw BracketError("inverse: empty bracket");
  double flo = eval(phi, lo), fhi = eval(phi, hi);
  if (v < flo - phi.quad.abs_tol || v > fhi + phi.quad.abs_tol)
    throw BracketError("inverse: value outside [phi(lo), phi(hi)]");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = eval(phi, mid);
    if (std::abs(fm - v) <= phi.quad.abs_tol || (hi - lo) < 1e-15 * std::max(1.0, hi))
      return mid;
    if (fm < v)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

BernsteinFunction normalize(const BernsteinFunction& phi) {
  double phi1 = eval(phi, 1.0);
  if (phi1 <= 1e-14) throw DegenerateFunction("phi(1) = 0 forces phi == 0");
  BernsteinFunction out = phi;
  out.scale = phi.scale / phi1;
  if (out.envelope) out.envelope->coef *= out.scale / phi.scale;
  return out;
}

void BernsteinFunction::validate() const {
  if (drift < 0.0) throw InvalidBernstein("drift must be nonnegative");
  for (auto [loc, mass] : atoms)
    if (loc <= 0.0 || mass <= 0.0)
      throw InvalidBernstein("atoms need positive location and mass");
  if (density) {
    for (double t : {1e-6, 1e-3, 0.1, 1.0, 10.0, 100.0})
      if (density(t) < 0.0)
        throw InvalidBernstein("Levy density negative at t=" + std::to_string(t));
    // sigma-finiteness of min{1,t} nu(dt): growing cutoffs must stabilize
    auto f = [this](double t) { return std::min(1.0, t) * density(t); };
    double upper = std::min(quad.upper_cutoff, 1e4);
    double i1 = integrate_levy(f, upper, density_power_at_zero + 1.0, quad).value;
    double i2 = integrate_levy(f, 4.0 * upper, density_power_at_zero + 1.0, quad).value;
    double i3 = integrate_levy(f, 16.0 * upper, density_power_at_zero + 1.0, quad).value;
    if (!(std::isfinite(i3)) || (i3 - i2) > 0.5 * (i2 - i1) + quad.abs_tol + 1e-6 * i1)
      throw NotALevyMeasure("int min{1,t} nu(dt) does not converge numerically");
  }
  double worst = concavity_worst_violation(*this);
  if (worst > 1e3 * quad.abs_tol + 1e-9)
    throw InvalidBernstein("phi fails monotonicity/concavity on the check grid");
}

double concavity_worst_violation(const BernsteinFunction& phi, double theta_max) {
  double worst = -1e300;
  std::vector<double> thetas;
  for (double th = 1e-3; th <= theta_max * (1 + 1e-12); th *= 4.0) thetas.push_back(th);
  double prev = 0.0, prev_th = 0.0;
  for (double th : thetas) {
    double f = eval(phi, th);
    if (f < prev - 1e3 * phi.quad.abs_tol) return 1.0;  // not nondecreasing
    prev = f;
    prev_th = th;
    (void)prev_th;
    for (double lam = 0.1; lam <= 1.0 + 1e-12; lam += 0.1)
      worst = std::max(worst, lam * f - eval(phi, lam * th));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// weights

namespace {

/// int t^k e^{-t} nu(t) dt / k!, in log form for large k, with tail budget.
double poisson_weight_integral(const BernsteinFunction& phi, int k, double* err_out) {
  double lg = std::lgamma(static_cast<double>(k) + 1.0);
  double kk = static_cast<double>(k);
  double upper = std::max(phi.quad.upper_cutoff,
                          kk + 12.0 * std::sqrt(kk + 1.0) + 40.0);
  double total = 0.0, err = 0.0;
  if (phi.density) {
    auto integrand = [&phi, kk, lg](double t) {
      return std::exp(kk * std::log(t) - t - lg) * phi.density(t);
    };
    double decay = kk + phi.density_power_at_zero;
    auto r = integrate_levy(integrand, upper, decay, phi.quad);
    total += r.value;
    err += r.error;
    if (phi.envelope) {
      const auto& e = *phi.envelope;
      // int_upper^inf t^{k - pow} e^{-t} dt / k! = Gamma(k+1-pow, upper)/k!
      double a = kk + 1.0 - e.pow;
      if (a > 0.0 && upper >= e.from) {
        double tail = e.coef * boost::math::gamma_q(a, upper) *
                      std::exp(std::lgamma(a) - lg);
        err += tail;
      }
    }
  }
  for (auto [loc, mass] : phi.atoms)
    total += mass * std::exp(kk * std::log(loc) - loc - lg);
  if (err_out) *err_out = err;
  return phi.scale * total;
}

}  // namespace

SubordinatorWeights weights(const BernsteinFunction& phi, int K, double tail_tol) {
  if (K < 1) throw ConfigError("weights: K must be >= 1");
  double phi1 = eval(phi, 1.0);
  if (std::abs(phi1 - 1.0) > kNormCheckTol)
    throw InvalidBernstein("weights: phi(1) != 1; normalize first");
  SubordinatorWeights w;
  w.c.assign(static_cast<size_t>(K) + 1, 0.0);
  w.normalized = true;
  double quad_err = 0.0;
  if (phi.density || !phi.atoms.empty()) {
    for (int k = 1; k <= K; ++k) {
      double e = 0.0;
      w.c[k] = poisson_weight_integral(phi, k, &e);
      quad_err += e;
    }
  }
  w.c[1] += phi.scale * phi.drift;
  w.quad_error = quad_err;
  double sum = std::accumulate(w.c.begin(), w.c.end(), 0.0);
  w.tail_mass = 1.0 - sum;
  if (w.tail_mass < -1e-9)
    throw QuadratureFailure("weights sum exceeds 1; ill-conditioned Levy density");
  w.tail_mass = std::max(0.0, w.tail_mass);
  if (w.tail_mass > tail_tol) throw TailToleranceNotMet(K, w.tail_mass);
  return w;
}

SubordinatorWeights weights_auto(const BernsteinFunction& phi, double tail_tol,
                                 int k_max) {
  int K = 64;
  while (true) {
    try {
      return weights(phi, std::min(K, k_max), tail_tol);
    } catch (const TailToleranceNotMet&) {
      if (K >= k_max) throw;
      K *= 2;
    }
  }
}

// ---------------------------------------------------------------------------
// step laws

double StepLaw::cdf(double x) const {
  double s = 0.0;
  int hi = std::min<int>(static_cast<int>(std::floor(x)), static_cast<int>(p.size()) - 1);
  for (int k = 0; k <= hi; ++k) s += p[k];
  return s;
}

double StepLaw::upper_tail(double r) const {
  // P(T_n >= r) = 1 - P(T_n <= ceil(r) - 1); exact while r <= K_cap since
  // convolution truncation only removes mass above K_cap.
  double s = 0.0;
  int hi = static_cast<int>(std::ceil(r)) - 1;
  hi = std::min<int>(hi, static_cast<int>(p.size()) - 1);
  for (int k = 0; k <= hi; ++k) s += p[k];
  return 1.0 - s;
}

double StepLaw::laplace(double lambda) const {
  double s = 0.0;
  for (size_t k = p.size(); k-- > 0;) s += p[k] * std::exp(-lambda * static_cast<double>(k));
  return s;
}

namespace {

struct ConvolutionEngine {
  Eigen::FFT<double> fft;
  int fft_size = 0;
  std::vector<std::complex<double>> c_spec;
  std::vector<double> padded;
  std::vector<std::complex<double>> spec, tmp;

  void prepare(const std::vector<double>& c, int K_cap) {
    int need = 2 * (K_cap + 1);
    fft_size = 1;
    while (fft_size < need) fft_size <<= 1;
    padded.assign(fft_size, 0.0);
    std::copy(c.begin(), c.end(), padded.begin());
    fft.fwd(c_spec, padded);
  }

  // out = trunc(a * c), returns dropped mass above K_cap
  double convolve(const std::vector<double>& a, std::vector<double>& out, int K_cap) {
    padded.assign(fft_size, 0.0);
    std::copy(a.begin(), a.end(), padded.begin());
    fft.fwd(spec, padded);
    for (int i = 0; i < fft_size; ++i) spec[i] *= c_spec[i];
    std::vector<double> full;
    fft.inv(full, spec);
    out.assign(static_cast<size_t>(K_cap) + 1, 0.0);
    double dropped = 0.0;
    for (int k = 0; k < fft_size; ++k) {
      double v = std::max(0.0, full[k]);
      if (k <= K_cap)
        out[k] = v;
      else
        dropped += v;
    }
    return dropped;
  }
};

void convolve_direct(const std::vector<double>& a, const std::vector<double>& c,
                     std::vector<double>& out, int K_cap, double* dropped) {
  out.assign(static_cast<size_t>(K_cap) + 1, 0.0);
  double kept = 0.0, total_a = 0.0, total_c = 0.0;
  for (double v : a) total_a += v;
  for (double v : c) total_c += v;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (a[i] == 0.0) continue;
    int jmax = std::min<int>(K_cap - i, static_cast<int>(c.size()) - 1);
    for (int j = 1; j <= jmax; ++j) out[i + j] += a[i] * c[j];
  }
  for (double v : out) kept += v;
  *dropped = std::max(0.0, total_a * total_c - kept);
}

}  // namespace

std::vector<StepLaw> step_laws(const SubordinatorWeights& w, int n_max, int K_cap) {
  if (n_max < 1) throw ConfigError("step_laws: n_max must be >= 1");
  int K = std::min(K_cap, w.K());
  std::vector<double> c(w.c.begin(), w.c.begin() + K + 1);
  c.resize(static_cast<size_t>(K_cap) + 1, 0.0);

  const bool use_fft = K_cap > 2048;
  ConvolutionEngine eng;
  if (use_fft) eng.prepare(c, K_cap);

  std::vector<StepLaw> laws;
  laws.reserve(n_max);
  StepLaw first;
  first.n = 1;
  first.p = c;
  first.tail_mass = 1.0 - std::accumulate(c.begin(), c.end(), 0.0);
  first.numeric_slack = 1e-15 * static_cast<double>(K_cap);
  laws.push_back(first);
  for (int n = 2; n <= n_max; ++n) {
    StepLaw next;
    next.n = n;
    double dropped = 0.0;
    if (use_fft)
      dropped = eng.convolve(laws.back().p, next.p, K_cap);
    else
      convolve_direct(laws.back().p, c, next.p, K_cap, &dropped);
    (void)dropped;  // folded into tail_mass by conservation
    double sum = std::accumulate(next.p.begin(), next.p.end(), 0.0);
    next.tail_mass = std::max(0.0, 1.0 - sum);
    next.numeric_slack =
        laws.back().numeric_slack + 3e-16 * static_cast<double>(K_cap);
    laws.push_back(std::move(next));
  }
  return laws;
}

StepLaw step_law(const SubordinatorWeights& w, int n, int K_cap) {
  if (n < 1) throw ConfigError("step_law: n must be >= 1");
  return step_laws(w, n, K_cap).back();
}

std::vector<double> renewal_mass(const SubordinatorWeights& w, int K_cap) {
  // u = c + c * u on the prefix: u(k) = c(k) + sum_{j<k} u(j) c(k-j).
  int K = std::min(K_cap, w.K());
  std::vector<double> u(static_cast<size_t>(K_cap) + 1, 0.0);
  for (int k = 1; k <= K_cap; ++k) {
    double s = k <= K ? w.c[k] : 0.0;
    int j_lo = std::max(1, k - K);
    for (int j = j_lo; j < k; ++j) s += u[j] * w.c[k - j];
    u[k] = s;
  }
  return u;
}

LaplacePair laplace_Tn(const SubordinatorWeights& w, const BernsteinFunction& phi,
                       double lambda, int n) {
  if (!(lambda > 0.0)) throw DomainError("laplace_Tn: lambda must be positive");
  StepLaw law = step_law(w, n, w.K());
  LaplacePair out;
  out.direct = law.laplace(lambda);
  out.closed = std::pow(1.0 - eval(phi, -std::expm1(-lambda)), n);
  return out;
}

TailBound tail_bounds(const BernsteinFunction& phi, int t, double r,
                      std::optional<double> upper_scaling_index) {
  if (t < 1) throw DomainError("tail_bounds: t must be >= 1");
  constexpr double e_factor = 2.718281828459045 / (2.718281828459045 - 1.0);
  TailBound out;
  double tphi = static_cast<double>(t) * eval(phi, 1.0 / r);
  out.upper = std::min(1.0, e_factor * tphi);
  if (upper_scaling_index && *upper_scaling_index < 1.0)
    out.lower_envelope = std::min(1.0, tphi);
  return out;
}

double potential_measure(const SubordinatorWeights& w, double x, int n_max) {
  if (x < 0.0) throw DomainError("potential_measure: x must be >= 0");
  int N = std::min<int>(static_cast<int>(std::floor(x)), n_max);
  double total = 1.0;  // n = 0: T_0 = 0 <= x
  if (N < 1) return total;
  int K_cap = N;  // only P(T_n <= x) with x <= N needed
  K_cap = static_cast<int>(std::floor(x));
  auto laws = step_laws(w, N, K_cap);
  for (const auto& law : laws) total += law.cdf(x);
  return total;
}

std::vector<LevyComparisonRow> levy_comparison(const BernsteinFunction& phi,
                                               const SubordinatorWeights& w,
                                               int k_lo, int k_hi) {
  if (!phi.has_density())
    throw DensityUnavailable("levy_comparison needs a Levy density");
  // nonincreasing on [1, inf) checked on a grid
  double prev = phi.density_at(1.0);
  for (double t = 1.25; t <= 4096.0; t *= 1.25) {
    double v = phi.density_at(t);
    if (v > prev * (1.0 + 1e-9))
      throw InvalidBernstein("levy_comparison: density not nonincreasing on [1, inf)");
    prev = v;
  }
  std::vector<LevyComparisonRow> rows;
  for (int k = std::max(1, k_lo); k <= std::min(k_hi, w.K()); ++k) {
    LevyComparisonRow row;
    row.k = k;
    row.c_k = w.c[k];
    row.nu_k = phi.density_at(static_cast<double>(k));
    row.ratio = row.nu_k > 0.0 ? row.c_k / row.nu_k : 0.0;
    row.lower_envelope =
        boost::math::gamma_p(static_cast<double>(k) + 1.0, static_cast<double>(k));
    rows.push_back(row);
  }
  return rows;
}

Corollary3Report corollary3_check(const SubordinatorWeights& w,
                                  const BernsteinFunction& phi, int d, int n_max,
                                  int K_cap) {
  Corollary3Report rep;
  auto laws = step_laws(w, n_max, K_cap);
  for (const auto& law : laws) {
    Corollary3Row row;
    row.n = law.n;
    double s = 0.0;
    for (int k = 1; k < static_cast<int>(law.p.size()); ++k)
      if (law.p[k] > 0.0)
        s += law.p[k] * pow_int_guard(static_cast<double>(k), -0.5 * d);
    row.weighted_sum = s;
    double inv = inverse(phi, 1.0 / static_cast<double>(law.n), 0.0, 1.0);
    row.envelope = d == 0 ? 1.0 : std::pow(inv, 0.5 * d);
    row.ratio = row.envelope > 0.0 ? row.weighted_sum / row.envelope : 0.0;
    rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace subkernel
