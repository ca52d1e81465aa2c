#include "subkernel/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subkernel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEFactor = 2.718281828459045 / (2.718281828459045 - 1.0);
}  // namespace

Profile power_profile(double a, double p, std::string name) {
  Profile prof;
  prof.fn = [a, p](double r) { return r <= 0.0 ? 0.0 : a * std::pow(r, p); };
  prof.inv = [a, p](double s) { return s <= 0.0 ? 0.0 : std::pow(s / a, 1.0 / p); };
  prof.name = name.empty() ? "power" : std::move(name);
  return prof;
}

Profile psi_profile(double p) {
  Profile prof;
  prof.fn = [p](double r) { return r <= 0.0 ? 0.5 : std::max(0.5, std::pow(r, p)); };
  prof.inv = [p](double s) { return s <= 0.5 ? 0.0 : std::pow(s, 1.0 / p); };
  prof.name = "psi";
  return prof;
}

double Target::phi_inv(double v) const {
  auto it = phi_inv_cache.find(v);
  if (it != phi_inv_cache.end()) return it->second;
  double u = inverse(*phi, v, 0.0, phi_inv_hi);
  phi_inv_cache.emplace(v, u);
  return u;
}

double eval_target(const Target& t, double time, int x, int y) {
  const auto& space = *t.space;
  double d = space.distance(x, y);
  switch (t.kind) {
    case TargetKind::dheat: {
      double on_diag = 1.0 / space.volume(x, t.psi.inv(time));
      double off = time / (space.volume(x, d) * t.psi(d));
      return std::min(on_diag, off);
    }
    case TargetKind::thm1: {
      double inv_phi = t.phi_inv(1.0 / time);
      double on_diag = 1.0 / space.volume(x, t.f.inv(1.0 / inv_phi));
      double off = d <= 0.0 ? kInf
                            : time * eval(*t.phi, 1.0 / t.f(d)) / space.volume(x, d);
      return std::min(on_diag, off);
    }
    case TargetKind::thm2: {
      double inv_phi = t.phi_inv(1.0 / time);
      double on_diag = 1.0 / space.volume(x, std::pow(inv_phi, -1.0 / t.alpha));
      double off = d <= 0.0 ? kInf
                            : time * eval(*t.phi, std::pow(d, -t.alpha)) /
                                  space.volume(x, d);
      return std::min(on_diag, off);
    }
    case TargetKind::green: {
      if (d <= 0.0) throw DomainError("green target is off-diagonal only");
      double far = t.psi(d) / space.volume(x, d);
      double near = 1.0 / space.volume(x, t.f.inv(1.0));
      return std::min(far, near);
    }
    case TargetKind::one_step: {
      double on_diag = 1.0 / space.volume(x, t.f.inv(1.0));
      double off = d <= 0.0 ? kInf
                            : eval(*t.phi, 1.0 / t.f(d)) / space.volume(x, d);
      return std::min(on_diag, off);
    }
  }
  throw DomainError("unknown target kind");
}

ComparabilityReport comparability(const std::vector<KernelSample>& samples,
                                  const Target& target, double c_max,
                                  std::string domain_description) {
  ComparabilityReport rep;
  rep.c_max = c_max;
  rep.domain = std::move(domain_description);
  rep.sup_ratio = -kInf;
  rep.inf_ratio = kInf;
  for (const auto& s : samples) {
    if (s.excluded) {
      ++rep.excluded;
      continue;
    }
    double tgt = eval_target(target, s.time, s.x, s.y);
    if (!(tgt > 0.0) || !std::isfinite(tgt)) continue;
    ++rep.points;
    if (s.value <= 0.0) {
      // a vanishing kernel inside the claimed regime falsifies the lower
      // bound outright
      ++rep.zero_failures;
      rep.inf_ratio = 0.0;
      rep.inf_witness = {s.time, s.x, s.y, s.value, tgt};
      continue;
    }
    double lo = s.value / tgt;
    double hi = (s.value + s.upper_slack) / tgt;
    if (hi > rep.sup_ratio) {
      rep.sup_ratio = hi;
      rep.sup_witness = {s.time, s.x, s.y, s.value + s.upper_slack, tgt};
    }
    if (lo < rep.inf_ratio) {
      rep.inf_ratio = lo;
      rep.inf_witness = {s.time, s.x, s.y, s.value, tgt};
    }
  }
  if (rep.points == 0) throw EmptyDomain("comparability: no admissible points");
  rep.pass = rep.zero_failures == 0 && rep.sup_ratio <= c_max &&
             rep.inf_ratio >= 1.0 / c_max;
  return rep;
}

HarnackResult harnack_ratio(const SubordinateKernel& sk, int z, double R,
                            const Profile& psi, const HarnackParams& params) {
  const auto& space = *sk.space;
  double height = params.delta * psi(R);
  if (height < 1.0)
    throw DegenerateCylinder("delta psi(R) < 1: no integer times in the cylinder");
  int j_lo = static_cast<int>(std::ceil(height));
  int j_hi = static_cast<int>(std::floor(2.0 * height));
  int N = j_hi + params.depth_pad;
  if (N > sk.n_max())
    throw InsufficientBaseDepth("harnack: kernel stack shallower than the cylinder");

  int ci = -1;
  for (size_t i = 0; i < sk.centers.size(); ++i)
    if (sk.centers[i] == z) ci = static_cast<int>(i);
  if (ci < 0) throw DomainError("harnack: no kernel slice at the cylinder center");

  auto ball = space.ball(z, R / params.B);
  HarnackResult res;
  res.n_used = N;
  res.cylinder_max = 0.0;
  res.initial_min = kInf;
  // u(j, y) = h_phi(N - j; z, y)
  for (int j = j_lo; j <= j_hi; ++j) {
    const auto& row = sk.density(ci, N - j);
    for (int y : ball)
      if (row[y] > res.cylinder_max) {
        res.cylinder_max = row[y];
        res.max_witness = {static_cast<double>(j), z, y, row[y], 0.0};
      }
  }
  const auto& row0 = sk.density(ci, N);
  for (int y : ball)
    if (row0[y] < res.initial_min) {
      res.initial_min = row0[y];
      res.min_witness = {0.0, z, y, row0[y], 0.0};
    }
  res.k0 = res.initial_min > 0.0 ? res.cylinder_max / res.initial_min : kInf;
  return res;
}

ExitProfileReport exit_profile(const DiscreteSpace& space,
                               const std::function<Eigen::VectorXd(int)>& prob_row,
                               int x0, const std::vector<double>& radii,
                               const Profile& psi, int horizon) {
  ExitProfileReport rep;
  double lo = kInf, hi = 0.0;
  for (double r : radii) {
    auto res = exit_time_dp(space, prob_row, x0, r, horizon);
    ExitProfileRow row;
    row.r = r;
    row.psi_r = psi(r);
    row.expected = res.expected_truncated;
    row.ratio = row.expected / row.psi_r;
    // E[tau] - E[tau ^ H] <= P(tau > H) * H_geo with the decay rate observed
    // over the last quarter of the horizon
    int h = static_cast<int>(res.survival.size()) - 1;
    double rho = res.survival[h] > 0.0 && res.survival[3 * h / 4] > 0.0
                     ? std::pow(res.survival[h] / res.survival[3 * h / 4],
                                4.0 / static_cast<double>(h))
                     : 0.0;
    row.bias_bound = rho < 1.0 ? res.horizon_tail / (1.0 - rho) : kInf;
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    rep.rows.push_back(row);
  }
  rep.band = lo > 0.0 ? hi / lo : kInf;
  return rep;
}

TailCheckReport tail_estimate_check(const Kernel& base, const SubordinateKernel& sk,
                                    int x0, const std::vector<int>& times,
                                    const std::vector<double>& radii,
                                    const std::function<double(double)>& f_envelope,
                                    const BernsteinFunction& phi) {
  const auto& space = *base.space;
  // stage 1: empirical C1 with the sup taken over every base step
  double c1 = 0.0;
  {
    RowEvolver ev(base, {x0});
    ev.run(sk.k_max, [&](int k, int, const Eigen::VectorXd& probs, double leak) {
      for (double r : radii) {
        double tail = leak;
        for (int y = 0; y < space.size(); ++y)
          if (probs[y] > 0.0 && space.distance(x0, y) >= r) tail += probs[y];
        double denom = static_cast<double>(k) * f_envelope(r);
        if (denom > 0.0) c1 = std::max(c1, tail / denom);
      }
    });
  }
  c1 = std::max(c1, 1.0);

  int ci = -1;
  for (size_t i = 0; i < sk.centers.size(); ++i)
    if (sk.centers[i] == x0) ci = static_cast<int>(i);
  if (ci < 0) throw DomainError("tail_estimate_check: x0 has no kernel slice");

  TailCheckReport rep;
  rep.c1 = c1;
  rep.all_ok = true;
  for (int t : times) {
    const auto& row = sk.density(ci, t);
    for (double r : radii) {
      TailCheckPoint pt;
      pt.t = t;
      pt.r = r;
      double lhs = sk.leak(ci, t) + sk.laws[t - 1].tail_mass;  // off-window mass
      for (int y = 0; y < space.size(); ++y)
        if (space.distance(x0, y) >= r) lhs += row[y] * space.measure(y);
      pt.lhs = std::min(1.0, lhs);
      pt.rhs = std::min(1.0, kEFactor * c1 * t * eval(phi, f_envelope(r)));
      pt.ok = pt.lhs <= pt.rhs + 1e-12;
      rep.all_ok = rep.all_ok && pt.ok;
      rep.points.push_back(pt);
    }
  }
  return rep;
}

MomentCheckResult truncated_moment_check(const Kernel& base,
                                         const SubordinateKernel& sk, int ci, int t,
                                         double r, const Profile& f,
                                         const BernsteinFunction& phi) {
  const auto& space = *base.space;
  int x0 = sk.centers[ci];
  // hypothesis constant: P(d >= rho) <= C1 s^2 / f(rho)^2 over all base steps
  double c1 = 0.0;
  RowEvolver ev(base, {x0});
  std::vector<double> rhos{1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  ev.run(sk.k_max, [&](int k, int, const Eigen::VectorXd& probs, double leak) {
    for (double rho : rhos) {
      double tail = leak;
      for (int y = 0; y < space.size(); ++y)
        if (probs[y] > 0.0 && space.distance(x0, y) >= rho) tail += probs[y];
      double fr = f(rho);
      double denom = static_cast<double>(k) * static_cast<double>(k);
      if (fr > 0.0 && denom > 0.0)
        c1 = std::max(c1, tail * fr * fr / denom);
    }
  });
  c1 = std::max(c1, 1.0);

  const auto& row = sk.density(ci, t);
  double lhs = 0.0;
  for (int y = 0; y < space.size(); ++y) {
    double d = space.distance(x0, y);
    if (d <= r) lhs += f(d) * row[y] * space.measure(y);
  }
  MomentCheckResult res;
  res.lhs = lhs;
  res.c1 = c1;
  double fr = f(r);
  res.rhs = c1 * 2.0 * kEFactor * t * fr * eval(phi, 1.0 / fr);
  res.ok = res.lhs <= res.rhs + 1e-12;
  return res;
}

EquivalenceProbe equivalence_probe_thm6(const BernsteinFunction& phi,
                                        const Kernel& base, const Profile& f,
                                        const std::vector<int>& row_set, int k_max,
                                        double max_distance, double c_max) {
  EquivalenceProbe probe;
  auto est = estimate_indices([&phi](double u) { return eval(phi, u); }, 1e-6, 1.0,
                              64, ScalingDirection::at_zero);
  probe.beta1 = est.lower.index;
  probe.beta2 = est.upper.index;
  probe.scaling_ok =
      probe.beta1 > 1e-3 && probe.beta2 < 1.0 - 1e-3 && probe.beta1 <= probe.beta2;

  auto w = weights_auto(phi, 0.05, k_max);
  auto m = one_step_matrix(base, w, row_set, k_max);
  std::vector<KernelSample> samples;
  const auto& space = *base.space;
  for (size_t i = 0; i < row_set.size(); ++i) {
    int x = row_set[i];
    for (int y = 0; y < space.size(); ++y) {
      double d = space.distance(x, y);
      if (d > max_distance) continue;
      KernelSample s;
      s.time = 1.0;
      s.x = x;
      s.y = y;
      s.value = m.prob(static_cast<int>(i), y) / space.measure(y);
      s.upper_slack = m.trunc[i];
      s.excluded = m.leak_v[i] > 1e-9;
      samples.push_back(s);
    }
  }
  Target tgt;
  tgt.kind = TargetKind::one_step;
  tgt.space = &space;
  tgt.f = f;
  tgt.phi = &phi;
  probe.one_step = comparability(samples, tgt, c_max, "one-step vs min-form");
  probe.consistent = probe.scaling_ok == probe.one_step.pass;
  return probe;
}

LevyConstructionResult levy_density_for_psi(const Profile& psi, const Profile& f,
                                            const QuadratureConfig& quad) {
  auto composed = [&psi, &f](double s) { return psi(f.inv(s)); };
  // increasing with a positive lower-scaling index on the working window
  auto est = estimate_indices(composed, 1e-4, 1e4, 48, ScalingDirection::at_zero);
  for (double s = 1e-4; s < 1e4; s *= 4.0)
    if (composed(4.0 * s) < composed(s) * (1.0 - 1e-9))
      throw NotALevyMeasure("psi o f^{-1} is not increasing");
  if (!(est.upper.index > 1e-6) || est.degenerate)
    throw NotALevyMeasure("psi o f^{-1} lacks a positive scaling index");

  BernsteinFunction phi = BernsteinFunction::make_custom(
      0.0, [composed](double s) { return 1.0 / (s * composed(s)); },
      /*power_at_zero=*/-1.0);
  phi.quad = quad;
  phi.validate();

  LevyConstructionResult res;
  res.phi = normalize(phi);
  res.band_lo = kInf;
  res.band_hi = 0.0;
  for (double u = 1e-4; u <= 1.0 + 1e-12; u *= 1.5) {
    double lhs = eval(res.phi, u);
    double rhs = 1.0 / composed(1.0 / u);
    double ratio = lhs / rhs;
    res.band_lo = std::min(res.band_lo, ratio);
    res.band_hi = std::max(res.band_hi, ratio);
  }
  return res;
}

}  // namespace subkernel
