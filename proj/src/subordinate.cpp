#include "subkernel/subordinate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace subkernel {

RowSumOutputs weighted_row_sums(const Kernel& base, const std::vector<int>& centers,
                                int k_max, const std::vector<RowSumJob>& jobs,
                                bool keep_sup_series) {
  const auto& space = *base.space;
  int n = space.size();
  size_t nj = jobs.size();
  RowSumOutputs out;
  out.rows.assign(centers.size(), std::vector<Eigen::VectorXd>(nj));
  out.leak.assign(centers.size(), std::vector<double>(nj, 0.0));
  out.undispatched_weight.assign(centers.size(), std::vector<double>(nj, 0.0));
  out.late_sup_density.assign(centers.size(), 0.0);
  if (keep_sup_series)
    out.sup_density_series.assign(centers.size(),
                                  std::vector<double>(static_cast<size_t>(k_max) + 1, 0.0));
  for (auto& per_center : out.rows)
    for (auto& row : per_center) row = Eigen::VectorXd::Zero(n);

  std::vector<double> used(nj, 0.0);
  for (size_t j = 0; j < nj; ++j) {
    const auto& w = *jobs[j].weights;
    for (int k = 1; k <= std::min<int>(k_max, static_cast<int>(w.size()) - 1); ++k)
      used[j] += w[k];
  }

  RowEvolver ev(base, centers);
  int late_from = k_max / 2;
  ev.run(k_max, [&](int k, int ci, const Eigen::VectorXd& probs, double leak) {
    for (size_t j = 0; j < nj; ++j) {
      const auto& w = *jobs[j].weights;
      if (k < static_cast<int>(w.size()) && w[k] != 0.0) {
        out.rows[ci][j] += w[k] * probs;
        out.leak[ci][j] += w[k] * leak;
      }
    }
    if (k >= late_from || keep_sup_series) {
      double m = 0.0;
      for (int y = 0; y < n; ++y)
        m = std::max(m, probs[y] / space.measure(y));
      if (k >= late_from)
        out.late_sup_density[ci] = std::max(out.late_sup_density[ci], m);
      if (keep_sup_series) out.sup_density_series[ci][k] = m;
    }
  });
  for (size_t ci = 0; ci < centers.size(); ++ci)
    for (size_t j = 0; j < nj; ++j)
      out.undispatched_weight[ci][j] = std::max(0.0, jobs[j].total_weight - used[j]);
  return out;
}

SubordinateKernel subordinate(const Kernel& base, const SubordinatorWeights& w,
                              std::vector<StepLaw> laws, std::vector<int> centers,
                              int k_max) {
  for (const auto& law : laws)
    if (static_cast<int>(law.p.size()) - 1 > k_max)
      throw InsufficientBaseDepth("law support " +
                                  std::to_string(law.p.size() - 1) +
                                  " exceeds base depth " + std::to_string(k_max));
  SubordinateKernel sk;
  sk.base = &base;
  sk.space = base.space;
  sk.weights = w;
  sk.laws = std::move(laws);
  sk.centers = std::move(centers);
  sk.k_max = k_max;

  std::vector<RowSumJob> jobs;
  jobs.reserve(sk.laws.size());
  for (const auto& law : sk.laws) jobs.push_back({&law.p, 1.0 - law.tail_mass});
  auto out = weighted_row_sums(base, sk.centers, k_max, jobs);

  int n_window = base.size();
  sk.dens_.assign(sk.centers.size(), {});
  sk.trunc_.assign(sk.centers.size(), {});
  sk.leak_.assign(sk.centers.size(), {});
  for (size_t ci = 0; ci < sk.centers.size(); ++ci) {
    sk.dens_[ci].reserve(sk.laws.size());
    for (size_t j = 0; j < sk.laws.size(); ++j) {
      Eigen::VectorXd d = out.rows[ci][j];
      for (int y = 0; y < n_window; ++y) d[y] /= base.space->measure(y);
      sk.dens_[ci].push_back(std::move(d));
      // dropped subordinator mass can sit anywhere below the late sup of h
      double tail_w = sk.laws[j].tail_mass + out.undispatched_weight[ci][j];
      sk.trunc_[ci].push_back(tail_w * out.late_sup_density[ci]);
      sk.leak_[ci].push_back(out.leak[ci][j]);
    }
  }
  return sk;
}

double OneStepMatrix::prob_at(int x, int y) const {
  int r = row_pos[x];
  if (r < 0) throw DomainError("one-step matrix has no row for this vertex");
  return prob(r, y);
}

double OneStepMatrix::density(int x, int y) const {
  return prob_at(x, y) / space->measure(y);
}

OneStepMatrix one_step_matrix(const Kernel& base, const SubordinatorWeights& w,
                              const std::vector<int>& row_set, int k_max) {
  OneStepMatrix m;
  m.space = base.space;
  m.rows = row_set;
  std::vector<RowSumJob> jobs{{&w.c, 1.0 - w.tail_mass}};
  auto out = weighted_row_sums(base, row_set, k_max, jobs);
  m.prob.resize(static_cast<int>(row_set.size()), base.size());
  m.trunc.resize(row_set.size());
  m.leak_v.resize(row_set.size());
  for (size_t i = 0; i < row_set.size(); ++i) {
    m.prob.row(static_cast<int>(i)) = out.rows[i][0].transpose();
    m.trunc[i] = (w.tail_mass + out.undispatched_weight[i][0]) *
                 out.late_sup_density[i];
    m.leak_v[i] = out.leak[i][0];
  }
  m.row_pos.assign(base.size(), -1);
  for (size_t i = 0; i < row_set.size(); ++i) m.row_pos[row_set[i]] = static_cast<int>(i);
  return m;
}

JumpKernelChecks jump_kernel_checks(const OneStepMatrix& m) {
  JumpKernelChecks c{0.0, 0.0, 1e300};
  const auto& space = *m.space;
  for (size_t i = 0; i < m.rows.size(); ++i) {
    double mass = m.prob.row(static_cast<int>(i)).sum();
    double defect = std::abs(1.0 - mass) - m.trunc[i] - m.leak_v[i];
    c.max_mass_defect = std::max(c.max_mass_defect, defect);
    for (size_t j = 0; j < m.rows.size(); ++j) {
      double hxy = m.density(m.rows[i], m.rows[j]);
      double hyx = m.density(m.rows[j], m.rows[i]);
      c.max_asymmetry = std::max(c.max_asymmetry, std::abs(hxy - hyx));
      c.min_entry = std::min(c.min_entry, hxy);
    }
  }
  return c;
}

PoissonizedRows poissonize(const Kernel& base, double t, int K,
                           const std::vector<int>& centers) {
  if (!(t > 0.0)) throw DomainError("poissonize: t must be positive");
  int k_needed = static_cast<int>(std::ceil(t + 10.0 * std::sqrt(t))) + 30;
  if (K <= 0) K = k_needed;
  if (K < k_needed)
    throw DomainError("poissonize: K below t + 10 sqrt(t) tail control");
  std::vector<double> pw(static_cast<size_t>(K) + 1, 0.0);
  pw[0] = std::exp(-t);
  for (int k = 1; k <= K; ++k) pw[k] = pw[k - 1] * t / static_cast<double>(k);
  double cdf = std::accumulate(pw.begin(), pw.end(), 0.0);

  PoissonizedRows rows;
  rows.centers = centers;
  rows.t = t;
  rows.poisson_tail = std::max(0.0, 1.0 - cdf);
  std::vector<RowSumJob> jobs{{&pw, cdf}};
  auto out = weighted_row_sums(base, centers, K, jobs);
  for (size_t ci = 0; ci < centers.size(); ++ci) {
    Eigen::VectorXd d = out.rows[ci][0];
    const auto& space = *base.space;
    for (int y = 0; y < base.size(); ++y) d[y] /= space.measure(y);
    d[centers[ci]] += pw[0] / space.measure(centers[ci]);  // k = 0 atom
    rows.dens.push_back(std::move(d));
    rows.leak_v.push_back(out.leak[ci][0]);
  }
  return rows;
}

namespace {

struct PowerFit {
  double slope = 0.0;
  double level = 0.0;  // value at the last abscissa
  bool ok = false;
};

PowerFit fit_power(const std::vector<double>& xs, const std::vector<double>& ys) {
  PowerFit fit;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < xs.size(); ++i)
    if (ys[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  if (lx.size() < 2) return fit;
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= lx.size();
  my /= ly.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den <= 0) return fit;
  fit.slope = num / den;
  fit.level = std::exp(my + fit.slope * (lx.back() - mx));
  fit.ok = true;
  return fit;
}

}  // namespace

GreenTable green(const Kernel& base, const SubordinatorWeights& w,
                 const std::vector<int>& centers, int k_max,
                 const GreenOptions& opt) {
  const auto& space = *base.space;

  // Dini test: decay exponent of h_phi(n; x, x) along a dyadic n-grid,
  // restricted to times whose law keeps most of its mass below k_max.
  std::vector<int> dyadic;
  for (int n = 1; n <= opt.dini_n_max; n *= 2) dyadic.push_back(n);
  auto laws = step_laws(w, opt.dini_n_max, k_max);
  std::vector<RowSumJob> jobs;
  for (int n : dyadic) jobs.push_back({&laws[n - 1].p, 1.0 - laws[n - 1].tail_mass});
  auto u = renewal_mass(w, k_max);
  double u_total = std::accumulate(u.begin(), u.end(), 0.0);
  jobs.push_back({&u, u_total});

  auto out = weighted_row_sums(base, centers, k_max, jobs, /*keep_sup_series=*/true);

  std::vector<double> ns, sup_diag;
  for (size_t i = 0; i < dyadic.size(); ++i) {
    if (dyadic[i] < 8) continue;  // pre-asymptotic head
    if (laws[dyadic[i] - 1].tail_mass > 0.5) continue;  // mostly truncated
    double m = 0.0;
    for (size_t ci = 0; ci < centers.size(); ++ci)
      m = std::max(m, out.rows[ci][i][centers[ci]] / space.measure(centers[ci]));
    ns.push_back(static_cast<double>(dyadic[i]));
    sup_diag.push_back(m);
  }
  if (ns.size() < 3)
    throw NotConvergent("too few usable diagonal samples for the Dini test");
  auto dini = fit_power(ns, sup_diag);
  if (!dini.ok) throw NotConvergent("empty diagonal series for the Dini test");
  if (dini.slope > opt.dini_throw_slope)
    throw NotConvergent("diagonal decay exponent " + std::to_string(dini.slope) +
                        " signals recurrence");

  GreenTable g;
  g.centers = centers;
  g.dini_slope = dini.slope;
  g.convergent = dini.slope < opt.dini_convergent_slope;

  // k > k_max remainder <= sum u(k) sup_y h(k; x, y) under power-law fits of
  // both factors over the last octave
  std::vector<double> ks, us;
  for (int k = k_max / 2; k <= k_max; k += std::max(1, k_max / 64)) {
    ks.push_back(static_cast<double>(k));
    us.push_back(u[k]);
  }
  auto ufit = fit_power(ks, us);

  size_t green_job = dyadic.size();
  for (size_t ci = 0; ci < centers.size(); ++ci) {
    Eigen::VectorXd d = out.rows[ci][green_job];
    for (int y = 0; y < base.size(); ++y) d[y] /= space.measure(y);
    g.dens.push_back(std::move(d));
    g.atom.push_back(1.0 / space.measure(centers[ci]));
    g.leak_v.push_back(out.leak[ci][green_job]);

    std::vector<double> hk;
    for (double kf : ks) hk.push_back(out.sup_density_series[ci][static_cast<int>(kf)]);
    auto hfit = fit_power(ks, hk);
    if (ufit.ok && hfit.ok) {
      double expo = ufit.slope + hfit.slope;
      double level = ufit.level * hfit.level * static_cast<double>(k_max);
      if (expo < -1.0) {
        g.tail_envelope.push_back(level / (-expo - 1.0));
      } else {
        // one extrapolated decade, flagged as an open-ended envelope
        double p1 = expo + 1.0;
        double decade = std::abs(p1) < 1e-6 ? std::log(10.0)
                                            : (std::pow(10.0, p1) - 1.0) / p1;
        g.tail_envelope.push_back(level * decade);
        g.tail_envelope_finite = false;
      }
    } else {
      g.tail_envelope.push_back(0.0);
    }
  }
  return g;
}

Eigen::VectorXd green_via_resolvent(const OneStepMatrix& m,
                                    const std::vector<int>& subwindow, int source) {
  int n = static_cast<int>(subwindow.size());
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i) {
    int r = m.row_pos[subwindow[i]];
    if (r < 0) throw DomainError("resolvent: missing one-step row in the subwindow");
    for (int j = 0; j < n; ++j) A(i, j) = m.prob(r, subwindow[j]);
  }
  int src_idx = -1;
  for (int i = 0; i < n; ++i)
    if (subwindow[i] == source) src_idx = i;
  if (src_idx < 0) throw DomainError("resolvent: source outside the subwindow");
  // g^T = e_src^T (A + A^2 + ...) => (I - A^T) g = A^T e_src
  Eigen::VectorXd rhs = A.row(src_idx).transpose();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n) - A.transpose();
  Eigen::VectorXd g = sys.partialPivLu().solve(rhs);
  Eigen::VectorXd dens = Eigen::VectorXd::Zero(m.space->size());
  for (int i = 0; i < n; ++i)
    dens[subwindow[i]] = g[i] / m.space->measure(subwindow[i]);
  return dens;
}

std::vector<double> carre_du_champ(const OneStepMatrix& m,
                                   const std::vector<double>& f) {
  const auto& space = *m.space;
  std::vector<double> gamma(m.rows.size(), 0.0);
  for (size_t i = 0; i < m.rows.size(); ++i) {
    int x = m.rows[i];
    double acc = 0.0;
    for (int y = 0; y < space.size(); ++y) {
      double j = m.prob(static_cast<int>(i), y) / space.measure(y);
      if (j == 0.0) continue;
      double diff = f[x] - f[y];
      acc += diff * diff * j * space.measure(y);
    }
    gamma[i] = 0.5 * acc * space.measure(x);
  }
  return gamma;
}

CsProbeResult cs_probe(const OneStepMatrix& m, double psi_r, int x0, double R,
                       double r, const std::vector<double>& f,
                       const std::vector<double>& cutoff, double epsilon, double C) {
  const auto& space = *m.space;
  int n = space.size();
  for (int y = 0; y < n; ++y) {
    double d = space.distance(x0, y);
    double lo = d <= R ? 1.0 : 0.0;
    double hi = d <= R + r ? 1.0 : 0.0;
    if (cutoff[y] < lo - 1e-12 || cutoff[y] > hi + 1e-12)
      throw CutoffShapeError("cut-off escapes the indicator sandwich at vertex " +
                             std::to_string(y));
  }

  double lhs = 0.0;
  for (size_t i = 0; i < m.rows.size(); ++i) {
    int x = m.rows[i];
    if (space.distance(x0, x) > R + 2.0 * r) continue;
    double acc = 0.0;
    for (int y = 0; y < n; ++y) {
      double j = m.prob(static_cast<int>(i), y) / space.measure(y);
      if (j == 0.0) continue;
      double diff = cutoff[x] - cutoff[y];
      acc += diff * diff * j * space.measure(y);
    }
    lhs += f[x] * f[x] * 0.5 * acc * space.measure(x);
  }

  double energy = 0.0;
  for (size_t i = 0; i < m.rows.size(); ++i) {
    int x = m.rows[i];
    double dx = space.distance(x0, x);
    if (dx < R || dx > R + r) continue;  // x in U
    for (int y = 0; y < n; ++y) {
      double dy = space.distance(x0, y);
      if (dy < R - r || dy > R + 2.0 * r) continue;  // y in U'
      double j = m.prob(static_cast<int>(i), y) / space.measure(y);
      if (j == 0.0) continue;
      double diff = f[x] - f[y];
      energy += diff * diff * j * space.measure(x) * space.measure(y);
    }
  }

  double l2 = 0.0;
  for (int y = 0; y < n; ++y)
    if (space.distance(x0, y) <= R + 2.0 * r) l2 += f[y] * f[y] * space.measure(y);

  CsProbeResult res;
  res.lhs = lhs;
  res.energy_term = energy;
  res.l2_term = l2;
  res.rhs = epsilon * energy + C / psi_r * l2;
  res.satisfied = res.lhs <= res.rhs + 1e-12;
  res.c_threshold = l2 > 0.0 ? std::max(0.0, (lhs - epsilon * energy) * psi_r / l2) : 0.0;
  return res;
}

McStats mc_sample(const Kernel& base, const SubordinatorWeights& w,
                  const McOptions& opt) {
  const auto& space = *base.space;
  std::mt19937_64 rng(opt.seed);
  std::discrete_distribution<int> step_dist(w.c.begin(), w.c.end());
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // returns -1 when the path steps through a truncated window edge
  auto base_step = [&](int x) {
    double u = unif(rng);
    double acc = 0.0;
    for (int i = base.indptr[x]; i < base.indptr[x + 1]; ++i) {
      acc += base.values[i];
      if (u <= acc) return base.indices[i];
    }
    return -1;
  };

  double exit_sum = 0.0, exit_sq = 0.0;
  long tail_hits = 0, sub_tail_hits = 0;
  for (long path = 0; path < opt.n_paths; ++path) {
    int x = opt.x0;
    int exit_at = opt.n_steps;
    bool exited = false;
    long t_accum = 0;
    for (int n = 1; n <= opt.n_steps; ++n) {
      int jumps = step_dist(rng);
      t_accum += jumps;
      for (int j = 0; j < jumps && x >= 0; ++j) x = base_step(x);
      bool outside = x < 0 || space.distance(opt.x0, x) > opt.ball_r;
      if (!exited && outside) {
        exited = true;
        exit_at = n;
      }
      if (n == opt.tail_time &&
          (x < 0 || space.distance(opt.x0, x) >= opt.tail_r))
        ++tail_hits;
      if (n == opt.tail_time && opt.subordinator_r > 0.0 &&
          static_cast<double>(t_accum) >= opt.subordinator_r)
        ++sub_tail_hits;
    }
    double e = static_cast<double>(exit_at);
    exit_sum += e;
    exit_sq += e * e;
  }

  McStats st{};
  st.paths = opt.n_paths;
  double n = static_cast<double>(opt.n_paths);
  st.exit_mean = exit_sum / n;
  st.exit_stderr = std::sqrt(std::max(0.0, exit_sq / n - st.exit_mean * st.exit_mean) / n);
  st.tail_freq = static_cast<double>(tail_hits) / n;
  st.tail_stderr = std::sqrt(st.tail_freq * (1.0 - st.tail_freq) / n);
  st.subordinator_tail_freq = static_cast<double>(sub_tail_hits) / n;
  st.subordinator_tail_stderr =
      std::sqrt(st.subordinator_tail_freq * (1.0 - st.subordinator_tail_freq) / n);
  return st;
}

}  // namespace subkernel
