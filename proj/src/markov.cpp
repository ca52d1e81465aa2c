#include "subkernel/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "subkernel/parallel.hpp"

namespace subkernel {

double Kernel::prob(int x, int y) const {
  for (int i = indptr[x]; i < indptr[x + 1]; ++i)
    if (indices[i] == y) return values[i];
  return 0.0;
}

double Kernel::row_sum(int x) const {
  double s = 0.0;
  for (int i = indptr[x]; i < indptr[x + 1]; ++i) s += values[i];
  return s;
}

void Kernel::step(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  out.setZero(in.size());
  for (int x = 0; x < static_cast<int>(in.size()); ++x) {
    double px = in[x];
    if (px == 0.0) continue;
    for (int i = indptr[x]; i < indptr[x + 1]; ++i) out[indices[i]] += px * values[i];
  }
}

Eigen::MatrixXd Kernel::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
  for (int x = 0; x < size(); ++x)
    for (int i = indptr[x]; i < indptr[x + 1]; ++i) m(x, indices[i]) = values[i];
  return m;
}

Kernel srw(const DiscreteSpace& space) {
  Kernel k;
  k.space = &space;
  int n = space.size();
  k.indptr.assign(n + 1, 0);
  const bool lattice = space.dim() > 0;
  const bool reflected = space.boundary_policy() == BoundaryPolicy::reflected;
  for (int x = 0; x < n; ++x) {
    const auto& nb = space.neighbors(x);
    if (nb.empty()) throw IsolatedVertex("vertex " + std::to_string(x) + " is isolated");
    double denom = lattice ? 2.0 * space.dim() : space.weighted_degree(x);
    int extra = 0;
    if (lattice && reflected) {
      double missing = 2.0 * space.dim() - static_cast<double>(nb.size());
      if (missing > 0.0) extra = 1;  // fold the outside mass into a stay
    }
    k.indptr[x + 1] = k.indptr[x] + static_cast<int>(nb.size()) + extra;
    for (const auto& e : nb) {
      k.indices.push_back(e.to);
      k.values.push_back(e.weight / denom);
    }
    if (extra) {
      k.indices.push_back(x);
      k.values.push_back((2.0 * space.dim() - static_cast<double>(nb.size())) / denom);
    }
  }
  // h(1;x,y) = w(x,y)/(W(x) mu(y)) is symmetric when mu is the weighted degree
  // or when the walk is regular under counting measure (lattices).
  k.symmetric_density = true;
  for (int x = 0; x < n && k.symmetric_density; ++x)
    for (int i = k.indptr[x]; i < k.indptr[x + 1]; ++i) {
      int y = k.indices[i];
      double hxy = k.values[i] / space.measure(y);
      double hyx = k.prob(y, x) / space.measure(x);
      if (std::abs(hxy - hyx) > 1e-12 * std::max(1.0, std::abs(hxy)))
        k.symmetric_density = false;
    }
  return k;
}

Kernel average_two_step(const Kernel& k) {
  int n = k.size();
  Kernel out;
  out.space = k.space;
  out.symmetric_density = k.symmetric_density;
  out.indptr.assign(n + 1, 0);
  for (int x = 0; x < n; ++x) {
    std::map<int, double> row;
    for (int i = k.indptr[x]; i < k.indptr[x + 1]; ++i)
      row[k.indices[i]] += 0.5 * k.values[i];
    for (int i = k.indptr[x]; i < k.indptr[x + 1]; ++i) {
      int z = k.indices[i];
      double pz = k.values[i];
      for (int j = k.indptr[z]; j < k.indptr[z + 1]; ++j)
        row[k.indices[j]] += 0.5 * pz * k.values[j];
    }
    out.indptr[x + 1] = out.indptr[x] + static_cast<int>(row.size());
    for (auto [y, v] : row) {
      out.indices.push_back(y);
      out.values.push_back(v);
    }
  }
  return out;
}

DenseStack::DenseStack(const Kernel& k, int n_max, size_t memory_budget)
    : kernel_(&k) {
  size_t need = static_cast<size_t>(k.size()) * k.size() * n_max * sizeof(double);
  if (need > memory_budget)
    throw MemoryBudgetExceeded("dense stack needs " + std::to_string(need) + " bytes");
  steps_.reserve(n_max);
  Eigen::MatrixXd p1 = k.dense();
  steps_.push_back(p1);
  for (int n = 2; n <= n_max; ++n) steps_.push_back(steps_.back() * p1);
}

double DenseStack::density(int n, int x, int y) const {
  return steps_[n - 1](x, y) / kernel_->space->measure(y);
}

double DenseStack::chapman_kolmogorov_residual(int m, int n) const {
  const auto& space = *kernel_->space;
  double worst = 0.0;
  int stride = std::max(1, space.size() / 16);
  for (int x = 0; x < space.size(); x += stride)
    for (int y = 0; y < space.size(); y += stride) {
      double direct = density(m + n, x, y);
      double composed = 0.0;
      for (int z = 0; z < space.size(); ++z)
        composed += density(m, x, z) * density(n, z, y) * space.measure(z);
      worst = std::max(worst, std::abs(direct - composed));
    }
  return worst;
}

RowEvolver::RowEvolver(const Kernel& k, std::vector<int> centers)
    : kernel_(&k), centers_(std::move(centers)) {}

void RowEvolver::run(int k_max,
                     const std::function<void(int, int, const Eigen::VectorXd&, double)>&
                         visit) {
  int n = kernel_->size();
  parallel_for(static_cast<int>(centers_.size()), [&](int c) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd scratch(n);
    row[centers_[c]] = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      kernel_->step(row, scratch);
      row.swap(scratch);
      visit(k, c, row, 1.0 - row.sum());
    }
  });
}

ExitTimeResult exit_time_dp(const DiscreteSpace& space,
                            const std::function<Eigen::VectorXd(int)>& prob_row,
                            int x0, double r, int horizon) {
  std::vector<int> ball = space.ball(x0, r);
  for (int v : ball)
    if (space.is_boundary(v))
      throw BoundaryContamination("ball B(" + std::to_string(x0) + ", " +
                                  std::to_string(r) + ") touches the window edge");
  int m = static_cast<int>(ball.size());
  std::vector<int> pos(space.size(), -1);
  for (int i = 0; i < m; ++i) pos[ball[i]] = i;

  Eigen::MatrixXd P(m, m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd row = prob_row(ball[i]);
    for (int j = 0; j < m; ++j) P(i, j) = row[ball[j]];
  }

  ExitTimeResult res;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  v[pos[x0]] = 1.0;
  res.survival.push_back(1.0);
  double expected = 0.0;
  for (int n = 0; n < horizon; ++n) {
    expected += res.survival.back();
    Eigen::VectorXd next = (v.transpose() * P).transpose();
    v = next;
    res.survival.push_back(v.sum());
  }
  res.expected_truncated = expected;
  res.horizon_tail = res.survival.back();
  return res;
}

ExitTimeResult exit_time_dp(const Kernel& k, int x0, double r, int horizon) {
  int n = k.size();
  auto provider = [&k, n](int x) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (int i = k.indptr[x]; i < k.indptr[x + 1]; ++i) row[k.indices[i]] = k.values[i];
    return row;
  };
  return exit_time_dp(*k.space, provider, x0, r, horizon);
}

std::vector<double> hitting_time_dp(const Kernel& k, int target, double r, int x,
                                    int horizon) {
  const auto& space = *k.space;
  std::vector<int> tset = space.ball(target, r);
  for (int v : tset)
    if (space.is_boundary(v))
      throw BoundaryContamination("target ball touches the window edge");
  std::vector<uint8_t> absorbing(space.size(), 0);
  for (int v : tset) absorbing[v] = 1;

  std::vector<double> hit(static_cast<size_t>(horizon) + 1, 0.0);
  Eigen::VectorXd alive = Eigen::VectorXd::Zero(space.size());
  double absorbed = 0.0;
  if (absorbing[x])
    absorbed = 1.0;
  else
    alive[x] = 1.0;
  hit[0] = absorbed;
  Eigen::VectorXd next(space.size());
  for (int n = 1; n <= horizon; ++n) {
    k.step(alive, next);
    for (int v = 0; v < space.size(); ++v)
      if (absorbing[v] && next[v] > 0.0) {
        absorbed += next[v];
        next[v] = 0.0;
      }
    alive.swap(next);
    hit[n] = absorbed;
  }
  return hit;
}

double tail_probability(const Kernel& k, int x0, int n, double r) {
  if (r <= 0.0) return 1.0;
  const auto& space = *k.space;
  Eigen::VectorXd row = Eigen::VectorXd::Zero(space.size());
  row[x0] = 1.0;
  Eigen::VectorXd scratch(space.size());
  for (int i = 0; i < n; ++i) {
    k.step(row, scratch);
    row.swap(scratch);
  }
  double tail = 1.0 - row.sum();  // leaked mass has left every ball
  for (int y = 0; y < space.size(); ++y)
    if (row[y] > 0.0 && space.distance(x0, y) >= r) tail += row[y];
  return tail;
}

ProfileCertification certify_profile(const Kernel& k, const EstimateProfile& prof,
                                     const std::vector<int>& centers, int n_max,
                                     double max_distance) {
  const auto& space = *k.space;
  std::vector<ProfileCertification> parts(centers.size(), {0.0, 0.0, 0, 0});
  RowEvolver ev(k, centers);
  ev.run(n_max, [&](int n, int ci, const Eigen::VectorXd& probs, double) {
    auto& cert = parts[ci];
    int x = centers[ci];
    double fr_inv = prof.f_inv(static_cast<double>(n));
    double v = space.volume(x, fr_inv);
    for (int y = 0; y < space.size(); ++y) {
      double d = space.distance(x, y);
      if (d > max_distance) continue;
      double p = probs[y] / space.measure(y);
      ++cert.points_checked;
      double fd = prof.f(d);
      if (fd <= static_cast<double>(n)) {
        if (p <= 0.0) {
          ++cert.zero_lower_points;
        } else {
          cert.lower_constant = std::max(cert.lower_constant, 1.0 / (v * p));
        }
      }
      if (p > 0.0) {
        double decay = prof.form == EstimateProfile::Form::sub_gaussian
                           ? std::exp(-prof.g(fd / static_cast<double>(n)))
                           : std::min(1.0, static_cast<double>(n) /
                                               (space.volume(x, d) * fd) * v);
        cert.upper_constant = std::max(cert.upper_constant, p * v / decay);
      }
    }
  });
  ProfileCertification cert{0.0, 0.0, 0, 0};
  for (const auto& part : parts) {
    cert.lower_constant = std::max(cert.lower_constant, part.lower_constant);
    cert.upper_constant = std::max(cert.upper_constant, part.upper_constant);
    cert.zero_lower_points += part.zero_lower_points;
    cert.points_checked += part.points_checked;
  }
  return cert;
}

}  // namespace subkernel
