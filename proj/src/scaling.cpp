#include "subkernel/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace subkernel {

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(n);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    out.push_back(std::exp(llo + (lhi - llo) * i / std::max(1, n - 1)));
  return out;
}

}  // namespace

VerifyResult verify(const std::function<double(double)>& f,
                    const ScalingCertificate& cert, const ScalingGrid& grid) {
  if (cert.direction == ScalingDirection::at_infinity) {
    auto g = [&f](double x) { return 1.0 / f(1.0 / x); };
    ScalingCertificate flipped = cert;
    flipped.direction = ScalingDirection::at_zero;
    flipped.constant = 1.0 / cert.constant;
    flipped.theta0 = 1.0 / cert.theta0;
    ScalingGrid inner = grid;
    inner.theta_min = 1.0 / grid.theta_max;
    inner.theta_max = 1.0 / grid.theta_min;
    return verify(g, flipped, inner);
  }

  VerifyResult res;
  res.worst_violation = -std::numeric_limits<double>::infinity();
  double theta_hi = std::min(grid.theta_max, cert.theta0);
  auto thetas = log_spaced(grid.theta_min, theta_hi, grid.n_theta);
  auto lambdas = log_spaced(grid.lambda_min, 1.0, grid.n_lambda);
  for (double theta : thetas) {
    double ft = f(theta);
    if (!(ft > 0.0)) throw DomainError("verify: f must be positive on the grid");
    for (double lam : lambdas) {
      double flt = f(lam * theta);
      if (!(flt > 0.0)) throw DomainError("verify: f must be positive on the grid");
      double lhs = std::log(flt);
      double rhs = std::log(cert.constant) + cert.index * std::log(lam) + std::log(ft);
      // lower: lhs <= rhs; upper: lhs >= rhs
      double viol = cert.kind == ScalingKind::lower ? lhs - rhs : rhs - lhs;
      if (viol > res.worst_violation) {
        res.worst_violation = viol;
        res.witness_lambda = lam;
        res.witness_theta = theta;
      }
    }
  }
  res.ok = res.worst_violation <= 1e-9;
  return res;
}

VerifyResult verify_samples(const std::vector<double>& thetas,
                            const std::vector<double>& values,
                            const ScalingCertificate& cert) {
  if (cert.direction == ScalingDirection::at_infinity) {
    size_t n = thetas.size();
    std::vector<double> t2(n), v2(n);
    for (size_t i = 0; i < n; ++i) {
      t2[n - 1 - i] = 1.0 / thetas[i];
      v2[n - 1 - i] = 1.0 / values[i];
    }
    ScalingCertificate flipped = cert;
    flipped.direction = ScalingDirection::at_zero;
    flipped.constant = 1.0 / cert.constant;
    flipped.theta0 = 1.0 / cert.theta0;
    return verify_samples(t2, v2, flipped);
  }
  VerifyResult res;
  res.worst_violation = -std::numeric_limits<double>::infinity();
  double logc = std::log(cert.constant);
  for (size_t j = 1; j < thetas.size(); ++j) {
    if (thetas[j] > cert.theta0) break;
    for (size_t i = 0; i < j; ++i) {
      double lam = thetas[i] / thetas[j];
      double lhs = std::log(values[i]);
      double rhs = logc + cert.index * std::log(lam) + std::log(values[j]);
      double viol = cert.kind == ScalingKind::lower ? lhs - rhs : rhs - lhs;
      if (viol > res.worst_violation) {
        res.worst_violation = viol;
        res.witness_lambda = lam;
        res.witness_theta = thetas[j];
      }
    }
  }
  res.ok = res.worst_violation <= 1e-9;
  return res;
}

IndexEstimate estimate_indices(const std::vector<double>& thetas,
                               const std::vector<double>& values,
                               ScalingDirection direction) {
  size_t n = thetas.size();
  if (n != values.size() || n < 8)
    throw DomainError("estimate_indices: need >= 8 aligned samples");
  if (direction == ScalingDirection::at_infinity) {
    std::vector<double> t2(n), v2(n);
    for (size_t i = 0; i < n; ++i) {
      t2[n - 1 - i] = 1.0 / thetas[i];
      v2[n - 1 - i] = 1.0 / values[i];
    }
    IndexEstimate inner = estimate_indices(t2, v2, ScalingDirection::at_zero);
    auto flip = [](ScalingCertificate c) {
      c.direction = ScalingDirection::at_infinity;
      c.constant = 1.0 / c.constant;
      c.theta0 = 1.0 / c.theta0;
      return c;
    };
    inner.lower = flip(inner.lower);
    inner.upper = flip(inner.upper);
    return inner;
  }

  std::vector<double> lt(n), lv(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(thetas[i] > 0.0 && values[i] > 0.0))
      throw DomainError("estimate_indices: samples must be positive");
    if (i > 0 && thetas[i] <= thetas[i - 1])
      throw DomainError("estimate_indices: thetas must be increasing");
    lt[i] = std::log(thetas[i]);
    lv[i] = std::log(values[i]);
  }

  double vmax = *std::max_element(lv.begin(), lv.end());
  double vmin = *std::min_element(lv.begin(), lv.end());
  IndexEstimate est;
  double theta0 = thetas.back();
  std::ostringstream grid_desc;
  grid_desc << n << " log-spaced samples on [" << thetas.front() << ", "
            << thetas.back() << "]";
  if (vmax - vmin < 1e-12) {
    est.degenerate = true;
    for (auto kind : {ScalingKind::lower, ScalingKind::upper}) {
      ScalingCertificate c;
      c.kind = kind;
      c.index = 0.0;
      c.constant = 1.0;
      c.theta0 = theta0;
      c.verified_grid = grid_desc.str();
      (kind == ScalingKind::lower ? est.lower : est.upper) = c;
    }
    return est;
  }

  // Indices from slopes of pairs at least two grid steps apart (local jitter
  // is cheaper to absorb into the constants than into the exponents).
  double alpha = std::numeric_limits<double>::infinity();
  double beta = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 2 < n; ++i)
    for (size_t j = i + 2; j < n; ++j) {
      double s = (lv[j] - lv[i]) / (lt[j] - lt[i]);
      alpha = std::min(alpha, s);
      beta = std::max(beta, s);
    }

  // Constants from the worst violation over all pairs (adjacent included).
  double viol_lower = 0.0, viol_upper = 0.0;
  for (size_t i = 0; i + 1 < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double dt = lt[j] - lt[i];
      double s = (lv[j] - lv[i]) / dt;
      viol_lower = std::max(viol_lower, (alpha - s) * dt);
      viol_upper = std::max(viol_upper, (s - beta) * dt);
    }

  est.lower.kind = ScalingKind::lower;
  est.lower.index = alpha;
  est.lower.constant = std::exp(viol_lower);
  est.lower.theta0 = theta0;
  est.lower.verified_grid = grid_desc.str();
  est.lower.worst_violation = 0.0;

  est.upper.kind = ScalingKind::upper;
  est.upper.index = beta;
  est.upper.constant = std::exp(-viol_upper);
  est.upper.theta0 = theta0;
  est.upper.verified_grid = grid_desc.str();
  est.upper.worst_violation = 0.0;
  return est;
}

IndexEstimate estimate_indices(const std::function<double(double)>& f,
                               double theta_min, double theta_max, int n_samples,
                               ScalingDirection direction) {
  auto thetas = log_spaced(theta_min, theta_max, std::max(8, n_samples));
  std::vector<double> values(thetas.size());
  for (size_t i = 0; i < thetas.size(); ++i) values[i] = f(thetas[i]);
  return estimate_indices(thetas, values, direction);
}

}  // namespace subkernel
