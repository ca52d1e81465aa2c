#pragma once

#include <functional>
#include <string>
#include <vector>

#include "subkernel/errors.hpp"

namespace subkernel {

enum class ScalingDirection { at_zero, at_infinity };
enum class ScalingKind { lower, upper };

/// Grid-verified weak scaling certificate. With kind == lower the claim is
/// f(lambda theta) <= C lambda^index f(theta); with kind == upper it is
/// f(lambda theta) >= c lambda^index f(theta), for lambda in (0,1] and
/// theta < theta0. At-infinity certificates are the at-zero statement for the
/// reciprocal transform g(x) = 1/f(1/x) with constant and theta0 inverted.
struct ScalingCertificate {
  ScalingDirection direction = ScalingDirection::at_zero;
  ScalingKind kind = ScalingKind::lower;
  double index = 0.0;
  double constant = 1.0;
  double theta0 = 1.0;  // may be +inf
  std::string verified_grid;
  double worst_violation = 0.0;  // log scale; <= 0 when valid
};

struct ScalingGrid {
  int n_lambda = 48;
  int n_theta = 96;
  double lambda_min = 1e-3;
  double theta_min = 1e-3;
  double theta_max = 1.0;
};

struct VerifyResult {
  bool ok = false;
  double worst_violation = 0.0;  // log scale
  double witness_lambda = 0.0;
  double witness_theta = 0.0;
};

VerifyResult verify(const std::function<double(double)>& f,
                    const ScalingCertificate& cert, const ScalingGrid& grid);

/// Pairwise check of the certificate inequality on sampled data: every pair
/// (theta_i, theta_j), i < j, is tested with lambda = theta_i / theta_j.
VerifyResult verify_samples(const std::vector<double>& thetas,
                            const std::vector<double>& values,
                            const ScalingCertificate& cert);

struct IndexEstimate {
  ScalingCertificate lower;  // best (largest) valid lower index
  ScalingCertificate upper;  // best (smallest) valid upper index
  bool degenerate = false;   // constant data; indices forced to 0
};

/// Extremal pairwise log-log slopes of f over the sample points, with
/// constants sized from the worst grid violation so that both returned
/// certificates re-verify on the sample grid.
IndexEstimate estimate_indices(const std::vector<double>& thetas,
                               const std::vector<double>& values,
                               ScalingDirection direction);

/// Convenience: log-spaced sampling of f followed by estimate_indices.
IndexEstimate estimate_indices(const std::function<double(double)>& f,
                               double theta_min, double theta_max, int n_samples,
                               ScalingDirection direction);

}  // namespace subkernel
