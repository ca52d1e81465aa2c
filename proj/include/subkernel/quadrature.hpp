#pragma once

#include <functional>

#include "subkernel/errors.hpp"

namespace subkernel {

/// Tolerances and truncation for the Levy-measure integrals.
struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 15;
  double upper_cutoff = 1e6;  // truncation point of the Levy integral

  void validate() const {
    if (abs_tol <= 0 || rel_tol <= 0)
      throw ConfigError("quadrature tolerances must be positive");
    if (max_subdivisions < 1)
      throw ConfigError("max_subdivisions must be >= 1");
    if (upper_cutoff <= 0)
      throw ConfigError("upper_cutoff must be positive");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error incl. neglected tails
};

/// Adaptive Gauss-Kronrod on [a, b]. Throws QuadratureFailure when the
/// subdivision limit is reached before the requested tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureConfig& cfg);

/// Integral over (0, upper_cutoff] split as a log-substituted piece on (0, 1]
/// and an adaptive piece on [1, upper]. `small_t_decay` is a lower bound on
/// the power-law vanishing rate of the integrand at 0 (integrand = O(t^p),
/// p = small_t_decay > -1); it controls where the log substitution is cut.
QuadratureResult integrate_levy(const std::function<double(double)>& f,
                                double upper, double small_t_decay,
                                const QuadratureConfig& cfg);

}  // namespace subkernel
