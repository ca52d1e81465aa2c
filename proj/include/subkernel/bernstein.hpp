#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subkernel/errors.hpp"
#include "subkernel/quadrature.hpp"

namespace subkernel {

/// Power-law envelope on a Levy density: density(t) <= coef * t^{-pow} for
/// t >= from. Used to bound the neglected tail beyond the quadrature cutoff.
struct DensityEnvelope {
  double coef = 0.0;
  double pow = 0.0;
  double from = 1.0;
};

/// phi(u) = b u + int (1 - e^{-u t}) nu(dt), phi(0) = 0 (no killing).
/// `scale` multiplies the whole triple (drift, density, atoms); normalization
/// folds into it.
class BernsteinFunction {
 public:
  enum class Closed { none, identity, stable, ratio };

  double drift = 0.0;
  std::function<double(double)> density;  // nu(t), may be empty
  std::string density_text;               // for serialization when known
  std::vector<std::pair<double, double>> atoms;  // (location > 0, mass > 0)
  Closed closed = Closed::none;
  double alpha = 0.0;  // stable exponent, when closed == stable
  double scale = 1.0;
  std::optional<DensityEnvelope> envelope;
  // power-law vanishing rate of nu at 0: nu(t) = O(t^p) near 0 (p may be
  // negative but > -2 so that t*nu is integrable); steers the quadrature.
  double density_power_at_zero = 0.0;
  QuadratureConfig quad;

  static BernsteinFunction make_identity();
  static BernsteinFunction make_stable(double alpha);
  /// nu(t) = e^{-t}: phi(u) = u/(1+u).
  static BernsteinFunction make_ratio();
  static BernsteinFunction make_custom(double drift,
                                       std::function<double(double)> density,
                                       double power_at_zero = 0.0,
                                       std::string text = {});

  bool has_density() const { return static_cast<bool>(density); }
  double density_at(double t) const;  // scale folded in

  /// Checks sigma-finiteness of min{1,t} nu(dt), positivity of nu on a grid,
  /// monotonicity and midpoint concavity of phi on a log grid.
  void validate() const;
};

double eval(const BernsteinFunction& phi, double u);

/// Monotone bisection for phi^{-1}(v) on [lo, hi].
double inverse(const BernsteinFunction& phi, double v, double lo, double hi);

/// phi / phi(1); throws DegenerateFunction when phi(1) == 0.
BernsteinFunction normalize(const BernsteinFunction& phi);

/// Step distribution c(k) = |phi^(k)(1)|/k! of the discrete subordinator,
/// k = 1..K, with the undistributed remainder kept as tail mass.
struct SubordinatorWeights {
  std::vector<double> c;  // c[k], k = 0..K with c[0] == 0
  double tail_mass = 0.0;
  bool normalized = false;   // phi(1) == 1 asserted at construction
  double quad_error = 0.0;   // accumulated quadrature + cutoff budget
  int K() const { return static_cast<int>(c.size()) - 1; }
};

/// c(k) by quadrature of t^k e^{-t}/k! against the Levy measure (plus the
/// drift atom at k = 1). Throws TailToleranceNotMet when 1 - sum c > tail_tol.
SubordinatorWeights weights(const BernsteinFunction& phi, int K, double tail_tol);

/// Doubles K until the tail tolerance is met (or K exceeds k_max).
SubordinatorWeights weights_auto(const BernsteinFunction& phi, double tail_tol,
                                 int k_max);

/// Law of T_n = R_1 + ... + R_n truncated at K_cap.
struct StepLaw {
  int n = 0;
  std::vector<double> p;     // p[k] = P(T_n = k), k = 0..K_cap
  double tail_mass = 0.0;    // 1 - sum p (weight tail + convolution cutoff)
  double numeric_slack = 0.0;  // accumulated fp/FFT roundoff budget
  int min_support() const { return n; }

  double cdf(double x) const;        // P(T_n <= x), exact for x < K_cap
  double upper_tail(double r) const;  // P(T_n >= r), exact for r <= K_cap
  double laplace(double lambda) const;
};

StepLaw step_law(const SubordinatorWeights& w, int n, int K_cap);

/// Laws for every n = 1..n_max by sequential convolution (FFT above a size
/// threshold, direct below).
std::vector<StepLaw> step_laws(const SubordinatorWeights& w, int n_max, int K_cap);

/// Renewal mass function u(k) = sum_{n>=1} P(T_n = k), complete for k <= K_cap.
std::vector<double> renewal_mass(const SubordinatorWeights& w, int K_cap);

struct LaplacePair {
  double direct;  // sum_k P(T_n = k) e^{-lambda k}
  double closed;  // (1 - phi(1 - e^{-lambda}))^n
};
LaplacePair laplace_Tn(const SubordinatorWeights& w, const BernsteinFunction& phi,
                       double lambda, int n);

struct TailBound {
  double upper;  // min{1, e/(e-1) t phi(1/r)}
  std::optional<double> lower_envelope;  // min{1, t phi(1/r)}, unit constant
};
/// The lower envelope is only emitted against an upper-scaling index < 1
/// (supplied by the caller); its constant is left to empirical estimation.
TailBound tail_bounds(const BernsteinFunction& phi, int t, double r,
                      std::optional<double> upper_scaling_index = std::nullopt);

/// U([0, x]) = sum_{n=0}^{min(floor(x), n_max)} P(T_n <= x); the n = 0 term
/// contributes 1 and terms with n > x vanish because T_n >= n.
double potential_measure(const SubordinatorWeights& w, double x, int n_max);

struct LevyComparisonRow {
  int k;
  double c_k;
  double nu_k;
  double ratio;          // c(k) / nu(k)
  double lower_envelope;  // P(Gamma(k+1) <= k) = regularized incomplete gamma
};
/// Per-k comparison of the subordinator weights against the Levy density.
/// Requires a density, nonincreasing on [1, infinity) (checked on a grid).
std::vector<LevyComparisonRow> levy_comparison(const BernsteinFunction& phi,
                                               const SubordinatorWeights& w,
                                               int k_lo, int k_hi);

struct Corollary3Row {
  int n;
  double weighted_sum;  // S(n) = sum_k P(T_n = k) k^{-d/2}
  double envelope;      // (phi^{-1}(1/n))^{d/2}
  double ratio;
};
struct Corollary3Report {
  std::vector<Corollary3Row> rows;
  double sup_ratio = 0.0;
};
Corollary3Report corollary3_check(const SubordinatorWeights& w,
                                  const BernsteinFunction& phi, int d, int n_max,
                                  int K_cap);

/// eq. check helper: phi(lambda * theta) >= lambda * phi(theta) on a grid.
double concavity_worst_violation(const BernsteinFunction& phi,
                                 double theta_max = 1e3);

}  // namespace subkernel
