#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "subkernel/scaling.hpp"
#include "subkernel/space.hpp"

namespace subkernel {

/// One-step transition kernel in CSR form, probability convention
/// P(x, y) = h(1; x, y) mu({y}). Rows at truncated window edges are
/// substochastic; the missing mass is the per-step leak.
class Kernel {
 public:
  const DiscreteSpace* space = nullptr;
  std::vector<int> indptr;
  std::vector<int> indices;
  std::vector<double> values;
  bool symmetric_density = false;

  int size() const { return space->size(); }
  double prob(int x, int y) const;
  double h1(int x, int y) const { return prob(x, y) / space->measure(y); }
  double row_sum(int x) const;

  /// probs_out[y] = sum_x probs_in[x] P(x, y)
  void step(const Eigen::VectorXd& probs_in, Eigen::VectorXd& probs_out) const;

  Eigen::MatrixXd dense() const;  // probability matrix
};

/// Simple random walk: step x -> y with probability w(x, y) / W(x) where W is
/// the full degree (window-truncated rows keep the full-lattice denominator
/// and leak at the edge; reflected windows fold the outside mass into a stay).
Kernel srw(const DiscreteSpace& space);

/// One-step kernel (p(1) + p(2)) / 2; removes bipartite parity.
Kernel average_two_step(const Kernel& k);

/// Dense stack H(1..n_max) of n-step densities for small spaces.
class DenseStack {
 public:
  DenseStack(const Kernel& k, int n_max, size_t memory_budget = size_t(2) << 30);
  int n_max() const { return static_cast<int>(steps_.size()); }
  /// h(n; x, y)
  double density(int n, int x, int y) const;
  const Eigen::MatrixXd& prob_matrix(int n) const { return steps_[n - 1]; }
  /// worst Chapman-Kolmogorov residual for h(m+n) over sampled entries
  double chapman_kolmogorov_residual(int m, int n) const;

 private:
  const Kernel* kernel_;
  std::vector<Eigen::MatrixXd> steps_;
};

/// Streams probability rows p(k; x, .) for a set of source vertices,
/// k = 1..k_max, calling visit(k, center_index, row) after every step.
/// Tracks the accumulated leak 1 - |row|_1 per center.
class RowEvolver {
 public:
  RowEvolver(const Kernel& k, std::vector<int> centers);
  void run(int k_max,
           const std::function<void(int k, int center_idx, const Eigen::VectorXd& probs,
                                    double leak)>& visit);
  const std::vector<int>& centers() const { return centers_; }

 private:
  const Kernel* kernel_;
  std::vector<int> centers_;
};

struct ExitTimeResult {
  std::vector<double> survival;  // P(tau > n), n = 0..horizon
  double expected_truncated;     // E[tau ^ horizon]
  double horizon_tail;           // P(tau > horizon)
};

/// Absorbing-chain DP on the ball B(x0, r) for an arbitrary one-step row
/// provider (base or subordinate kernels alike).
ExitTimeResult exit_time_dp(const DiscreteSpace& space,
                            const std::function<Eigen::VectorXd(int)>& prob_row,
                            int x0, double r, int horizon);
ExitTimeResult exit_time_dp(const Kernel& k, int x0, double r, int horizon);

/// P(T <= n) for the hitting time of B(target, r) started at x, n = 0..horizon.
std::vector<double> hitting_time_dp(const Kernel& k, int target, double r, int x,
                                    int horizon);

/// P^x0(d(S_n, x0) >= r), exact within the window.
double tail_probability(const Kernel& k, int x0, int n, double r);

/// Two-sided kernel-shape hypothesis: profile functions with certificates.
struct EstimateProfile {
  enum class Form { sub_gaussian, stable };
  Form form = Form::sub_gaussian;
  std::function<double(double)> f;      // space-time scale, increasing, f(0)=0
  std::function<double(double)> f_inv;
  std::function<double(double)> g;      // decay rate (sub_gaussian form)
  double alpha = 0.0;                    // stable form exponent
  std::optional<ScalingCertificate> f_lower, f_upper, g_lower;
};

struct ProfileCertification {
  double lower_constant;  // sup of target_lower / p over admissible points
  double upper_constant;  // sup of p / target_upper
  int zero_lower_points;  // points with p == 0 inside the indicator regime
  int points_checked;
};

/// Empirical constants for the sandwich
///   C^-1 V(x, f^{-1}(n))^{-1} 1{f(d) <= n} <= p(n;x,y)
///                <= C V(x, f^{-1}(n))^{-1} e^{-g(f(d)/n)}
/// over the sampled grid. Constants are reported, never asserted.
ProfileCertification certify_profile(const Kernel& k, const EstimateProfile& prof,
                                     const std::vector<int>& centers, int n_max,
                                     double max_distance);

}  // namespace subkernel
