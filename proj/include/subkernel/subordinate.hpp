#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "subkernel/bernstein.hpp"
#include "subkernel/markov.hpp"

namespace subkernel {

/// One pass over the base rows p(k; x, .) accumulating, per source vertex,
/// any number of weighted sums sum_k w_j(k) p(k; x, .). Subordinate kernels,
/// Poissonization, Green rows and renewal sums are all jobs of this engine.
struct RowSumJob {
  const std::vector<double>* weights;  // indexed by k, entry 0 ignored
  double total_weight = 1.0;           // sum over all k (tails included)
};

struct RowSumOutputs {
  // [center][job] probability-convention rows
  std::vector<std::vector<Eigen::VectorXd>> rows;
  // [center][job] sum_k w_j(k) * (leaked mass of p(k; x, .))
  std::vector<std::vector<double>> leak;
  // [center][job] weight mass above k_max (caller-declared totals minus used)
  std::vector<std::vector<double>> undispatched_weight;
  // [center] empirical sup-norm envelope of h(k) over the last octave of k
  std::vector<double> late_sup_density;
  // [center][k] sup_y h(k; x, y), kept when requested
  std::vector<std::vector<double>> sup_density_series;
};

RowSumOutputs weighted_row_sums(const Kernel& base, const std::vector<int>& centers,
                                int k_max, const std::vector<RowSumJob>& jobs,
                                bool keep_sup_series = false);

/// Subordinate kernel slices H_phi(n; x, .) for sampled sources, n = 1..n_max.
class SubordinateKernel {
 public:
  const Kernel* base = nullptr;
  const DiscreteSpace* space = nullptr;
  SubordinatorWeights weights;
  std::vector<StepLaw> laws;  // n = 1..n_max
  std::vector<int> centers;
  int k_max = 0;

  /// density slice h_phi(n; centers[ci], .)
  const Eigen::VectorXd& density(int ci, int n) const { return dens_[ci][n - 1]; }
  double trunc_bound(int ci, int n) const { return trunc_[ci][n - 1]; }
  double leak(int ci, int n) const { return leak_[ci][n - 1]; }
  int n_max() const { return static_cast<int>(laws.size()); }

  // filled by subordinate()
  std::vector<std::vector<Eigen::VectorXd>> dens_;
  std::vector<std::vector<double>> trunc_, leak_;
};

/// Builds the slices; throws InsufficientBaseDepth when the laws extend past
/// k_max.
SubordinateKernel subordinate(const Kernel& base, const SubordinatorWeights& w,
                              std::vector<StepLaw> laws, std::vector<int> centers,
                              int k_max);

/// Dense one-step subordinate matrix on a row subset (probability rows over
/// the full window).
struct OneStepMatrix {
  const DiscreteSpace* space = nullptr;
  std::vector<int> rows;              // source vertices
  Eigen::MatrixXd prob;               // |rows| x window
  std::vector<double> trunc, leak_v;  // per row
  std::vector<int> row_pos;           // vertex -> row index or -1

  double density(int x, int y) const;
  double prob_at(int x, int y) const;
  bool has_row(int x) const { return row_pos[x] >= 0; }
};

OneStepMatrix one_step_matrix(const Kernel& base, const SubordinatorWeights& w,
                              const std::vector<int>& row_set, int k_max);

struct JumpKernelChecks {
  double max_mass_defect;     // max over rows of |1 - trunc - sum|
  double max_asymmetry;       // density convention, over available pairs
  double min_entry;
};
JumpKernelChecks jump_kernel_checks(const OneStepMatrix& m);

/// Poissonized kernel rows p(t; x, .) = sum_k h(k) e^{-t} t^k / k! including
/// the k = 0 atom; `poisson_tail` is the truncated Poisson mass.
struct PoissonizedRows {
  std::vector<int> centers;
  std::vector<Eigen::VectorXd> dens;
  double t;
  double poisson_tail;
  std::vector<double> leak_v;
};
PoissonizedRows poissonize(const Kernel& base, double t, int K,
                           const std::vector<int>& centers);

struct GreenTable {
  std::vector<int> centers;
  std::vector<Eigen::VectorXd> dens;        // sum_{n>=1} h_phi(n; x, .)
  std::vector<double> atom;                 // n = 0 diagonal term 1/mu(x)
  std::vector<double> tail_envelope;        // bound on the k > k_max remainder
  bool tail_envelope_finite = true;
  double dini_slope = 0.0;                  // log-log decay of sup_x h_phi(n;x,x)
  bool convergent = false;                  // slope clearly below -1
  std::vector<double> leak_v;
};

struct GreenOptions {
  int dini_n_max = 256;
  double dini_throw_slope = -0.85;  // slope above this -> NotConvergent
  double dini_convergent_slope = -1.15;
};

/// Green rows by the renewal route G = sum_k u(k) h(k; x, .) with
/// u(k) = sum_n P(T_n = k), complete for k <= k_max. Throws NotConvergent in
/// the clearly recurrent regime (empirical Dini test).
GreenTable green(const Kernel& base, const SubordinatorWeights& w,
                 const std::vector<int>& centers, int k_max,
                 const GreenOptions& opt = {});

/// Independent route on a subwindow: G restricted to W solves a linear system
/// in the one-step subordinate matrix with absorption outside W.
Eigen::VectorXd green_via_resolvent(const OneStepMatrix& m,
                                    const std::vector<int>& subwindow, int source);

/// Gamma[f]({x}) = 1/2 sum_y (f(x) - f(y))^2 J(x, y) mu(y) mu(x) for x in the
/// row set of m.
std::vector<double> carre_du_champ(const OneStepMatrix& m,
                                   const std::vector<double>& f);

struct CsProbeResult {
  double lhs;
  double rhs;
  bool satisfied;
  double energy_term;      // the epsilon-weighted double sum
  double l2_term;          // int f^2 dmu over B(x0, R + 2r)
  double c_threshold;      // smallest C making the inequality hold
};

/// Finite-family probe of the cut-off Sobolev inequality; not a proof.
CsProbeResult cs_probe(const OneStepMatrix& m, double psi_r, int x0, double R,
                       double r, const std::vector<double>& f,
                       const std::vector<double>& cutoff, double epsilon, double C);

struct McOptions {
  int x0 = 0;
  double ball_r = 0.0;     // exit statistics ball
  int n_steps = 64;        // horizon in subordinate time
  long n_paths = 10000;
  std::uint64_t seed = 1;
  int tail_time = 1;       // empirical P(d(S^phi_t, x0) >= tail_r)
  double tail_r = 1.0;
  double subordinator_r = 0.0;  // empirical P(T_t >= r), 0 disables
};

struct McStats {
  double exit_mean, exit_stderr;
  double tail_freq, tail_stderr;
  double subordinator_tail_freq, subordinator_tail_stderr;
  long paths;
};

/// Path sampling of the subordinate chain (weights truncated and
/// renormalized); statistical cross-check for the DP routes.
McStats mc_sample(const Kernel& base, const SubordinatorWeights& w,
                  const McOptions& opt);

}  // namespace subkernel
