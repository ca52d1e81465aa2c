#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subkernel/bernstein.hpp"
#include "subkernel/scaling.hpp"
#include "subkernel/space.hpp"
#include "subkernel/subordinate.hpp"

namespace subkernel {

/// Increasing scale function with a closed-form inverse.
struct Profile {
  std::function<double(double)> fn;
  std::function<double(double)> inv;
  std::string name;

  double operator()(double r) const { return fn(r); }
};

/// f(r) = a r^p
Profile power_profile(double a, double p, std::string name = {});
/// psi(r) = max(1/2, r^p), psi(0) = 1/2, psi(1) = 1; inv(s) = s^{1/p} above
/// 1/2 and 0 below.
Profile psi_profile(double p);

enum class TargetKind { dheat, thm1, thm2, green, one_step };

/// Evaluates the two-sided estimate shapes the kernels are compared against.
struct Target {
  TargetKind kind;
  const DiscreteSpace* space = nullptr;
  Profile psi;                         // dheat, green
  Profile f;                           // thm1, green, one_step
  const BernsteinFunction* phi = nullptr;  // thm1, thm2, one_step
  double alpha = 0.0;                  // thm2 base exponent
  double phi_inv_hi = 1.0;             // bisection bracket for phi^{-1}

  mutable std::map<double, double> phi_inv_cache;
  double phi_inv(double v) const;
};

double eval_target(const Target& t, double time, int x, int y);

struct Witness {
  double time = 0.0;
  int x = -1, y = -1;
  double value = 0.0, target = 0.0;
};

struct ComparabilityReport {
  double sup_ratio = 0.0;
  double inf_ratio = 0.0;
  Witness sup_witness, inf_witness;
  long points = 0;
  long excluded = 0;       // boundary/truncation filtered
  long zero_failures = 0;  // zero kernel values inside the claimed regime
  double c_max = 0.0;
  bool pass = false;
  std::string domain;
};

struct KernelSample {
  double time;
  int x, y;
  double value;        // kernel density
  double upper_slack;  // additive truncation bound on the value
  bool excluded;       // leak filter
};

ComparabilityReport comparability(const std::vector<KernelSample>& samples,
                                  const Target& target, double c_max,
                                  std::string domain_description = {});

struct HarnackParams {
  double B = 3.0;       // spatial shrink factor (default 3 / r0)
  double b = 1.66;      // enlarged cylinder factor
  double delta = 0.16;  // time-height factor
  int depth_pad = 1;
};

struct HarnackResult {
  double k0;
  double cylinder_max, initial_min;
  int n_used;
  Witness max_witness, min_witness;
};

/// K0 = max over Q(delta psi(R); z, R/B) of u against min over B(z, R/B) of
/// u(0, .) for u(j, y) = h_phi(N - j; z, y).
HarnackResult harnack_ratio(const SubordinateKernel& sk, int z, double R,
                            const Profile& psi, const HarnackParams& params);

struct ExitProfileRow {
  double r;
  double psi_r;
  double expected;    // E[tau ^ horizon]
  double ratio;       // expected / psi(r)
  double bias_bound;  // horizon truncation, from the survival tail
};
struct ExitProfileReport {
  std::vector<ExitProfileRow> rows;
  double band;  // max ratio / min ratio
};

ExitProfileReport exit_profile(const DiscreteSpace& space,
                               const std::function<Eigen::VectorXd(int)>& prob_row,
                               int x0, const std::vector<double>& radii,
                               const Profile& psi, int horizon);

struct TailCheckPoint {
  double t, r;
  double lhs;  // exact subordinate tail
  double rhs;  // (e/(e-1)) C1 t phi(f(r))
  bool ok;
};
struct TailCheckReport {
  double c1;  // empirical base constant sup P(d >= r)/(s f(r))
  std::vector<TailCheckPoint> points;
  bool all_ok;
};

/// Certifies the base tail hypothesis empirically (C1 estimated over every
/// base step up to k_max), then verifies the subordinated tail bound
/// pointwise on the (t, r) grid.
TailCheckReport tail_estimate_check(const Kernel& base, const SubordinateKernel& sk,
                                    int x0, const std::vector<int>& times,
                                    const std::vector<double>& radii,
                                    const std::function<double(double)>& f_envelope,
                                    const BernsteinFunction& phi);

struct MomentCheckResult {
  double lhs;  // truncated moment sum
  double rhs;  // C1 (2e/(e-1)) t f(r) phi(1/f(r))
  double c1;   // empirical constant of the square-envelope hypothesis
  bool ok;
};

MomentCheckResult truncated_moment_check(const Kernel& base,
                                         const SubordinateKernel& sk, int ci, int t,
                                         double r, const Profile& f,
                                         const BernsteinFunction& phi);

struct EquivalenceProbe {
  double beta1, beta2;       // estimated scaling indices of phi near zero
  bool scaling_ok;           // 0 < beta1 <= beta2 < 1
  ComparabilityReport one_step;
  bool consistent;           // scaling_ok == one_step.pass
};

/// Probes the equivalence between scaling of phi and the one-step
/// comparability; both sides are observations, not proofs.
EquivalenceProbe equivalence_probe_thm6(const BernsteinFunction& phi,
                                        const Kernel& base, const Profile& f,
                                        const std::vector<int>& row_set, int k_max,
                                        double max_distance, double c_max);

struct LevyConstructionResult {
  BernsteinFunction phi;  // normalized
  double band_lo, band_hi;  // phi(u) * psi(f^{-1}(1/u)) over the test grid
};

/// Bernstein function with Levy density 1/(s psi(f^{-1}(s))); requires
/// psi o f^{-1} increasing with a positive lower-scaling index.
LevyConstructionResult levy_density_for_psi(const Profile& psi, const Profile& f,
                                            const QuadratureConfig& quad = {});

}  // namespace subkernel
