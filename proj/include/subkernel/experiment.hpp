#pragma once

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subkernel/bernstein.hpp"
#include "subkernel/estimates.hpp"
#include "subkernel/markov.hpp"
#include "subkernel/report.hpp"
#include "subkernel/space.hpp"
#include "subkernel/subordinate.hpp"

namespace subkernel {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  // space
  std::string space_kind = "lattice";  // lattice | gasket | edge_list
  int dim = 1;
  int side = 2049;
  int level = 4;
  std::string edge_path;
  BoundaryPolicy boundary = BoundaryPolicy::truncated;

  std::string chain = "averaged";  // srw | averaged
  Json bernstein = Json{{"kind", "stable"}, {"alpha", 0.5}};

  int depth = 12288;  // base-chain truncation K
  int n_max = 128;    // subordinate time grid 1..n_max
  std::vector<double> radii = {4, 8, 16, 32};
  std::vector<double> harnack_radii = {16, 32, 64};
  int center_count = 9;
  std::vector<int> centers;  // explicit override
  double max_distance = 256;

  std::vector<std::string> suites;
  double tail_tol = 0.1;
  double c_max = 100.0;
  double exit_band_max = 50.0;
  double cor3_max = 50.0;
  double psi_exponent = 0.0;  // 0 -> walk_dim * alpha (stable only)
  int horizon = 0;            // 0 -> ceil(10 psi(r_max))
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";

  static ExperimentConfig from_json(const Json& j);
  static ExperimentConfig from_file(const std::string& path);
  Json to_json() const;
};

BernsteinFunction bernstein_from_json(const Json& spec);

struct SuiteResult {
  std::string name;
  bool pass = false;
  Json data;
  std::vector<CsvRow> csv;
};

/// Memoized build pipeline shared by the suites.
class Lab {
 public:
  explicit Lab(ExperimentConfig cfg);

  const ExperimentConfig& cfg() const { return cfg_; }
  const DiscreteSpace& space();
  const Kernel& base();
  const BernsteinFunction& phi();
  const SubordinatorWeights& weights();
  const std::vector<StepLaw>& laws();
  const std::vector<int>& centers();
  int middle_center();
  const SubordinateKernel& slices();
  const OneStepMatrix& one_step_for(const std::vector<int>& rows);
  double walk_dimension();
  double psi_exponent();
  Profile psi();
  Profile base_scale();  // f(r) = r^{walk_dim}
  double stable_alpha() const { return stable_alpha_; }

  static constexpr double kLeakTol = 1e-9;

 private:
  ExperimentConfig cfg_;
  std::optional<DiscreteSpace> space_;
  std::optional<Kernel> srw_, base_;
  std::optional<BernsteinFunction> phi_;
  std::optional<SubordinatorWeights> weights_;
  std::optional<std::vector<StepLaw>> laws_;
  std::optional<std::vector<int>> centers_;
  std::optional<SubordinateKernel> slices_;
  std::vector<std::pair<std::vector<int>, OneStepMatrix>> one_step_cache_;
  double stable_alpha_ = -1.0;
};

SuiteResult run_suite(Lab& lab, const std::string& name);

/// Runs the selected suites, writes report.json plus grid CSVs and SVG plots
/// into cfg.out_dir; returns 0 when every suite passes, 1 otherwise.
int run_experiment(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
Json preset_config(const std::string& name);

}  // namespace subkernel
