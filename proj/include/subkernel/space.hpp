#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "subkernel/errors.hpp"

namespace subkernel {

enum class BoundaryPolicy { truncated, reflected };

/// Finite vertex set with a metric, a positive vertex measure and ball/volume
/// queries. Lattices are finite windows of Z^d (l1 metric, counting measure);
/// graphs carry the shortest-path metric and measure = weighted degree unless
/// given explicitly.
class DiscreteSpace {
 public:
  struct Edge {
    int to;
    double weight;
  };

  int size() const { return static_cast<int>(measure_.size()); }
  double measure(int v) const { return measure_[v]; }
  double total_measure() const { return total_measure_; }
  double r0() const { return r0_; }
  BoundaryPolicy boundary_policy() const { return policy_; }
  bool is_boundary(int v) const { return boundary_[v] != 0; }
  bool connected() const { return connected_; }

  double distance(int a, int b) const;
  const std::vector<Edge>& neighbors(int v) const { return adjacency_[v]; }
  double weighted_degree(int v) const;

  /// V(x, r) = mu(closed ball).
  double volume(int x, double r) const;
  std::vector<int> ball(int x, double r) const;
  /// Graph steps from x to the complement of the window (lattice windows
  /// only count the missing outside; genuinely finite spaces return +inf).
  double boundary_margin(int x) const;
  double diameter_hint() const { return diameter_hint_; }

  // lattice access (valid when dim_ > 0)
  int dim() const { return dim_; }
  int side() const { return side_; }

  static DiscreteSpace build_lattice(int dim, int side,
                                     BoundaryPolicy policy = BoundaryPolicy::truncated,
                                     long vertex_budget = 1 << 21);
  static DiscreteSpace build_gasket(int level, int level_cap = 8);
  static DiscreteSpace load_edge_list(const std::string& path);

 private:
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<double> measure_;
  double total_measure_ = 0.0;
  double r0_ = 0.99;
  BoundaryPolicy policy_ = BoundaryPolicy::truncated;
  std::vector<uint8_t> boundary_;
  bool connected_ = true;
  bool lattice_metric_ = false;
  int dim_ = 0, side_ = 0;
  std::vector<int> coords_;  // dim_ per vertex when lattice
  double diameter_hint_ = 0.0;

  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::vector<double>> bfs_cache_;
  mutable std::map<int, std::pair<std::vector<int>, std::vector<double>>>
      sorted_dist_cache_;  // vertex order + prefix measure by distance

  const std::vector<double>& bfs_from(int src) const;
  const std::pair<std::vector<int>, std::vector<double>>& sorted_from(int x) const;
  void finalize();
};

struct VolumeCertificate {
  double c_v = 1.0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double r_min = 0.0, r_max = 0.0;
  double worst_upper_violation = 0.0;  // log scale, <= 0 when valid
  double worst_lower_violation = 0.0;
};

/// Smallest constant and extremal growth exponents validating the two-sided
/// volume bound over sampled interior centers and log-spaced radii.
VolumeCertificate volume_certificate(const DiscreteSpace& space, int sample_centers,
                                     double r_min, double r_max);

}  // namespace subkernel
