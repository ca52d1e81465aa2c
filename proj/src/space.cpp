#include "subkernel/space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace subkernel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double DiscreteSpace::distance(int a, int b) const {
  if (a == b) return 0.0;
  if (lattice_metric_) {
    long d = 0;
    for (int i = 0; i < dim_; ++i)
      d += std::abs(coords_[a * dim_ + i] - coords_[b * dim_ + i]);
    return static_cast<double>(d);
  }
  return bfs_from(a)[b];
}

double DiscreteSpace::weighted_degree(int v) const {
  double s = 0.0;
  for (const auto& e : adjacency_[v]) s += e.weight;
  return s;
}

const std::vector<double>& DiscreteSpace::bfs_from(int src) const {
  std::scoped_lock lock(cache_mutex_);
  auto it = bfs_cache_.find(src);
  if (it != bfs_cache_.end()) return it->second;
  std::vector<double> dist(size(), kInf);
  std::deque<int> queue{src};
  dist[src] = 0.0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (const auto& e : adjacency_[v])
      if (dist[e.to] == kInf) {
        dist[e.to] = dist[v] + 1.0;
        queue.push_back(e.to);
      }
  }
  return bfs_cache_.emplace(src, std::move(dist)).first->second;
}

const std::pair<std::vector<int>, std::vector<double>>& DiscreteSpace::sorted_from(
    int x) const {
  {
    std::scoped_lock lock(cache_mutex_);
    auto it = sorted_dist_cache_.find(x);
    if (it != sorted_dist_cache_.end()) return it->second;
  }
  std::vector<int> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(size());
  for (int v = 0; v < size(); ++v) dist[v] = distance(x, v);
  std::stable_sort(order.begin(), order.end(),
                   [&dist](int a, int b) { return dist[a] < dist[b]; });
  std::vector<double> prefix(size());
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) {
    acc += measure_[order[i]];
    prefix[i] = acc;
  }
  // store distances aligned with order in place of vertex ids? keep both:
  // order carries ids; prefix carries cumulative measure; distances retrieved
  // on demand via distance() (O(1) for lattices, cached BFS otherwise).
  std::scoped_lock lock(cache_mutex_);
  return sorted_dist_cache_.emplace(x, std::make_pair(std::move(order), std::move(prefix)))
      .first->second;
}

double DiscreteSpace::volume(int x, double r) const {
  if (r < 0.0) return 0.0;
  const auto& [order, prefix] = sorted_from(x);
  // binary search for the last vertex with d(x, v) <= r
  int lo = 0, hi = size() - 1, pos = -1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    if (distance(x, order[mid]) <= r) {
      pos = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return pos < 0 ? 0.0 : prefix[pos];
}

std::vector<int> DiscreteSpace::ball(int x, double r) const {
  std::vector<int> out;
  const auto& [order, prefix] = sorted_from(x);
  (void)prefix;
  for (int v : order) {
    if (distance(x, v) > r) break;
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double DiscreteSpace::boundary_margin(int x) const {
  if (lattice_metric_) {
    long m = std::numeric_limits<long>::max();
    for (int i = 0; i < dim_; ++i) {
      long c = coords_[x * dim_ + i];
      m = std::min({m, c + 1, static_cast<long>(side_) - c});
    }
    return static_cast<double>(m);
  }
  if (boundary_.empty() ||
      std::none_of(boundary_.begin(), boundary_.end(), [](uint8_t b) { return b; }))
    return kInf;
  double m = kInf;
  for (int v = 0; v < size(); ++v)
    if (boundary_[v]) m = std::min(m, distance(x, v));
  return m;
}

void DiscreteSpace::finalize() {
  total_measure_ = std::accumulate(measure_.begin(), measure_.end(), 0.0);
  // r0 = 0.99 x minimum pairwise distance; every space here has unit edges
  r0_ = 0.99;
  if (boundary_.empty()) boundary_.assign(size(), 0);
}

DiscreteSpace DiscreteSpace::build_lattice(int dim, int side, BoundaryPolicy policy,
                                           long vertex_budget) {
  if (dim < 1 || side < 3) throw ConfigError("lattice needs dim >= 1, side >= 3");
  double count = std::pow(static_cast<double>(side), dim);
  if (count > static_cast<double>(vertex_budget))
    throw SizeOverflow("lattice exceeds the vertex budget");
  int n = static_cast<int>(count + 0.5);

  DiscreteSpace s;
  s.dim_ = dim;
  s.side_ = side;
  s.lattice_metric_ = true;
  s.policy_ = policy;
  s.measure_.assign(n, 1.0);  // counting measure
  s.coords_.resize(static_cast<size_t>(n) * dim);
  s.adjacency_.resize(n);
  s.boundary_.assign(n, 0);
  for (int v = 0; v < n; ++v) {
    int rest = v;
    bool edge = false;
    for (int i = 0; i < dim; ++i) {
      int c = rest % side;
      rest /= side;
      s.coords_[v * dim + i] = c;
      if (c == 0 || c == side - 1) edge = true;
    }
    s.boundary_[v] = edge ? 1 : 0;
  }
  for (int v = 0; v < n; ++v) {
    int stride = 1;
    for (int i = 0; i < dim; ++i) {
      int c = s.coords_[v * dim + i];
      if (c > 0) s.adjacency_[v].push_back({v - stride, 1.0});
      if (c < side - 1) s.adjacency_[v].push_back({v + stride, 1.0});
      stride *= side;
    }
  }
  s.diameter_hint_ = static_cast<double>(dim) * (side - 1);
  s.finalize();
  return s;
}

DiscreteSpace DiscreteSpace::build_gasket(int level, int level_cap) {
  if (level < 0 || level > level_cap)
    throw SizeOverflow("gasket level exceeds the configured cap");
  // vertices on the triangular lattice: position = i*e1 + j*e2
  std::set<std::pair<int, int>> verts{{0, 0}, {1, 0}, {0, 1}};
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> edges{
      {{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{1, 0}, {0, 1}}};
  for (int l = 1; l <= level; ++l) {
    int off = 1 << (l - 1);
    auto shift = [off](std::pair<int, int> p, int which) {
      if (which == 1) return std::make_pair(p.first + off, p.second);
      if (which == 2) return std::make_pair(p.first, p.second + off);
      return p;
    };
    std::set<std::pair<int, int>> nv = verts;
    auto ne = edges;
    for (int which : {1, 2}) {
      for (const auto& p : verts) nv.insert(shift(p, which));
      for (const auto& e : edges) {
        auto a = shift(e.first, which), b = shift(e.second, which);
        if (b < a) std::swap(a, b);
        ne.insert({a, b});
      }
    }
    verts = std::move(nv);
    edges = std::move(ne);
  }

  DiscreteSpace s;
  std::map<std::pair<int, int>, int> index;
  for (const auto& p : verts) index.emplace(p, static_cast<int>(index.size()));
  int n = static_cast<int>(index.size());
  s.adjacency_.resize(n);
  for (const auto& e : edges) {
    int a = index[e.first], b = index[e.second];
    s.adjacency_[a].push_back({b, 1.0});
    s.adjacency_[b].push_back({a, 1.0});
  }
  s.measure_.resize(n);
  for (int v = 0; v < n; ++v) s.measure_[v] = s.weighted_degree(v);
  s.boundary_.assign(n, 0);
  int c = 1 << level;
  for (auto corner : {std::make_pair(0, 0), std::make_pair(c, 0), std::make_pair(0, c)})
    s.boundary_[index[corner]] = 1;
  s.diameter_hint_ = static_cast<double>(c);
  s.finalize();
  return s;
}

DiscreteSpace DiscreteSpace::load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list: " + path);
  std::map<long, int> ids;
  auto intern = [&ids](long raw) {
    auto [it, inserted] = ids.emplace(raw, static_cast<int>(ids.size()));
    return it->second;
  };
  struct RawEdge {
    int u, v;
    double w;
  };
  std::vector<RawEdge> edges;
  std::map<int, double> given_measure;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank
    if (first[0] == '#') continue;
    if (first == "m") {
      long u;
      double mu;
      if (!(ls >> u >> mu) || mu <= 0.0)
        throw ParseError(line_no, "expected 'm <vertex> <measure>' with measure > 0");
      given_measure[intern(u)] = mu;
      continue;
    }
    long u, v;
    double w = 1.0;
    try {
      u = std::stol(first);
    } catch (const std::exception&) {
      throw ParseError(line_no, "expected a vertex id, got '" + first + "'");
    }
    if (!(ls >> v)) throw ParseError(line_no, "missing second vertex");
    if (ls >> w) {
      if (!(w > 0.0)) throw ParseError(line_no, "edge weight must be positive");
    } else {
      w = 1.0;
    }
    edges.push_back({intern(u), intern(v), w});
  }
  int n = static_cast<int>(ids.size());
  if (n == 0) throw ConfigError("edge list is empty: " + path);

  DiscreteSpace s;
  s.adjacency_.resize(n);
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    s.adjacency_[e.u].push_back({e.v, e.w});
    s.adjacency_[e.v].push_back({e.u, e.w});
  }
  s.measure_.resize(n);
  for (int v = 0; v < n; ++v) {
    auto it = given_measure.find(v);
    s.measure_[v] = it != given_measure.end() ? it->second : s.weighted_degree(v);
    if (!(s.measure_[v] > 0.0))
      throw ConfigError("vertex " + std::to_string(v) + " has zero measure");
  }
  s.finalize();
  // connectivity (reported, not fatal)
  const auto& dist = s.bfs_from(0);
  s.connected_ = std::none_of(dist.begin(), dist.end(),
                              [](double d) { return d == kInf; });
  double diam = 0.0;
  for (double d : dist)
    if (d != kInf) diam = std::max(diam, d);
  s.diameter_hint_ = 2.0 * diam;
  return s;
}

VolumeCertificate volume_certificate(const DiscreteSpace& space, int sample_centers,
                                     double r_min, double r_max) {
  VolumeCertificate cert;
  cert.r_min = r_min;
  cert.r_max = r_max;
  const double r0 = space.r0();

  // interior centers: largest tested ball stays away from the window edge
  std::vector<int> centers;
  for (int v = 0; v < space.size() && static_cast<int>(centers.size()) < 4096; ++v)
    if (space.boundary_margin(v) > r_max) centers.push_back(v);
  if (centers.empty()) throw EmptyDomain("no interior centers for the radius window");
  if (static_cast<int>(centers.size()) > sample_centers) {
    std::vector<int> picked;
    double step = static_cast<double>(centers.size()) / sample_centers;
    for (int i = 0; i < sample_centers; ++i)
      picked.push_back(centers[static_cast<size_t>(i * step)]);
    centers = std::move(picked);
  }

  std::vector<double> radii;
  for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= std::pow(2.0, 0.25))
    radii.push_back(r);
  if (radii.back() < r_max) radii.push_back(r_max);

  // growth exponents: least-squares slope per center blended with extremal
  // slopes over well-separated radius pairs (R >= 8 r) to keep local integer
  // jitter in the constant, not the exponent
  double gamma_lo = std::numeric_limits<double>::infinity();
  double gamma_hi = -std::numeric_limits<double>::infinity();
  for (int x : centers) {
    std::vector<double> lr, lv;
    for (double r : radii) {
      if (r < r0) continue;
      lr.push_back(std::log(r));
      lv.push_back(std::log(space.volume(x, r)));
    }
    if (lr.size() < 2) continue;
    double mr = 0, mv = 0;
    for (size_t i = 0; i < lr.size(); ++i) mr += lr[i], mv += lv[i];
    mr /= lr.size();
    mv /= lv.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < lr.size(); ++i) {
      num += (lr[i] - mr) * (lv[i] - mv);
      den += (lr[i] - mr) * (lr[i] - mr);
    }
    if (den > 0) {
      double fit = num / den;
      gamma_lo = std::min(gamma_lo, fit);
      gamma_hi = std::max(gamma_hi, fit);
    }
    for (size_t i = 0; i < lr.size(); ++i)
      for (size_t j = i + 1; j < lr.size(); ++j) {
        if (lr[j] - lr[i] < std::log(8.0) - 1e-12) continue;
        if (std::exp(lr[i]) < 2.0 * r0) continue;
        double s = (lv[j] - lv[i]) / (lr[j] - lr[i]);
        gamma_lo = std::min(gamma_lo, s);
        gamma_hi = std::max(gamma_hi, s);
      }
  }
  cert.gamma1 = gamma_lo;
  cert.gamma2 = gamma_hi;

  // smallest shared constant over all sampled pairs (upper side admits r < r0,
  // the lower side requires r >= r0)
  double need = 1.0;
  std::vector<double> radii_all = radii;
  radii_all.insert(radii_all.begin(), 0.5 * r0);
  for (int x : centers)
    for (size_t i = 0; i < radii_all.size(); ++i)
      for (size_t j = i + 1; j < radii_all.size(); ++j) {
        double r = radii_all[i], R = radii_all[j];
        double vr = space.volume(x, r), vR = space.volume(x, R);
        if (!(vr > 0.0)) continue;
        double ratio = vR / vr, scale = R / r;
        need = std::max(need, ratio / std::pow(scale, cert.gamma2));
        if (r >= r0) need = std::max(need, std::pow(scale, cert.gamma1) / ratio);
      }
  cert.c_v = need;

  // recheck both inequalities with the final constant
  double wu = -std::numeric_limits<double>::infinity();
  double wl = wu;
  for (int x : centers)
    for (size_t i = 0; i < radii_all.size(); ++i)
      for (size_t j = i + 1; j < radii_all.size(); ++j) {
        double r = radii_all[i], R = radii_all[j];
        double vr = space.volume(x, r), vR = space.volume(x, R);
        if (!(vr > 0.0)) continue;
        wu = std::max(wu, std::log(vR / vr) -
                              std::log(cert.c_v * std::pow(R / r, cert.gamma2)));
        if (r >= r0)
          wl = std::max(wl, std::log(std::pow(R / r, cert.gamma1) / cert.c_v) -
                                std::log(vR / vr));
      }
  cert.worst_upper_violation = wu;
  cert.worst_lower_violation = wl;
  return cert;
}

}  // namespace subkernel
