#pragma once

// Binary shape representation and the max-distance size machinery used for
// circumscribing radii and axis extents of active element sets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "moma/errors.hpp"

namespace moma {

/// Fixed-length 0/1 vector with an immutable mask of locked-active bits
/// (feeders and similar). Bits under the mask are always 1.
class Genome {
 public:
  Genome() = default;

  explicit Genome(std::size_t n) : bits_(n, 0), fixed_(n, 0) {}

  Genome(std::vector<std::uint8_t> bits, std::vector<std::uint8_t> fixed_mask)
      : bits_(std::move(bits)), fixed_(std::move(fixed_mask)) {
    if (fixed_.empty()) fixed_.assign(bits_.size(), 0);
    if (fixed_.size() != bits_.size())
      throw ContractError("genome: bits and fixed mask differ in length");
    for (auto& b : bits_) b = b ? 1 : 0;
    for (auto& f : fixed_) f = f ? 1 : 0;
    enforce_mask();
  }

  /// All-zero genome (apart from the fixed bits) honoring `fixed_mask`.
  static Genome empty_like(std::span<const std::uint8_t> fixed_mask) {
    return Genome(std::vector<std::uint8_t>(fixed_mask.size(), 0), std::vector<std::uint8_t>(fixed_mask.begin(), fixed_mask.end()));
  }

  /// Parses a 0/1 string. Characters other than '0'/'1' are rejected.
  static Genome from_string(std::string_view s, std::span<const std::uint8_t> fixed_mask = {}) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw IoError("genome string contains '" + std::string(1, c) + "'");
      bits.push_back(c == '1');
    }
    return Genome(std::move(bits), std::vector<std::uint8_t>(fixed_mask.begin(), fixed_mask.end()));
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool is_fixed(std::size_t i) const { return fixed_[i] != 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<const std::uint8_t> fixed_mask() const { return fixed_; }

  void set(std::size_t i, bool v) {
    if (!v && fixed_[i]) throw ContractError("genome: cannot clear fixed bit " + std::to_string(i));
    bits_[i] = v;
  }

  void flip(std::size_t i) { set(i, !(*this)[i]); }

  /// Re-asserts every masked bit as active.
  void enforce_mask() {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (fixed_[i]) bits_[i] = 1;
  }

  std::size_t active_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  std::size_t free_count() const {
    return bits_.size() - static_cast<std::size_t>(std::count(fixed_.begin(), fixed_.end(), std::uint8_t{1}));
  }

  std::vector<std::size_t> active_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) s[i] = '1';
    return s;
  }

  std::size_t hamming(const Genome& o) const {
    std::size_t d = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != o.bits_[i];
    return d;
  }

  friend bool operator==(const Genome& a, const Genome& b) {
    return a.bits_ == b.bits_ && a.fixed_ == b.fixed_;
  }
  friend bool operator<(const Genome& a, const Genome& b) { return a.bits_ < b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint8_t> fixed_;
};

using Point3 = std::array<double, 3>;

enum class Axis : int { x = 0, y = 1, z = 2 };

/// Vertex sets of every element (degree of freedom). A point support is an
/// element with a single vertex.
class ElementGeometry {
 public:
  ElementGeometry() = default;

  explicit ElementGeometry(std::vector<std::vector<Point3>> elements) : elements_(std::move(elements)) {
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      if (elements_[e].empty()) throw GeometryError("element " + std::to_string(e) + " has no vertex");
      for (const auto& v : elements_[e])
        for (double c : v)
          if (!std::isfinite(c)) throw GeometryError("element " + std::to_string(e) + " has a non-finite coordinate");
    }
  }

  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  const std::vector<Point3>& vertices(std::size_t e) const { return elements_[e]; }
  const std::vector<std::vector<Point3>>& elements() const { return elements_; }

  /// Rectangular grid of nx*ny square pixels, element index = row*nx + col.
  static ElementGeometry pixel_grid(std::size_t nx, std::size_t ny, double width, double height) {
    const double hx = width / static_cast<double>(nx);
    const double hy = height / static_cast<double>(ny);
    std::vector<std::vector<Point3>> els;
    els.reserve(nx * ny);
    for (std::size_t r = 0; r < ny; ++r)
      for (std::size_t c = 0; c < nx; ++c) {
        const double x0 = hx * static_cast<double>(c), y0 = hy * static_cast<double>(r);
        els.push_back({{x0, y0, 0.0}, {x0 + hx, y0, 0.0}, {x0 + hx, y0 + hy, 0.0}, {x0, y0 + hy, 0.0}});
      }
    return ElementGeometry(std::move(els));
  }

 private:
  std::vector<std::vector<Point3>> elements_;
};

/// Reads element vertices from CSV rows `element,x,y,z` (an optional header
/// line is skipped; rows of one element need not be contiguous but element ids
/// must cover 0..n-1).
inline ElementGeometry load_geometry_csv(std::istream& in) {
  std::vector<std::vector<Point3>> els;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long long id;
    Point3 p{0.0, 0.0, 0.0};
    if (!(ss >> id)) {
      if (lineno == 1) continue;  // header
      throw IoError("geometry csv line " + std::to_string(lineno) + ": expected element id");
    }
    if (!(ss >> p[0] >> p[1])) throw IoError("geometry csv line " + std::to_string(lineno) + ": expected coordinates");
    ss >> p[2];
    if (id < 0) throw IoError("geometry csv line " + std::to_string(lineno) + ": negative element id");
    if (static_cast<std::size_t>(id) >= els.size()) els.resize(static_cast<std::size_t>(id) + 1);
    els[static_cast<std::size_t>(id)].push_back(p);
  }
  return ElementGeometry(std::move(els));
}

/// JSON form: {"elements": [[[x,y,z], ...], ...]}; 2-component vertices get z = 0.
inline ElementGeometry load_geometry_json(const nlohmann::json& j) {
  std::vector<std::vector<Point3>> els;
  for (const auto& e : j.at("elements")) {
    std::vector<Point3> vs;
    for (const auto& v : e) {
      Point3 p{0.0, 0.0, 0.0};
      if (v.size() < 2 || v.size() > 3) throw IoError("geometry json: vertex needs 2 or 3 coordinates");
      for (std::size_t k = 0; k < v.size(); ++k) p[k] = v[k].get<double>();
      vs.push_back(p);
    }
    els.push_back(std::move(vs));
  }
  return ElementGeometry(std::move(els));
}

inline ElementGeometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open geometry file " + path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return load_geometry_json(nlohmann::json::parse(in));
  return load_geometry_csv(in);
}

/// Square symmetric matrix of maximal inter-element distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t order() const { return n_; }
  double operator()(std::size_t p, std::size_t q) const { return d_[p * n_ + q]; }
  double& operator()(std::size_t p, std::size_t q) { return d_[p * n_ + q]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

namespace detail {

inline double dist(const Point3& a, const Point3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

template <class Metric>
DistanceMatrix max_vertex_distance(const ElementGeometry& geom, Metric metric) {
  if (geom.empty()) throw GeometryError("distance matrix of an empty geometry");
  const std::size_t n = geom.size();
  DistanceMatrix d(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      double m = 0.0;
      for (const auto& a : geom.vertices(p))
        for (const auto& b : geom.vertices(q)) m = std::max(m, metric(a, b));
      d(p, q) = m;
      d(q, p) = m;
    }
  return d;
}

}  // namespace detail

/// D_pq = largest vertex-to-vertex distance between elements p and q; the
/// diagonal holds each element's own diameter.
inline DistanceMatrix build_distance_matrix(const ElementGeometry& geom) {
  return detail::max_vertex_distance(geom, detail::dist);
}

/// Component-wise variant: distances measured along a single axis only.
inline DistanceMatrix build_axis_distance_matrix(const ElementGeometry& geom, Axis axis) {
  const auto k = static_cast<std::size_t>(axis);
  return detail::max_vertex_distance(geom, [k](const Point3& a, const Point3& b) { return std::abs(a[k] - b[k]); });
}

/// Half the largest entry of D restricted to active rows and columns.
inline double circumscribing_radius(const Genome& g, const DistanceMatrix& d) {
  if (g.size() != d.order()) throw ContractError("circumscribing_radius: genome/matrix size mismatch");
  const auto act = g.active_indices();
  if (act.empty()) throw EmptyShapeError("circumscribing_radius: genome has no active bit");
  double m = 0.0;
  for (std::size_t i = 0; i < act.size(); ++i)
    for (std::size_t j = i; j < act.size(); ++j) m = std::max(m, d(act[i], act[j]));
  return 0.5 * m;
}

/// Span (max - min) of one coordinate over the vertices of active elements.
inline double axis_extent(const Genome& g, const ElementGeometry& geom, Axis axis) {
  if (g.size() != geom.size()) throw ContractError("axis_extent: genome/geometry size mismatch");
  const auto k = static_cast<std::size_t>(axis);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  bool any = false;
  for (std::size_t e = 0; e < g.size(); ++e) {
    if (!g[e]) continue;
    any = true;
    for (const auto& v : geom.vertices(e)) {
      lo = std::min(lo, v[k]);
      hi = std::max(hi, v[k]);
    }
  }
  if (!any) throw EmptyShapeError("axis_extent: genome has no active bit");
  return hi - lo;
}

/// Circumscribing radius under single-bit flips. Keeps, for every element,
/// the two largest distances to active elements so that both addition and
/// removal probes cost O(active) and agree exactly with a from-scratch scan.
class RadiusTracker {
 public:
  RadiusTracker(const DistanceMatrix& d, const Genome& g) : d_(&d), active_(g.bits().begin(), g.bits().end()) {
    if (g.size() != d.order()) throw ContractError("RadiusTracker: genome/matrix size mismatch");
    rebuild();
  }

  std::size_t active_count() const { return count_; }

  double radius() const {
    if (count_ == 0) throw EmptyShapeError("RadiusTracker: no active element");
    return 0.5 * diameter_;
  }

  /// Radius after flipping element k, without changing state.
  double probe(std::size_t k) const {
    const auto& d = *d_;
    if (!active_[k]) {
      double m = std::max(count_ ? diameter_ : 0.0, d(k, k));
      if (count_) m = std::max(m, top_[k].v1);
      return 0.5 * m;
    }
    if (count_ == 1) throw EmptyShapeError("RadiusTracker: removal leaves no active element");
    double m = 0.0;
    for (std::size_t q = 0; q < active_.size(); ++q) {
      if (!active_[q] || q == k) continue;
      m = std::max(m, top_[q].a1 == k ? top_[q].v2 : top_[q].v1);
    }
    return 0.5 * m;
  }

  void apply(std::size_t k) {
    const auto& d = *d_;
    const std::size_t n = active_.size();
    if (!active_[k]) {
      active_[k] = 1;
      ++count_;
      for (std::size_t q = 0; q < n; ++q) top_[q].offer(d(q, k), k);
    } else {
      active_[k] = 0;
      --count_;
      for (std::size_t q = 0; q < n; ++q)
        if (top_[q].a1 == k || top_[q].a2 == k) rebuild_row(q);
    }
    refresh_diameter();
  }

 private:
  struct Top2 {
    double v1 = -1.0, v2 = -1.0;
    std::size_t a1 = npos, a2 = npos;
    void offer(double v, std::size_t a) {
      if (v > v1) {
        v2 = v1;
        a2 = a1;
        v1 = v;
        a1 = a;
      } else if (v > v2) {
        v2 = v;
        a2 = a;
      }
    }
  };
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  void rebuild_row(std::size_t q) {
    Top2 t;
    for (std::size_t p = 0; p < active_.size(); ++p)
      if (active_[p]) t.offer((*d_)(q, p), p);
    top_[q] = t;
  }

  void rebuild() {
    top_.assign(active_.size(), Top2{});
    count_ = 0;
    for (auto a : active_) count_ += a;
    for (std::size_t q = 0; q < active_.size(); ++q) rebuild_row(q);
    refresh_diameter();
  }

  void refresh_diameter() {
    diameter_ = 0.0;
    for (std::size_t q = 0; q < active_.size(); ++q)
      if (active_[q]) diameter_ = std::max(diameter_, top_[q].v1);
  }

  const DistanceMatrix* d_;
  std::vector<std::uint8_t> active_;
  std::vector<Top2> top_;
  std::size_t count_ = 0;
  double diameter_ = 0.0;
};

}  // namespace moma
