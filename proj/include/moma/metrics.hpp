#pragma once

// Front bookkeeping and quality indicators: non-dominated filtering,
// generational distance and hypervolume.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "moma/errors.hpp"
#include "moma/genome.hpp"
#include "moma/objectives.hpp"
#include "moma/random.hpp"
#include "moma/weights.hpp"

namespace moma {

struct FrontEntry {
  Genome genome;
  ObjectiveVector objectives;
};

/// Mutually non-dominated set. A point equal in objectives to a stored one,
/// or carrying a genome already stored, is rejected (first seen wins).
class FrontArchive {
 public:
  FrontArchive() = default;

  /// Returns true when the point entered the archive.
  bool insert(const Genome& g, const ObjectiveVector& f) {
    for (const auto& e : entries_) {
      if (e.objectives.size() != f.size()) throw ContractError("FrontArchive: objective count mismatch");
      if (e.objectives == f || dominates(e.objectives, f)) return false;
      if (g.size() && e.genome == g) return false;
    }
    std::erase_if(entries_, [&](const FrontEntry& e) { return dominates(f, e.objectives); });
    entries_.push_back({g, f});
    return true;
  }

  void merge(const FrontArchive& o) {
    for (const auto& e : o.entries_) insert(e.genome, e.objectives);
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<FrontEntry>& entries() const { return entries_; }

  ObjectiveMatrix objectives() const {
    ObjectiveMatrix f;
    f.reserve(entries_.size());
    for (const auto& e : entries_) f.push_back(e.objectives);
    return f;
  }

  /// Componentwise min / max over the stored points.
  std::pair<ObjectiveVector, ObjectiveVector> bounds() const {
    if (entries_.empty()) throw ContractError("FrontArchive: empty archive has no bounds");
    return utopian_nadir(objectives());
  }

  /// Entries in lexicographic objective order (stable output for files).
  void sort() {
    std::sort(entries_.begin(), entries_.end(), [](const FrontEntry& a, const FrontEntry& b) {
      return a.objectives != b.objectives ? a.objectives < b.objectives : a.genome < b.genome;
    });
  }

 private:
  std::vector<FrontEntry> entries_;
};

/// Indices of the points not dominated by any other point (duplicates of a
/// non-dominated point are all kept), ascending.
inline std::vector<std::size_t> nondominated_indices(const ObjectiveMatrix& points) {
  if (points.empty()) throw ContractError("nondominated_filter: empty input");
  const std::size_t m = points.front().size();
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  // A dominator sorts lexicographically before what it dominates, so scanning
  // kept points in that order suffices.
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    if (points[i].size() != m) throw ContractError("nondominated_filter: ragged input");
    bool dominated = false;
    for (std::size_t j : kept)
      if (dominates(points[j], points[i])) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(i);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

inline ObjectiveMatrix nondominated_filter(const ObjectiveMatrix& points) {
  ObjectiveMatrix out;
  for (std::size_t i : nondominated_indices(points)) out.push_back(points[i]);
  return out;
}

inline FrontArchive make_archive(const ObjectiveMatrix& points) {
  FrontArchive a;
  for (const auto& p : points) a.insert(Genome(), p);
  return a;
}

enum class GdFormula {
  standard,  ///< d_i Euclidean
  literal,   ///< differences summed without squaring, as typeset
};

struct GdOptions {
  GdFormula formula = GdFormula::standard;
  /// Normalize both sets to the joint (z_L, z_U) when the largest objective
  /// range exceeds the smallest by this factor; 0 disables.
  double auto_normalize_ratio = 1e3;
  bool force_normalize = false;
};

/// True when objective ranges of the union differ by more than `ratio`.
inline bool ranges_disparate(const ObjectiveMatrix& a, const ObjectiveMatrix& b, double ratio) {
  ObjectiveMatrix all = a;
  all.insert(all.end(), b.begin(), b.end());
  const auto [lo, hi] = utopian_nadir(all);
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (std::size_t m = 0; m < lo.size(); ++m) {
    const double r = hi[m] - lo[m];
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmax == 0.0) return false;
  return rmin == 0.0 || rmax / rmin > ratio;
}

/// GD = (1/|G|) sqrt(sum_i d_i^2), d_i the distance from G_i to its nearest
/// reference point.
inline double generational_distance(const ObjectiveMatrix& found, const ObjectiveMatrix& truth, const GdOptions& opt = {}) {
  if (found.empty() || truth.empty()) throw ContractError("generational_distance: empty set");
  ObjectiveMatrix g = found, t = truth;
  if (opt.force_normalize || (opt.auto_normalize_ratio > 0.0 && ranges_disparate(found, truth, opt.auto_normalize_ratio))) {
    ObjectiveMatrix all = found;
    all.insert(all.end(), truth.begin(), truth.end());
    const auto [lo, hi] = utopian_nadir(all);
    g = normalize(found, lo, hi);
    t = normalize(truth, lo, hi);
  }
  double sum = 0.0;
  for (const auto& p : g) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : t) {
      if (q.size() != p.size()) throw ContractError("generational_distance: dimension mismatch");
      double d = 0.0;
      for (std::size_t m = 0; m < p.size(); ++m) d += opt.formula == GdFormula::standard ? (p[m] - q[m]) * (p[m] - q[m]) : (p[m] - q[m]);
      if (opt.formula == GdFormula::literal) d = std::sqrt(std::abs(d));
      else d = std::sqrt(d);
      best = std::min(best, d);
    }
    sum += best * best;
  }
  return std::sqrt(sum) / static_cast<double>(g.size());
}

struct HypervolumeResult {
  double value = 0.0;
  double std_error = 0.0;  ///< 0 for the exact paths
  std::size_t excluded = 0;  ///< points not strictly below the reference in every objective
};

/// Exact area dominated by 2-D points and bounded by `ref`.
inline double hypervolume_2d(ObjectiveMatrix pts, const ObjectiveVector& ref) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0, best_y = ref[1];
  for (const auto& p : pts) {
    if (p[1] < best_y) {
      area += (ref[0] - p[0]) * (best_y - p[1]);
      best_y = p[1];
    }
  }
  return area;
}

/// Exact 3-D volume by slicing along the third objective.
inline double hypervolume_3d(ObjectiveMatrix pts, const ObjectiveVector& ref) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  const ObjectiveVector ref2{ref[0], ref[1]};
  double vol = 0.0;
  ObjectiveMatrix slice;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    slice.push_back({pts[i][0], pts[i][1]});
    const double next = i + 1 < pts.size() ? pts[i + 1][2] : ref[2];
    if (next > pts[i][2]) vol += hypervolume_2d(slice, ref2) * (next - pts[i][2]);
  }
  return vol;
}

/// Monte-Carlo estimate over the box [z_L, ref].
inline HypervolumeResult hypervolume_monte_carlo(const ObjectiveMatrix& pts, const ObjectiveVector& ref, std::size_t samples,
                                                 std::uint64_t seed) {
  HypervolumeResult r;
  if (pts.empty()) return r;
  const std::size_t m = ref.size();
  ObjectiveVector lo = ref;
  for (const auto& p : pts)
    for (std::size_t k = 0; k < m; ++k) lo[k] = std::min(lo[k], p[k]);
  double box = 1.0;
  for (std::size_t k = 0; k < m; ++k) box *= ref[k] - lo[k];
  Rng rng(seed);
  std::size_t hits = 0;
  ObjectiveVector x(m);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < m; ++k) x[k] = rng.uniform(lo[k], ref[k]);
    for (const auto& p : pts) {
      bool dom = true;
      for (std::size_t k = 0; k < m && dom; ++k) dom = p[k] <= x[k];
      if (dom) {
        ++hits;
        break;
      }
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  r.value = box * frac;
  r.std_error = box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  return r;
}

struct HypervolumeOptions {
  std::size_t mc_samples = 1'000'000;
  std::uint64_t mc_seed = 0x5eed;
  bool warn = true;
  bool force_monte_carlo = false;
};

/// Volume dominated by `front` and bounded by `ref`; exact for M = 2, 3.
/// Points not strictly better than `ref` in every objective are dropped.
inline HypervolumeResult hypervolume(const ObjectiveMatrix& front, const ObjectiveVector& ref, const HypervolumeOptions& opt = {}) {
  HypervolumeResult r;
  ObjectiveMatrix pts;
  for (const auto& p : front) {
    if (p.size() != ref.size()) throw ContractError("hypervolume: dimension mismatch");
    bool inside = true;
    for (std::size_t k = 0; k < p.size(); ++k) inside = inside && p[k] < ref[k];
    if (inside) pts.push_back(p);
    else ++r.excluded;
  }
  if (r.excluded && opt.warn) std::cerr << "warning: hypervolume excluded " << r.excluded << " point(s) beyond the reference\n";
  if (pts.empty()) return r;
  const std::size_t m = ref.size();
  if (m == 2 && !opt.force_monte_carlo) r.value = hypervolume_2d(std::move(pts), ref);
  else if (m == 3 && !opt.force_monte_carlo) r.value = hypervolume_3d(std::move(pts), ref);
  else {
    const auto excluded = r.excluded;
    r = hypervolume_monte_carlo(pts, ref, opt.mc_samples, opt.mc_seed);
    r.excluded = excluded;
  }
  return r;
}

// ---------------------------------------------------------------- CSV

/// Header f1..fM,genome; one row per entry, doubles at round-trip precision.
inline void write_front_csv(std::ostream& os, const FrontArchive& a, std::size_t m) {
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < m; ++k) os << 'f' << k + 1 << ',';
  os << "genome\n";
  for (const auto& e : a.entries()) {
    for (double v : e.objectives) os << v << ',';
    os << e.genome.to_string() << '\n';
  }
  os.precision(old);
}

inline void write_front_csv(const std::string& path, const FrontArchive& a, std::size_t m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  write_front_csv(os, a, m);
  if (!os) throw IoError("write failed: " + path);
}

/// Reads a front CSV (the genome column is optional). Every row is kept.
inline std::vector<FrontEntry> read_front_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("front CSV: missing header");
  std::size_t m = 0;
  bool has_genome = false;
  {
    std::stringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (!col.empty() && col.back() == '\r') col.pop_back();
      if (col == "genome") has_genome = true;
      else if (!col.empty() && col[0] == 'f') ++m;
      else throw IoError("front CSV: unexpected column '" + col + "'");
    }
  }
  if (m == 0) throw IoError("front CSV: no objective columns");
  std::vector<FrontEntry> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    FrontEntry e;
    for (std::size_t k = 0; k < m; ++k) {
      if (!std::getline(ls, cell, ',')) throw IoError("front CSV row " + std::to_string(row) + ": too few columns");
      try {
        std::size_t used = 0;
        e.objectives.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError("front CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    if (has_genome && std::getline(ls, cell, ',') && !cell.empty()) e.genome = Genome::from_string(cell);
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<FrontEntry> read_front_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  return read_front_csv(in);
}

inline ObjectiveMatrix objectives_of(const std::vector<FrontEntry>& entries) {
  ObjectiveMatrix f;
  for (const auto& e : entries) f.push_back(e.objectives);
  return f;
}

}  // namespace moma
