#pragma once

// Adaptive objective weights: simplex lattices, angular geometry, the
// neighborhood-based weight update and the greedy weight-to-solution matching.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "moma/errors.hpp"
#include "moma/objectives.hpp"
#include "moma/random.hpp"

namespace moma {

inline constexpr double kSimplexTolerance = 1e-12;

/// Convex combination coefficients: nonnegative and summing to one.
class WeightVector {
 public:
  WeightVector() = default;

  explicit WeightVector(std::vector<double> w) : w_(std::move(w)) {
    if (w_.empty()) throw ContractError("weight vector is empty");
    double sum = 0.0;
    for (double v : w_) {
      if (!(v >= 0.0)) throw ContractError("weight vector has a negative or NaN component");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) throw ContractError("weight vector does not sum to one");
  }

  /// Clamps negatives to zero and rescales onto the simplex.
  static WeightVector normalized(std::vector<double> w) {
    double sum = 0.0;
    for (auto& v : w) {
      if (!(v > 0.0)) v = 0.0;
      sum += v;
    }
    if (sum <= 0.0) throw ContractError("weight vector has no positive component");
    for (auto& v : w) v /= sum;
    // A final pass keeps the rounding error of the sum at a few ulps.
    double s2 = std::accumulate(w.begin(), w.end(), 0.0);
    auto big = std::max_element(w.begin(), w.end());
    *big += 1.0 - s2;
    if (*big < 0.0) *big = 0.0;
    return WeightVector(std::move(w));
  }

  static WeightVector unit(std::size_t m, std::size_t k) {
    std::vector<double> w(m, 0.0);
    w[k] = 1.0;
    return WeightVector(std::move(w));
  }

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }
  auto begin() const { return w_.begin(); }
  auto end() const { return w_.end(); }

  friend bool operator==(const WeightVector& a, const WeightVector& b) { return a.w_ == b.w_; }

 private:
  std::vector<double> w_;
};

/// Columns w_1..w_N of the weight matrix.
using WeightSet = std::vector<WeightVector>;

/// Objective vectors mapped by (f - z_L) / (z_U - z_L + 1).
using NormalizedObjectives = std::vector<std::vector<double>>;

/// How objective vectors are oriented before angles to weights are measured.
/// `utopian` keeps the utopian point at the origin; `negated` multiplies the
/// objectives by -1 first, which places the nadir point at the origin.
enum class WeightOrientation { utopian, negated };

inline NormalizedObjectives normalize(const ObjectiveMatrix& f, const ObjectiveVector& z_lo, const ObjectiveVector& z_hi) {
  NormalizedObjectives out;
  out.reserve(f.size());
  for (const auto& row : f) {
    if (row.size() != z_lo.size() || row.size() != z_hi.size())
      throw ContractError("normalize: objective/reference dimension mismatch");
    std::vector<double> r(row.size());
    for (std::size_t m = 0; m < row.size(); ++m) r[m] = (row[m] - z_lo[m]) / (z_hi[m] - z_lo[m] + 1.0);
    out.push_back(std::move(r));
  }
  return out;
}

/// Normalizes with the utopian/nadir points of `f` itself, after applying the
/// chosen orientation.
inline NormalizedObjectives normalize_oriented(const ObjectiveMatrix& f, WeightOrientation orientation) {
  if (orientation == WeightOrientation::utopian) {
    auto [lo, hi] = utopian_nadir(f);
    return normalize(f, lo, hi);
  }
  ObjectiveMatrix neg = f;
  for (auto& row : neg)
    for (auto& v : row) v = -v;
  auto [lo, hi] = utopian_nadir(neg);
  return normalize(neg, lo, hi);
}

/// Angle between an objective vector and a direction. A zero vector (a
/// solution sitting at the reference point) is at angle 0 from everything.
inline double angular_distance(std::span<const double> f, std::span<const double> w) {
  if (f.size() != w.size()) throw ContractError("angular_distance: dimension mismatch");
  double nf = 0.0, nw = 0.0;
  for (std::size_t m = 0; m < f.size(); ++m) {
    nf += f[m] * f[m];
    nw += w[m] * w[m];
  }
  if (nf == 0.0 || nw == 0.0) return 0.0;
  nf = std::sqrt(nf);
  nw = std::sqrt(nw);
  // 2 atan2(|a - b|, |a + b|) on unit vectors keeps small angles accurate.
  double diff = 0.0, sum = 0.0;
  for (std::size_t m = 0; m < f.size(); ++m) {
    const double a = f[m] / nf, b = w[m] / nw;
    diff += (a - b) * (a - b);
    sum += (a + b) * (a + b);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

inline double angular_distance(std::span<const double> f, const WeightVector& w) {
  return angular_distance(f, std::span<const double>(w.values()));
}

inline double angular_distance(const WeightVector& a, const WeightVector& b) {
  return angular_distance(std::span<const double>(a.values()), std::span<const double>(b.values()));
}

/// Half-angle of the cone in which new weights are proposed around a parent.
inline double aperture_angle(std::size_t m) {
  if (m < 2) throw ConfigError("aperture_angle: need at least 2 objectives");
  const double md = static_cast<double>(m);
  return std::acos(1.0 / std::sqrt(md)) * (0.0353 * md - 0.0322);
}

namespace detail {

inline void lattice_rec(std::size_t m, std::size_t left, std::vector<std::size_t>& cur,
                        std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() + 1 == m) {
    cur.push_back(left);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = 0; k <= left; ++k) {
    cur.push_back(k);
    lattice_rec(m, left - k, cur, out);
    cur.pop_back();
  }
}

inline double binom(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace detail

/// All points of the simplex lattice with resolution `h` (components k/h),
/// ordered lexicographically with the first component ascending.
inline WeightSet das_dennis(std::size_t m, std::size_t h) {
  std::vector<std::vector<std::size_t>> pts;
  std::vector<std::size_t> cur;
  detail::lattice_rec(m, h, cur, pts);
  WeightSet out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = static_cast<double>(p[i]) / static_cast<double>(h);
    out.push_back(WeightVector::normalized(std::move(w)));
  }
  return out;
}

/// N distinct weights covering the simplex: the coarsest lattice with at least
/// N points, thinned by greedy farthest-point selection (seeded with the unit
/// vectors) when it has more. Output keeps lattice order.
inline WeightSet simplex_lattice(std::size_t m, std::size_t n) {
  if (m < 2) throw ConfigError("simplex_lattice: need M >= 2");
  if (n < m) throw ConfigError("simplex_lattice: need N >= M (got N=" + std::to_string(n) + ", M=" + std::to_string(m) + ")");
  std::size_t h = 1;
  while (detail::binom(h + m - 1, m - 1) < static_cast<double>(n)) ++h;
  WeightSet lattice = das_dennis(m, h);
  if (lattice.size() == n) return lattice;

  std::vector<std::uint8_t> chosen(lattice.size(), 0);
  std::vector<double> mind(lattice.size(), std::numeric_limits<double>::infinity());
  auto take = [&](std::size_t idx) {
    chosen[idx] = 1;
    for (std::size_t i = 0; i < lattice.size(); ++i)
      if (!chosen[i]) mind[i] = std::min(mind[i], angular_distance(lattice[i], lattice[idx]));
  };
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (*std::max_element(lattice[i].begin(), lattice[i].end()) == 1.0) take(i);
  for (std::size_t have = m; have < n; ++have) {
    std::size_t best = lattice.size();
    for (std::size_t i = 0; i < lattice.size(); ++i)
      if (!chosen[i] && (best == lattice.size() || mind[i] > mind[best])) best = i;
    take(best);
  }
  WeightSet out;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (chosen[i]) out.push_back(lattice[i]);
  return out;
}

/// Local neighborhoods L_j of the weights plus the spill set S.
struct Neighborhoods {
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> spill;

  std::size_t size(std::size_t j) const { return members[j].size(); }
  std::size_t empty_count() const {
    return static_cast<std::size_t>(std::count_if(members.begin(), members.end(), [](const auto& l) { return l.empty(); }));
  }
  std::size_t total() const {
    std::size_t t = spill.size();
    for (const auto& l : members) t += l.size();
    return t;
  }
};

/// Puts every solution (in index order) into the neighborhood of its
/// angularly closest weight while that neighborhood holds fewer than
/// `capacity` members; otherwise into the spill set.
inline Neighborhoods build_neighborhoods(const WeightSet& w, const NormalizedObjectives& f, std::size_t capacity) {
  if (w.empty()) throw ContractError("build_neighborhoods: no weights");
  if (capacity < 1) throw ConfigError("build_neighborhoods: capacity must be >= 1");
  Neighborhoods nb;
  nb.members.resize(w.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::size_t best = 0;
    double best_nu = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double nu = angular_distance(std::span<const double>(f[i]), w[j]);
      if (nu < best_nu) {
        best_nu = nu;
        best = j;
      }
    }
    if (nb.members[best].size() < capacity)
      nb.members[best].push_back(i);
    else
      nb.spill.push_back(i);
  }
  return nb;
}

/// Empties the spill set: first revives empty neighborhoods while their
/// fraction exceeds `delta_c`, then sends each remaining member to a random
/// smallest non-empty neighborhood with probability `delta_r`, otherwise to a
/// random non-empty one.
inline Neighborhoods redistribute_spill(Neighborhoods nb, double delta_r, double delta_c, Rng& rng) {
  if (!(delta_r >= 0.0 && delta_r <= 1.0)) throw ConfigError("delta_r must lie in [0,1]");
  if (!(delta_c >= 0.0 && delta_c <= 1.0)) throw ConfigError("delta_c must lie in [0,1]");
  if (nb.spill.empty() || nb.members.empty()) return nb;
  const double total = static_cast<double>(nb.members.size());

  while (!nb.spill.empty() && static_cast<double>(nb.empty_count()) / total > delta_c) {
    const std::size_t s = rng.index(nb.spill.size());
    std::vector<std::size_t> empty;
    for (std::size_t j = 0; j < nb.members.size(); ++j)
      if (nb.members[j].empty()) empty.push_back(j);
    nb.members[empty[rng.index(empty.size())]].push_back(nb.spill[s]);
    nb.spill.erase(nb.spill.begin() + static_cast<std::ptrdiff_t>(s));
  }

  for (std::size_t sol : nb.spill) {
    std::vector<std::size_t> nonempty;
    std::size_t min_size = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < nb.members.size(); ++j)
      if (!nb.members[j].empty()) {
        nonempty.push_back(j);
        min_size = std::min(min_size, nb.members[j].size());
      }
    if (nonempty.empty()) {
      // Only reachable with no neighborhood populated at all.
      nb.members[rng.index(nb.members.size())].push_back(sol);
      continue;
    }
    if (rng.uniform() < delta_r) {
      std::vector<std::size_t> smallest;
      for (std::size_t j : nonempty)
        if (nb.members[j].size() == min_size) smallest.push_back(j);
      nb.members[smallest[rng.index(smallest.size())]].push_back(sol);
    } else {
      nb.members[nonempty[rng.index(nonempty.size())]].push_back(sol);
    }
  }
  nb.spill.clear();
  return nb;
}

/// Weight-vector generator: `count` simplex vectors within angle `xi` of
/// `parent`. Each draw picks a Dirichlet(1) direction d and a point on the
/// segment parent->d, truncated where the segment leaves the cone.
inline std::vector<WeightVector> generate_wvg(const WeightVector& parent, std::size_t count, double xi, Rng& rng) {
  if (!(xi > 0.0)) throw ConfigError("generate_wvg: aperture must be positive");
  const std::size_t m = parent.size();
  std::vector<WeightVector> out;
  out.reserve(count);
  auto at = [&](const std::vector<double>& d, double t) {
    std::vector<double> p(m);
    for (std::size_t k = 0; k < m; ++k) p[k] = (1.0 - t) * parent[k] + t * d[k];
    return p;
  };
  while (out.size() < count) {
    const auto d = rng.dirichlet(m);
    double t_max = 1.0;
    if (angular_distance(std::span<const double>(d), parent) > xi) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto p = at(d, mid);
        if (angular_distance(std::span<const double>(p), parent) <= xi)
          lo = mid;
        else
          hi = mid;
      }
      t_max = lo;
    }
    auto w = WeightVector::normalized(at(d, t_max * rng.uniform()));
    // Renormalization can nudge the angle by an ulp; keep the cone contract strict.
    if (angular_distance(w, parent) <= xi) out.push_back(std::move(w));
  }
  return out;
}

/// Refills `current` up to `target` columns by repeatedly moving the candidate
/// with the largest summed angle to the columns already in `current`.
inline WeightSet select_final_weights(WeightSet candidates, WeightSet current, std::size_t target) {
  if (current.size() + candidates.size() < target)
    throw ConfigError("select_final_weights: " + std::to_string(current.size() + candidates.size()) +
                      " weights available, " + std::to_string(target) + " required");
  while (current.size() < target) {
    std::size_t best = 0;
    double best_sum = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double s = 0.0;
      for (const auto& w : current) s += angular_distance(candidates[c], w);
      if (s > best_sum) {
        best_sum = s;
        best = c;
      }
    }
    current.push_back(std::move(candidates[best]));
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return current;
}

/// Greedy bijection: repeatedly take the smallest remaining entry of the
/// solution-by-weight angle matrix (row-major first on ties) and strike its
/// row and column. Returns, for every solution, the index of its weight.
inline std::vector<std::size_t> assign_weights_to_solutions(const ObjectiveMatrix& f, const WeightSet& w,
                                                            WeightOrientation orientation = WeightOrientation::utopian) {
  const std::size_t n = f.size();
  if (w.size() != n) throw ContractError("assign_weights_to_solutions: need as many weights as solutions");
  if (n == 0) return {};
  const auto fh = normalize_oriented(f, orientation);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = angular_distance(std::span<const double>(fh[i]), w[j]);
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t bi = 0, bj = 0;
    double best = inf;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (a[i * n + j] < best || (!found && a[i * n + j] == best)) {
          best = a[i * n + j];
          bi = i;
          bj = j;
          found = true;
        }
    perm[bi] = bj;
    for (std::size_t t = 0; t < n; ++t) {
      a[bi * n + t] = inf;
      a[t * n + bj] = inf;
    }
  }
  return perm;
}

struct WeightUpdateParams {
  std::size_t capacity = 3;   ///< max neighborhood size before spilling
  std::size_t wvg_count = 3;  ///< proposals per removed weight
  double delta_r = 0.5;
  double delta_c = 0.1;
  WeightOrientation orientation = WeightOrientation::utopian;

  friend bool operator==(const WeightUpdateParams&, const WeightUpdateParams&) = default;
};

struct WeightUpdate {
  WeightSet weights;
  std::size_t removed = 0;
};

/// One adaptive update: weights whose neighborhood stays empty after spill
/// redistribution are replaced by the most spread-out of the proposals
/// generated around them.
inline WeightUpdate update_weights(const WeightSet& w, const ObjectiveMatrix& f, const WeightUpdateParams& p, Rng& rng) {
  if (w.empty()) throw ContractError("update_weights: no weights");
  const auto fh = normalize_oriented(f, p.orientation);
  auto nb = redistribute_spill(build_neighborhoods(w, fh, p.capacity), p.delta_r, p.delta_c, rng);
  const double xi = aperture_angle(w.front().size());
  WeightSet kept, proposals;
  std::size_t removed = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (nb.members[j].empty()) {
      ++removed;
      for (auto& v : generate_wvg(w[j], p.wvg_count, xi, rng)) proposals.push_back(std::move(v));
    } else {
      kept.push_back(w[j]);
    }
  }
  return {select_final_weights(std::move(proposals), std::move(kept), w.size()), removed};
}

/// One CSV row per vector: w1,...,wM.
inline void write_weights_csv(std::ostream& os, const WeightSet& w, bool header = true) {
  if (w.empty()) return;
  const auto old = os.precision(17);
  if (header) {
    for (std::size_t m = 0; m < w.front().size(); ++m) os << (m ? "," : "") << "w" << m + 1;
    os << '\n';
  }
  for (const auto& v : w) {
    for (std::size_t m = 0; m < v.size(); ++m) os << (m ? "," : "") << v[m];
    os << '\n';
  }
  os.precision(old);
}

}  // namespace moma
