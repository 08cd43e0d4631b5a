#pragma once

// NSGA-II building blocks: non-dominated sorting, crowding distance,
// one-point style crossover, single-bit mutation and elitist selection.

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "moma/errors.hpp"
#include "moma/genome.hpp"
#include "moma/objectives.hpp"
#include "moma/random.hpp"
#include "moma/weights.hpp"

namespace moma {

struct Individual {
  Genome genome;
  ObjectiveVector objectives;
  std::optional<WeightVector> weight;
  std::size_t rank = 0;  // 1 = first front; 0 = not yet ranked
  double crowding = 0.0;
};

using Population = std::vector<Individual>;

inline ObjectiveMatrix objectives_of(const Population& p) {
  ObjectiveMatrix f;
  f.reserve(p.size());
  for (const auto& ind : p) f.push_back(ind.objectives);
  return f;
}

/// Fronts F_1, F_2, ... as index lists (indices ascending within a front).
inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(const ObjectiveMatrix& f) {
  if (f.empty()) throw ContractError("fast_nondominated_sort: empty population");
  const std::size_t n = f.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(f[p], f[q]))
        dominated[p].push_back(q);
      else if (dominates(f[q], f[p]))
        ++count[p];
    }
    if (count[p] == 0) fronts[0].push_back(p);
  }
  for (std::size_t k = 0; !fronts[k].empty(); ++k) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts[k])
      for (std::size_t q : dominated[p])
        if (--count[q] == 0) next.push_back(q);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

/// Crowding distance of each point within one front. Extreme points of every
/// objective get +inf; an objective with zero range contributes nothing.
inline std::vector<double> crowding_distance(const ObjectiveMatrix& front) {
  if (front.empty()) throw ContractError("crowding_distance: empty front");
  const std::size_t n = front.size(), m = front.front().size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) return std::vector<double>(n, inf);
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
    const double lo = front[order.front()][k], hi = front[order.back()][k];
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double range = hi - lo;
    if (range <= 0.0) continue;
    for (std::size_t i = 1; i + 1 < n; ++i)
      if (dist[order[i]] != inf) dist[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / range;
  }
  return dist;
}

/// Multi-point crossover at explicit cut positions (each in [1, n-1]); the
/// children alternate parent segments between cuts.
inline std::pair<Genome, Genome> crossover_at(const Genome& a, const Genome& b, std::vector<std::size_t> cuts) {
  if (a.size() != b.size()) throw ContractError("crossover: parents differ in length");
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::uint8_t> c1(a.bits().begin(), a.bits().end()), c2(b.bits().begin(), b.bits().end());
  bool swapped = false;
  std::size_t next = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    while (next < cuts.size() && cuts[next] == i) {
      swapped = !swapped;
      ++next;
    }
    if (swapped) std::swap(c1[i], c2[i]);
  }
  std::vector<std::uint8_t> mask(a.fixed_mask().begin(), a.fixed_mask().end());
  return {Genome(std::move(c1), mask), Genome(std::move(c2), mask)};
}

/// Crossover with `points` distinct random cut positions.
inline std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, std::size_t points, Rng& rng) {
  if (a.size() != b.size()) throw ContractError("crossover: parents differ in length");
  if (a.size() < 2 || points == 0) return {a, b};
  std::vector<std::size_t> pos(a.size() - 1);
  std::iota(pos.begin(), pos.end(), std::size_t{1});
  points = std::min(points, pos.size());
  // Partial Fisher-Yates: the first `points` entries become the sample.
  for (std::size_t i = 0; i < points; ++i) std::swap(pos[i], pos[i + rng.index(pos.size() - i)]);
  pos.resize(points);
  return crossover_at(a, b, std::move(pos));
}

/// With probability p, flips one uniformly chosen non-fixed bit.
inline Genome mutate(Genome g, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("mutation probability must lie in [0,1]");
  if (!rng.bernoulli(p)) return g;
  const std::size_t free = g.free_count();
  if (free == 0) return g;
  std::size_t k = rng.index(free);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_fixed(i)) continue;
    if (k-- == 0) {
      g.flip(i);
      break;
    }
  }
  return g;
}

struct VariationParams {
  double p_crossover = 0.9;
  double p_mutation = 1.0;
  std::size_t crossover_points = 1;

  friend bool operator==(const VariationParams&, const VariationParams&) = default;
};

/// `count` offspring from parents drawn uniformly at random (two distinct
/// parents per pair when possible).
inline std::vector<Genome> make_offspring(const std::vector<Genome>& parents, std::size_t count, const VariationParams& v,
                                          Rng& rng) {
  if (parents.empty()) throw ContractError("make_offspring: empty mating pool");
  std::vector<Genome> out;
  out.reserve(count + 1);
  while (out.size() < count) {
    const std::size_t i = rng.index(parents.size());
    std::size_t j = i;
    if (parents.size() > 1) {
      j = rng.index(parents.size() - 1);
      if (j >= i) ++j;
    }
    Genome c1 = parents[i], c2 = parents[j];
    if (rng.bernoulli(v.p_crossover)) std::tie(c1, c2) = crossover(parents[i], parents[j], v.crossover_points, rng);
    out.push_back(mutate(std::move(c1), v.p_mutation, rng));
    out.push_back(mutate(std::move(c2), v.p_mutation, rng));
  }
  out.resize(count);
  return out;
}

/// Assigns rank and crowding to every member in place.
inline void rank_and_crowd(Population& p) {
  if (p.empty()) return;
  const auto fronts = fast_nondominated_sort(objectives_of(p));
  for (std::size_t k = 0; k < fronts.size(); ++k) {
    ObjectiveMatrix fo;
    for (std::size_t i : fronts[k]) fo.push_back(p[i].objectives);
    const auto cd = crowding_distance(fo);
    for (std::size_t t = 0; t < fronts[k].size(); ++t) {
      p[fronts[k][t]].rank = k + 1;
      p[fronts[k][t]].crowding = cd[t];
    }
  }
}

/// Indices (into `f`) of the N survivors: whole fronts in rank order, the
/// splitting front truncated by descending crowding (lower index on ties).
inline std::vector<std::size_t> select_survivors(const ObjectiveMatrix& f, std::size_t n) {
  if (f.size() < n) throw ContractError("environmental_selection: fewer candidates than survivors");
  std::vector<std::size_t> keep;
  if (n == 0) return keep;
  for (const auto& front : fast_nondominated_sort(f)) {
    if (keep.size() + front.size() <= n) {
      keep.insert(keep.end(), front.begin(), front.end());
      if (keep.size() == n) break;
      continue;
    }
    ObjectiveMatrix fo;
    for (std::size_t i : front) fo.push_back(f[i]);
    const auto cd = crowding_distance(fo);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
    for (std::size_t t = 0; keep.size() < n; ++t) keep.push_back(front[order[t]]);
    break;
  }
  return keep;
}

/// Elitist NSGA-II survival over parents and offspring; survivors carry their
/// rank and crowding with respect to the new generation.
inline Population environmental_selection(const Population& parents, const Population& offspring, std::size_t n) {
  Population all;
  all.reserve(parents.size() + offspring.size());
  all.insert(all.end(), parents.begin(), parents.end());
  all.insert(all.end(), offspring.begin(), offspring.end());
  Population out;
  out.reserve(n);
  for (std::size_t i : select_survivors(objectives_of(all), n)) out.push_back(all[i]);
  rank_and_crowd(out);
  return out;
}

}  // namespace moma
