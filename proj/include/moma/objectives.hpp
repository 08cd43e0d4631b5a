#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "moma/errors.hpp"

namespace moma {

/// Objective values f_1..f_M of one solution, all minimized.
using ObjectiveVector = std::vector<double>;
using ObjectiveMatrix = std::vector<ObjectiveVector>;

/// Pareto dominance under minimization.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) throw ContractError("dominates: objective vectors differ in length");
  bool strict = false;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] > b[m]) return false;
    if (a[m] < b[m]) strict = true;
  }
  return strict;
}

/// Componentwise minimum (utopian) and maximum (nadir) of a point set.
inline std::pair<ObjectiveVector, ObjectiveVector> utopian_nadir(const ObjectiveMatrix& points) {
  if (points.empty()) throw ContractError("utopian_nadir: empty point set");
  ObjectiveVector lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    if (p.size() != lo.size()) throw ContractError("utopian_nadir: ragged point set");
    for (std::size_t m = 0; m < p.size(); ++m) {
      lo[m] = std::min(lo[m], p[m]);
      hi[m] = std::max(hi[m], p[m]);
    }
  }
  return {std::move(lo), std::move(hi)};
}

}  // namespace moma
