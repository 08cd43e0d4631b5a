#pragma once

// Weighted-sum composite objective and the steepest-descent single-flip
// local search with relative-improvement termination.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "moma/errors.hpp"
#include "moma/genome.hpp"
#include "moma/objectives.hpp"
#include "moma/problem.hpp"
#include "moma/weights.hpp"

namespace moma {

inline double composite_value(const ObjectiveVector& f, const WeightVector& w) {
  if (f.size() != w.size()) throw ContractError("composite_value: objective/weight length mismatch");
  double s = 0.0;
  for (std::size_t m = 0; m < f.size(); ++m) s += w[m] * f[m];
  return s;
}

/// f~ = sum_m w_m (f_m - offset_m) / scale_m.
struct CompositeObjective {
  WeightVector weight;
  ObjectiveVector offset;
  ObjectiveVector scale;

  static CompositeObjective plain(WeightVector w) {
    const std::size_t m = w.size();
    return {std::move(w), ObjectiveVector(m, 0.0), ObjectiveVector(m, 1.0)};
  }

  /// 1 + sum_m w_m f^_m with f^ = (f - z_L) / (z_U - z_L + 1).
  static CompositeObjective normalized(WeightVector w, const ObjectiveVector& z_lo, const ObjectiveVector& z_hi) {
    if (z_lo.size() != w.size() || z_hi.size() != w.size()) throw ContractError("CompositeObjective: dimension mismatch");
    ObjectiveVector scale(w.size()), offset(w.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
      scale[m] = z_hi[m] - z_lo[m] + 1.0;
      offset[m] = z_lo[m] - scale[m];
    }
    return {std::move(w), std::move(offset), std::move(scale)};
  }

  double operator()(const ObjectiveVector& f) const {
    if (f.size() != weight.size()) throw ContractError("CompositeObjective: objective count mismatch");
    double s = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) s += weight[m] * (f[m] - offset[m]) / scale[m];
    return s;
  }
};

/// What N_add / N_rem count: accepted structural changes, or accepted changes
/// plus every candidate flip evaluated during the neighborhood scans.
enum class CounterMode { accepted, evaluations };

struct LocalSearchBudget {
  double eps = 1e-3;  ///< stop once the best relative improvement drops below this
  std::size_t max_flips = std::numeric_limits<std::size_t>::max();
  CounterMode counter_mode = CounterMode::accepted;
};

/// Relative-precision schedule for the local step over global iterations.
struct EpsSchedule {
  enum class Kind { constant, taper };
  Kind kind = Kind::taper;
  double hi = 1e-3;
  double lo = 1e-6;
  std::size_t t_start = 10;
  std::size_t t_end = 30;
  double constant = 1e-3;

  double at(std::size_t t) const;

  friend bool operator==(const EpsSchedule&, const EpsSchedule&) = default;
};

/// eps_hi before t_start, eps_lo after t_end, geometric in between.
inline double taper_schedule(std::size_t t, std::size_t t_start, std::size_t t_end, double eps_hi, double eps_lo) {
  if (t < 1) throw ContractError("taper_schedule: iterations count from 1");
  if (!(eps_hi >= eps_lo && eps_lo > 0.0)) throw ConfigError("taper_schedule: need eps_hi >= eps_lo > 0");
  if (t < t_start) return eps_hi;
  if (t >= t_end) return eps_lo;
  const double frac = static_cast<double>(t - t_start) / static_cast<double>(t_end - t_start);
  return eps_hi * std::pow(eps_lo / eps_hi, frac);
}

inline double EpsSchedule::at(std::size_t t) const {
  return kind == Kind::constant ? constant : taper_schedule(t, t_start, t_end, hi, lo);
}

enum class StopReason { local_minimum, small_improvement, max_flips };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::local_minimum: return "local_minimum";
    case StopReason::small_improvement: return "small_improvement";
    case StopReason::max_flips: return "max_flips";
  }
  return "?";
}

struct DescentStep {
  std::size_t index;
  bool added;
  double value;  ///< composite value after the flip
};

struct DescentState {
  Genome genome;
  ObjectiveVector objectives;
};

struct DescentResult {
  Genome genome;
  ObjectiveVector objectives;
  double value = 0.0;          ///< composite value of the result
  double initial_value = 0.0;  ///< composite value of the start genome
  std::size_t n_add = 0;
  std::size_t n_rem = 0;
  std::size_t evaluations = 0;  ///< candidate objective evaluations
  std::size_t infeasible = 0;   ///< candidate flips skipped as infeasible
  StopReason stop = StopReason::local_minimum;
  double eps = 0.0;
  std::vector<DescentStep> steps;
  std::vector<DescentState> trajectory;  ///< start state and every accepted state, when recorded

  std::size_t flips() const { return steps.size(); }
  std::size_t perturbations() const { return n_add + n_rem; }
};

/// Improvements smaller than this (relative) are rounding noise, not progress.
inline constexpr double kMinRelativeGain = 1e-12;

/// Steepest descent over single non-fixed bit flips. Every step scans all
/// flips, applies the one with the largest decrease of the composite (lowest
/// index on ties) and stops at a 1-flip local minimum, when the relative gain
/// (prev - new) / max(|prev|, 1e-30) falls below eps, or after max_flips.
inline DescentResult local_descent(FlipSession& session, const CompositeObjective& obj, const LocalSearchBudget& budget,
                                   bool record_trajectory = false) {
  if (!(budget.eps >= 0.0)) throw ConfigError("local_descent: eps must be nonnegative");
  DescentResult r;
  r.eps = budget.eps;
  double current = obj(session.objectives());
  r.initial_value = current;
  if (record_trajectory) r.trajectory.push_back({session.genome(), session.objectives()});
  const std::size_t n = session.genome().size();
  r.stop = StopReason::max_flips;
  while (r.steps.size() < budget.max_flips) {
    std::size_t best = n;
    double best_value = current;
    const Genome& g = session.genome();
    for (std::size_t k = 0; k < n; ++k) {
      if (g.is_fixed(k)) continue;
      const bool adding = !g[k];
      const auto f = session.probe(k);
      ++r.evaluations;
      if (budget.counter_mode == CounterMode::evaluations) (adding ? r.n_add : r.n_rem) += 1;
      if (!f) {
        ++r.infeasible;
        continue;
      }
      const double v = obj(*f);
      if (v < best_value) {
        best_value = v;
        best = k;
      }
    }
    const double denom = std::max(std::abs(current), 1e-30);
    const double gain = best == n ? 0.0 : (current - best_value) / denom;
    if (best == n || gain <= kMinRelativeGain) {
      r.stop = StopReason::local_minimum;
      break;
    }
    if (gain < budget.eps) {
      r.stop = StopReason::small_improvement;
      break;
    }
    const bool adding = !session.genome()[best];
    session.apply(best);
    (adding ? r.n_add : r.n_rem) += 1;
    current = obj(session.objectives());
    r.steps.push_back({best, adding, current});
    if (record_trajectory) r.trajectory.push_back({session.genome(), session.objectives()});
  }
  r.genome = session.genome();
  r.objectives = session.objectives();
  r.value = current;
  return r;
}

inline DescentResult local_descent(const Problem& problem, const Genome& g, const CompositeObjective& obj,
                                   const LocalSearchBudget& budget, bool record_trajectory = false) {
  auto s = problem.session(g);
  return local_descent(*s, obj, budget, record_trajectory);
}

/// Per-descent trace: one row per accepted flip, then a termination row.
inline void write_descent_trace_csv(std::ostream& os, const DescentResult& r) {
  const auto old = os.precision(17);
  os << "step,flip_index,action,value,eps\n";
  os << 0 << ",," << "start," << r.initial_value << ',' << r.eps << '\n';
  for (std::size_t i = 0; i < r.steps.size(); ++i)
    os << i + 1 << ',' << r.steps[i].index << ',' << (r.steps[i].added ? "add" : "remove") << ',' << r.steps[i].value << ','
       << r.eps << '\n';
  os << r.steps.size() + 1 << ",," << to_string(r.stop) << ',' << r.value << ',' << r.eps << '\n';
  os.precision(old);
}

}  // namespace moma
