#pragma once

// Top-level optimizers (MOMA-AW, SOGA-FW, NSGA-II) and the batch protocol.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "moma/errors.hpp"
#include "moma/genome.hpp"
#include "moma/localsearch.hpp"
#include "moma/metrics.hpp"
#include "moma/moea.hpp"
#include "moma/parallel.hpp"
#include "moma/problem.hpp"
#include "moma/problems.hpp"
#include "moma/random.hpp"
#include "moma/weights.hpp"

namespace moma {

enum class Algorithm { moma_aw, soga_fw, nsga2 };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::moma_aw: return "MOMA-AW";
    case Algorithm::soga_fw: return "SOGA-FW";
    case Algorithm::nsga2: return "NSGA-II";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::erase_if(s, [](char c) { return c == '-' || c == '_'; });
  if (s == "momaaw" || s == "moma") return Algorithm::moma_aw;
  if (s == "sogafw" || s == "soga") return Algorithm::soga_fw;
  if (s == "nsga2" || s == "nsgaii") return Algorithm::nsga2;
  throw ConfigError("algorithm: unknown value '" + s + "' (accepted: MOMA-AW, SOGA-FW, NSGA-II)");
}

/// How SOGA-FW spends its iterations across the weight sweep.
enum class SogaBudget {
  full,    ///< every sweep point runs the full iteration count
  shared,  ///< the iteration count is split across sweep points
};

/// Which descent states feed the archive.
enum class ArchiveMode {
  accepted,   ///< start state and every accepted flip of every descent
  endpoints,  ///< the descent end states only
};

struct RunConfig {
  Algorithm algorithm = Algorithm::moma_aw;
  InstanceDescriptor problem{.name = "lotz", .seed = 0, .n = 16};
  std::size_t agents = 64;
  std::size_t iterations = 40;
  VariationParams variation;
  WeightUpdateParams weights;
  EpsSchedule eps;
  CounterMode counter_mode = CounterMode::accepted;
  std::size_t max_flips = std::numeric_limits<std::size_t>::max();
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t sweep_count = 8;
  SogaBudget soga_budget = SogaBudget::full;
  ArchiveMode archive_mode = ArchiveMode::accepted;
  bool memoize = false;
  bool adapt_weights = true;  ///< MOMA-AW only: run the weight update each iteration
  bool local_search = true;   ///< MOMA-AW only: descend every offspring
  std::size_t evaluation_budget = 0;    ///< stop after this many evaluations (0 = none)
  std::size_t perturbation_budget = 0;  ///< stop after this many N_add+N_rem (0 = none)
  bool record_weights = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Throws ConfigError naming the offending field.
  void validate() const {
    auto prob = [](const char* key, double v) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(key) + ": must lie in [0, 1]");
    };
    if (agents < 2) throw ConfigError("agents: must be >= 2");
    prob("p_crossover", variation.p_crossover);
    prob("p_mutation", variation.p_mutation);
    if (variation.crossover_points < 1) throw ConfigError("crossover_points: must be >= 1");
    prob("delta_r", weights.delta_r);
    prob("delta_c", weights.delta_c);
    if (weights.capacity < 1) throw ConfigError("neighborhood_capacity: must be >= 1");
    if (weights.wvg_count < 1) throw ConfigError("wvg_count: must be >= 1");
    if (!(eps.hi >= eps.lo && eps.lo > 0.0)) throw ConfigError("eps_hi, eps_lo: need eps_hi >= eps_lo > 0");
    if (eps.t_start < 1 || eps.t_end < eps.t_start) throw ConfigError("eps_t_start, eps_t_end: need 1 <= t_start <= t_end");
    if (!(eps.constant >= 0.0)) throw ConfigError("eps: must be >= 0");
    if (threads < 1) throw ConfigError("threads: must be >= 1");
    if (algorithm == Algorithm::soga_fw && sweep_count < 2) throw ConfigError("sweep_count: must be >= 2");
  }
};

/// One row per completed iteration (row 0 = state after initialization).
struct TraceRow {
  std::size_t t = 0;
  double eps = 0.0;
  double hv = 0.0;
  std::size_t n_nd = 0;
  std::size_t n_add = 0;  ///< cumulative
  std::size_t n_rem = 0;  ///< cumulative
  std::size_t evaluations = 0;  ///< cumulative
  std::size_t weights_replaced = 0;
  std::size_t sweep = 0;  ///< SOGA-FW sweep point, 0 otherwise

  std::size_t perturbations() const { return n_add + n_rem; }
};

struct RunResult {
  Algorithm algorithm = Algorithm::moma_aw;
  std::uint64_t seed = 0;
  FrontArchive archive;
  Population population;  ///< final generation (last sweep point for SOGA-FW)
  std::vector<TraceRow> trace;
  std::vector<WeightSet> weight_history;
  std::size_t iterations = 0;  ///< iterations executed (summed over sweeps)
  std::size_t evaluations = 0;
  std::size_t n_add = 0;
  std::size_t n_rem = 0;
  std::size_t failures = 0;  ///< descents that threw and were kept unimproved
  double wall_seconds = 0.0;

  std::size_t perturbations() const { return n_add + n_rem; }
};

namespace detail {

struct Counters {
  std::size_t evaluations = 0, n_add = 0, n_rem = 0, failures = 0;
};

inline bool budget_exhausted(const RunConfig& cfg, const Counters& c) {
  return (cfg.evaluation_budget && c.evaluations >= cfg.evaluation_budget) ||
         (cfg.perturbation_budget && c.n_add + c.n_rem >= cfg.perturbation_budget);
}

inline std::vector<ObjectiveVector> evaluate_all(const Problem& p, const std::vector<Genome>& gs, std::size_t threads) {
  std::vector<ObjectiveVector> f(gs.size());
  parallel_for(gs.size(), threads, [&](std::size_t i) { f[i] = p.evaluate(gs[i]); });
  return f;
}

struct DescentJob {
  Genome genome;
  ObjectiveVector objectives;
  std::optional<CompositeObjective> objective;  ///< nullopt: keep as is
};

struct DescentOutcome {
  Genome genome;
  ObjectiveVector objectives;
  std::vector<DescentState> states;
  std::size_t n_add = 0, n_rem = 0, evaluations = 0;
  bool failed = false;
};

/// Runs the jobs in parallel; outcomes are indexed like the jobs.
inline std::vector<DescentOutcome> descend_all(const Problem& p, const std::vector<DescentJob>& jobs, double eps,
                                               const RunConfig& cfg) {
  std::vector<DescentOutcome> out(jobs.size());
  const bool record = cfg.archive_mode == ArchiveMode::accepted;
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    auto& o = out[i];
    o.genome = job.genome;
    o.objectives = job.objectives;
    if (!job.objective) {
      o.states.push_back({job.genome, job.objectives});
      return;
    }
    try {
      auto r = local_descent(p, job.genome, *job.objective,
                             {.eps = eps, .max_flips = cfg.max_flips, .counter_mode = cfg.counter_mode}, record);
      o.genome = std::move(r.genome);
      o.objectives = std::move(r.objectives);
      o.n_add = r.n_add;
      o.n_rem = r.n_rem;
      o.evaluations = r.evaluations;
      if (record) o.states = std::move(r.trajectory);
      else o.states.push_back({o.genome, o.objectives});
    } catch (const std::exception& e) {
      o.failed = true;
      o.states.assign(1, {job.genome, job.objectives});
    }
  });
  return out;
}

inline void absorb(const std::vector<DescentOutcome>& outs, FrontArchive& archive, Counters& c) {
  for (const auto& o : outs) {
    c.n_add += o.n_add;
    c.n_rem += o.n_rem;
    c.evaluations += o.evaluations;
    c.failures += o.failed;
    for (const auto& s : o.states) archive.insert(s.genome, s.objectives);
  }
}

inline TraceRow trace_row(std::size_t t, double eps, const FrontArchive& a, const Counters& c, const ObjectiveVector& ref,
                          std::size_t replaced, std::size_t sweep) {
  TraceRow r;
  r.t = t;
  r.eps = eps;
  r.hv = hypervolume(a.objectives(), ref, {.warn = false}).value;
  r.n_nd = a.size();
  r.n_add = c.n_add;
  r.n_rem = c.n_rem;
  r.evaluations = c.evaluations;
  r.weights_replaced = replaced;
  r.sweep = sweep;
  return r;
}

inline std::vector<Genome> genomes_of(const Population& p) {
  std::vector<Genome> g;
  g.reserve(p.size());
  for (const auto& ind : p) g.push_back(ind.genome);
  return g;
}

inline void finish(RunResult& r, const Counters& c, std::chrono::steady_clock::time_point t0) {
  r.evaluations = c.evaluations;
  r.n_add = c.n_add;
  r.n_rem = c.n_rem;
  r.failures = c.failures;
  r.archive.sort();
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Shared generational loop. With weights and descent disabled this is plain
/// NSGA-II; the random streams for initialization, variation and weights are
/// separate so toggling one path does not shift the others.
inline RunResult generational(const Problem& p, const RunConfig& cfg, bool use_weights, bool use_descent) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  res.algorithm = cfg.algorithm;
  res.seed = cfg.seed;
  Counters c;
  Rng init_rng(derive_seed(cfg.seed, {0x1}));
  Rng var_rng(derive_seed(cfg.seed, {0x2}));
  Rng weight_rng(derive_seed(cfg.seed, {0x3}));
  const std::size_t n = cfg.agents, m = p.objective_count();
  const ObjectiveVector ref = p.reference_point();
  std::set<Genome> seen_optima;

  auto descend_offspring = [&](const std::vector<Genome>& gs, const ObjectiveMatrix& f, const WeightSet& w,
                               const ObjectiveMatrix& norm_basis, double eps) {
    std::vector<DescentJob> jobs(gs.size());
    std::vector<std::size_t> perm;
    if (use_descent) perm = assign_weights_to_solutions(f, w, cfg.weights.orientation);
    const auto [lo, hi] = utopian_nadir(norm_basis);
    for (std::size_t i = 0; i < gs.size(); ++i) {
      jobs[i].genome = gs[i];
      jobs[i].objectives = f[i];
      if (use_descent && !(cfg.memoize && seen_optima.contains(gs[i])))
        jobs[i].objective = CompositeObjective::normalized(w[perm[i]], lo, hi);
    }
    auto outs = descend_all(p, jobs, eps, cfg);
    absorb(outs, res.archive, c);
    Population pop(gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) {
      pop[i].genome = outs[i].genome;
      pop[i].objectives = outs[i].objectives;
      if (use_descent) pop[i].weight = w[perm[i]];
      if (cfg.memoize) seen_optima.insert(outs[i].genome);
    }
    return pop;
  };

  std::vector<Genome> init(n);
  for (auto& g : init) g = p.random_genome(init_rng);
  const auto f0 = evaluate_all(p, init, cfg.threads);
  c.evaluations += n;
  WeightSet w;
  if (use_descent) w = simplex_lattice(m, n);
  if (cfg.record_weights && use_descent) res.weight_history.push_back(w);
  const double eps1 = cfg.eps.at(1);
  Population pop = descend_offspring(init, f0, w, f0, eps1);
  rank_and_crowd(pop);
  res.trace.push_back(trace_row(0, use_descent ? eps1 : 0.0, res.archive, c, ref, 0, 0));

  for (std::size_t t = 1; t <= cfg.iterations && !budget_exhausted(cfg, c); ++t) {
    std::size_t replaced = 0;
    if (use_descent && use_weights) {
      auto upd = update_weights(w, objectives_of(pop), cfg.weights, weight_rng);
      w = std::move(upd.weights);
      replaced = upd.removed;
    }
    if (cfg.record_weights && use_descent) res.weight_history.push_back(w);
    const auto kids = make_offspring(genomes_of(pop), n, cfg.variation, var_rng);
    const auto fk = evaluate_all(p, kids, cfg.threads);
    c.evaluations += kids.size();
    ObjectiveMatrix basis = objectives_of(pop);
    basis.insert(basis.end(), fk.begin(), fk.end());
    const double eps = cfg.eps.at(t);
    Population off = descend_offspring(kids, fk, w, basis, eps);
    pop = environmental_selection(pop, off, n);
    ++res.iterations;
    res.trace.push_back(trace_row(t, use_descent ? eps : 0.0, res.archive, c, ref, replaced, 0));
  }
  res.population = std::move(pop);
  finish(res, c, t0);
  return res;
}

}  // namespace detail

/// MOMA-AW: NSGA-II whose offspring are descended on weighted composites,
/// with weights adapted to the population every iteration.
inline RunResult run_moma_aw(const Problem& p, const RunConfig& cfg) {
  cfg.validate();
  return detail::generational(p, cfg, cfg.adapt_weights, cfg.local_search);
}

inline RunResult run_nsga2(const Problem& p, const RunConfig& cfg) {
  cfg.validate();
  return detail::generational(p, cfg, false, false);
}

/// SOGA-FW: K independent single-objective memetic runs, each with a fixed
/// weight from a uniform simplex sweep; elitist truncation on the composite.
/// Normalization is frozen from each run's initial population.
inline RunResult run_soga_fw(const Problem& p, const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  res.algorithm = Algorithm::soga_fw;
  res.seed = cfg.seed;
  detail::Counters c;
  const std::size_t n = cfg.agents, m = p.objective_count(), k = cfg.sweep_count;
  const ObjectiveVector ref = p.reference_point();
  const WeightSet sweep = simplex_lattice(m, k);
  const std::size_t iters = cfg.soga_budget == SogaBudget::full ? cfg.iterations : std::max<std::size_t>(1, cfg.iterations / k);

  for (std::size_t s = 0; s < k && !detail::budget_exhausted(cfg, c); ++s) {
    Rng init_rng(derive_seed(cfg.seed, {0x50, s}));
    Rng var_rng(derive_seed(cfg.seed, {0x51, s}));
    std::vector<Genome> init(n);
    for (auto& g : init) g = p.random_genome(init_rng);
    const auto f0 = detail::evaluate_all(p, init, cfg.threads);
    c.evaluations += n;
    const auto [lo, hi] = utopian_nadir(f0);
    const auto obj = CompositeObjective::normalized(sweep[s], lo, hi);

    auto descend = [&](const std::vector<Genome>& gs, const ObjectiveMatrix& f, double eps) {
      std::vector<detail::DescentJob> jobs(gs.size());
      for (std::size_t i = 0; i < gs.size(); ++i) jobs[i] = {gs[i], f[i], obj};
      auto outs = detail::descend_all(p, jobs, eps, cfg);
      detail::absorb(outs, res.archive, c);
      Population pop(gs.size());
      for (std::size_t i = 0; i < gs.size(); ++i) pop[i] = {outs[i].genome, outs[i].objectives, sweep[s], 0, 0.0};
      return pop;
    };
    auto truncate = [&](Population all) {
      std::vector<std::size_t> order(all.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::vector<double> v(all.size());
      for (std::size_t i = 0; i < all.size(); ++i) v[i] = obj(all[i].objectives);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
      Population out;
      for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(all[order[i]]));
      return out;
    };

    const double eps1 = cfg.eps.at(1);
    Population pop = descend(init, f0, eps1);
    res.trace.push_back(detail::trace_row(0, eps1, res.archive, c, ref, 0, s));
    for (std::size_t t = 1; t <= iters && !detail::budget_exhausted(cfg, c); ++t) {
      const auto kids = make_offspring(detail::genomes_of(pop), n, cfg.variation, var_rng);
      const auto fk = detail::evaluate_all(p, kids, cfg.threads);
      c.evaluations += kids.size();
      const double eps = cfg.eps.at(t);
      Population off = descend(kids, fk, eps);
      Population all = std::move(pop);
      all.insert(all.end(), off.begin(), off.end());
      pop = truncate(std::move(all));
      ++res.iterations;
      res.trace.push_back(detail::trace_row(t, eps, res.archive, c, ref, 0, s));
    }
    res.population = std::move(pop);
  }
  detail::finish(res, c, t0);
  return res;
}

inline RunResult run(const Problem& p, const RunConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::moma_aw: return run_moma_aw(p, cfg);
    case Algorithm::soga_fw: return run_soga_fw(p, cfg);
    case Algorithm::nsga2: return run_nsga2(p, cfg);
  }
  throw ConfigError("algorithm: unknown");
}

inline RunResult run(const RunConfig& cfg) {
  const auto p = make_instance(cfg.problem);
  return run(*p, cfg);
}

// ---------------------------------------------------------------- outputs

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  const auto old = os.precision(17);
  os << "t,sweep,eps,hv,n_nd,n_add,n_rem,perturbations,evaluations,weights_replaced\n";
  for (const auto& r : trace)
    os << r.t << ',' << r.sweep << ',' << r.eps << ',' << r.hv << ',' << r.n_nd << ',' << r.n_add << ',' << r.n_rem << ','
       << r.perturbations() << ',' << r.evaluations << ',' << r.weights_replaced << '\n';
  os.precision(old);
}

/// Last trace value of HV with cumulative perturbations not above `budget`.
inline double hv_at_perturbations(const std::vector<TraceRow>& trace, std::size_t budget) {
  double hv = 0.0;
  for (const auto& r : trace)
    if (r.perturbations() <= budget) hv = std::max(hv, r.hv);
  return hv;
}

// ---------------------------------------------------------------- batch

/// Five-number summary with linearly interpolated quartiles.
struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline FiveNumber five_number(std::vector<double> v) {
  if (v.empty()) throw ContractError("five_number: empty sample");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

struct RunRecord {
  Algorithm algorithm = Algorithm::moma_aw;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  double hv = 0.0;
  std::optional<double> gd;
  std::size_t n_nd = 0;
  std::size_t perturbations = 0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  double wall_seconds = 0.0;
};

struct MetricSummary {
  std::string metric;
  double mean = 0, best = 0, worst = 0;
  FiveNumber spread;
  std::size_t count = 0;
};

struct BatchResult {
  Algorithm algorithm = Algorithm::moma_aw;
  std::vector<RunRecord> runs;
  std::vector<MetricSummary> summary;
  std::size_t failed() const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok; }));
  }
};

/// `oracle` replaces the problem's own true front for GD when given.
inline RunRecord record_of(const RunResult& r, const Problem& p, std::size_t index,
                           const std::optional<ObjectiveMatrix>& oracle = std::nullopt) {
  RunRecord rec;
  rec.algorithm = r.algorithm;
  rec.index = index;
  rec.seed = r.seed;
  const auto f = r.archive.objectives();
  rec.hv = f.empty() ? 0.0 : hypervolume(f, p.reference_point(), {.warn = false}).value;
  if (const auto truth = oracle ? oracle : p.true_front(); truth && !f.empty()) rec.gd = generational_distance(f, *truth);
  rec.n_nd = r.archive.size();
  rec.perturbations = r.perturbations();
  rec.evaluations = r.evaluations;
  rec.iterations = r.iterations;
  rec.wall_seconds = r.wall_seconds;
  return rec;
}

/// mean / best / worst and five-number summary per metric over successful runs.
inline std::vector<MetricSummary> summarize(const std::vector<RunRecord>& runs) {
  struct Metric {
    const char* name;
    bool higher_better;
    std::function<std::optional<double>(const RunRecord&)> get;
  };
  const std::vector<Metric> metrics{
      {"hv", true, [](const RunRecord& r) { return std::optional<double>(r.hv); }},
      {"gd", false, [](const RunRecord& r) { return r.gd; }},
      {"n_nd", true, [](const RunRecord& r) { return std::optional<double>(static_cast<double>(r.n_nd)); }},
      {"perturbations", false, [](const RunRecord& r) { return std::optional<double>(static_cast<double>(r.perturbations)); }},
      {"evaluations", false, [](const RunRecord& r) { return std::optional<double>(static_cast<double>(r.evaluations)); }},
      {"wall_seconds", false, [](const RunRecord& r) { return std::optional<double>(r.wall_seconds); }},
  };
  std::vector<MetricSummary> out;
  for (const auto& m : metrics) {
    std::vector<double> v;
    for (const auto& r : runs)
      if (r.ok)
        if (auto x = m.get(r)) v.push_back(*x);
    if (v.empty()) continue;
    MetricSummary s;
    s.metric = m.name;
    s.count = v.size();
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    s.spread = five_number(v);
    s.best = m.higher_better ? s.spread.max : s.spread.min;
    s.worst = m.higher_better ? s.spread.min : s.spread.max;
    out.push_back(s);
  }
  return out;
}

/// Optional per-run sink (front, trace) called in run-index order.
using RunSink = std::function<void(const RunResult&, std::size_t index)>;

/// Runs `repetitions` independent runs with seeds cfg.seed + i. A failing run
/// is recorded and the batch continues.
inline BatchResult run_batch(const RunConfig& cfg, std::size_t repetitions, const RunSink& sink = {}) {
  if (repetitions < 1) throw ConfigError("repetitions: must be >= 1");
  cfg.validate();
  BatchResult b;
  b.algorithm = cfg.algorithm;
  const auto p = make_instance(cfg.problem);
  for (std::size_t i = 0; i < repetitions; ++i) {
    RunConfig c = cfg;
    c.seed = cfg.seed + i;
    try {
      const auto r = run(*p, c);
      b.runs.push_back(record_of(r, *p, i));
      if (sink) sink(r, i);
    } catch (const std::exception& e) {
      RunRecord rec;
      rec.algorithm = cfg.algorithm;
      rec.index = i;
      rec.seed = c.seed;
      rec.ok = false;
      rec.error = e.what();
      b.runs.push_back(rec);
    }
  }
  b.summary = summarize(b.runs);
  return b;
}

inline void write_runs_csv(std::ostream& os, const std::vector<BatchResult>& batches) {
  const auto old = os.precision(17);
  os << "algorithm,run,seed,status,hv,gd,n_nd,perturbations,evaluations,iterations,wall_seconds\n";
  for (const auto& b : batches)
    for (const auto& r : b.runs) {
      os << to_string(r.algorithm) << ',' << r.index << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ',' << r.hv << ',';
      if (r.gd) os << *r.gd;
      os << ',' << r.n_nd << ',' << r.perturbations << ',' << r.evaluations << ',' << r.iterations << ',' << r.wall_seconds << '\n';
    }
  os.precision(old);
}

inline void write_summary_csv(std::ostream& os, const std::vector<BatchResult>& batches) {
  const auto old = os.precision(17);
  os << "algorithm,metric,count,mean,best,worst,min,q1,median,q3,max\n";
  for (const auto& b : batches)
    for (const auto& s : b.summary)
      os << to_string(b.algorithm) << ',' << s.metric << ',' << s.count << ',' << s.mean << ',' << s.best << ',' << s.worst << ','
         << s.spread.min << ',' << s.spread.q1 << ',' << s.spread.median << ',' << s.spread.q3 << ',' << s.spread.max << '\n';
  os.precision(old);
}

}  // namespace moma
