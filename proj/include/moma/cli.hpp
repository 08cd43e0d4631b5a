#pragma once

// Batch front-end behind the moma executable. Every command returns a process
// exit status: 0 iff every requested run finished and every output was written.
//
// Layout under spec.out:
//   config.txt, config.json          resolved configuration
//   runs.csv, summary.csv            one row per run / per (algorithm, metric)
//   <ALGORITHM>/run_<i>/front.csv    archive front
//   <ALGORITHM>/run_<i>/trace.csv    HV-vs-perturbations trace
//   <ALGORITHM>/run_<i>/weights.csv  weight sets per iteration (record_weights)

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "moma/config.hpp"
#include "moma/engine.hpp"
#include "moma/metrics.hpp"
#include "moma/problems.hpp"

namespace moma {

namespace fs = std::filesystem;

namespace detail {

template <class Fn>
void write_file(const fs::path& path, Fn&& body) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  body(os);
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

inline std::string run_dir_name(std::size_t i) {
  std::ostringstream os;
  os << "run_" << std::setw(3) << std::setfill('0') << i;
  return os.str();
}

}  // namespace detail

/// iteration,index,w1..wM per recorded weight set.
inline void write_weight_history_csv(std::ostream& os, const std::vector<WeightSet>& history) {
  const auto old = os.precision(17);
  const std::size_t m = history.empty() || history.front().empty() ? 0 : history.front().front().size();
  os << "iteration,index";
  for (std::size_t k = 0; k < m; ++k) os << ",w" << k + 1;
  os << '\n';
  for (std::size_t t = 0; t < history.size(); ++t)
    for (std::size_t j = 0; j < history[t].size(); ++j) {
      os << t << ',' << j;
      for (double x : history[t][j]) os << ',' << x;
      os << '\n';
    }
  os.precision(old);
}

/// Runs `algorithms` in order over the shared seed list spec.run.seed + i.
inline int run_algorithms(const ExperimentSpec& spec, const std::vector<Algorithm>& algorithms, std::ostream& log) {
  try {
    validate(spec);
    const fs::path root(spec.out);
    fs::create_directories(root);
    detail::write_file(root / "config.txt", [&](std::ostream& os) { os << echo(spec); });
    detail::write_file(root / "config.json", [&](std::ostream& os) { os << to_json(spec).dump(2) << '\n'; });

    const auto problem = make_instance(spec.run.problem);
    std::optional<ObjectiveMatrix> oracle;
    if (!spec.oracle_front.empty()) oracle = objectives_of(read_front_csv(spec.oracle_front));

    std::map<std::size_t, std::size_t> moma_evaluations;
    std::vector<BatchResult> batches;
    std::size_t failures = 0;
    for (const auto alg : algorithms) {
      BatchResult b;
      b.algorithm = alg;
      for (std::size_t i = 0; i < spec.repetitions; ++i) {
        RunConfig cfg = spec.run;
        cfg.algorithm = alg;
        cfg.seed = spec.run.seed + i;
        if (spec.budget_parity && alg == Algorithm::nsga2 && moma_evaluations.count(i)) {
          cfg.evaluation_budget = moma_evaluations[i];
          cfg.iterations = std::numeric_limits<std::size_t>::max();
        }
        try {
          const auto r = run(*problem, cfg);
          if (alg == Algorithm::moma_aw) moma_evaluations[i] = r.evaluations;
          const auto dir = root / to_string(alg) / detail::run_dir_name(i);
          fs::create_directories(dir);
          detail::write_file(dir / "front.csv", [&](std::ostream& os) { write_front_csv(os, r.archive, problem->objective_count()); });
          detail::write_file(dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, r.trace); });
          if (!r.weight_history.empty())
            detail::write_file(dir / "weights.csv", [&](std::ostream& os) { write_weight_history_csv(os, r.weight_history); });
          b.runs.push_back(record_of(r, *problem, i, oracle));
          log << to_string(alg) << " run " << i << " seed " << cfg.seed << ": n_nd " << r.archive.size() << ", "
              << r.evaluations << " evaluations, " << r.wall_seconds << " s\n";
        } catch (const std::exception& e) {
          ++failures;
          RunRecord rec;
          rec.algorithm = alg;
          rec.index = i;
          rec.seed = cfg.seed;
          rec.ok = false;
          rec.error = e.what();
          b.runs.push_back(rec);
          log << to_string(alg) << " run " << i << " seed " << cfg.seed << " failed: " << e.what() << '\n';
        }
      }
      b.summary = summarize(b.runs);
      batches.push_back(std::move(b));
    }
    detail::write_file(root / "runs.csv", [&](std::ostream& os) { write_runs_csv(os, batches); });
    detail::write_file(root / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, batches); });
    return failures ? 1 : 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int cmd_run(const ExperimentSpec& spec, std::ostream& log) { return run_algorithms(spec, {spec.run.algorithm}, log); }

inline int cmd_compare(const ExperimentSpec& spec, std::ostream& log) { return run_algorithms(spec, spec.algorithms, log); }

/// GD (needs `oracle`), HV (needs `reference`) and N_nd for external fronts,
/// written as CSV to `out`.
inline int cmd_metrics(const std::vector<std::string>& fronts, const std::string& oracle,
                       const std::optional<ObjectiveVector>& reference, std::ostream& out, std::ostream& log) {
  try {
    std::optional<ObjectiveMatrix> truth;
    if (!oracle.empty()) truth = objectives_of(read_front_csv(oracle));
    const auto old = out.precision(17);
    out << "file,points,n_nd,gd,hv\n";
    for (const auto& path : fronts) {
      const auto f = objectives_of(read_front_csv(path));
      out << path << ',' << f.size() << ',' << nondominated_indices(f).size() << ',';
      if (truth && !f.empty()) out << generational_distance(f, *truth);
      out << ',';
      if (reference && !f.empty()) {
        if (f.front().size() != reference->size()) throw ConfigError(path + ": reference point dimension mismatch");
        out << hypervolume(f, *reference).value;
      }
      out << '\n';
    }
    out.precision(old);
    return out ? 0 : 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace moma
