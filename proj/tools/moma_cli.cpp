#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moma/cli.hpp"
#include "moma/parallel.hpp"

namespace {

struct SpecFlags {
  std::string config;
  std::optional<std::string> algorithm, seed, reps, out, threads;
  std::vector<std::string> set;
  bool dry_run = false;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
  cmd->add_option("-c,--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("-a,--algorithm", f.algorithm, "MOMA-AW, SOGA-FW or NSGA-II");
  cmd->add_option("-s,--seed", f.seed, "master seed; run i uses seed + i");
  cmd->add_option("-r,--reps", f.reps, "repetitions");
  cmd->add_option("-o,--out", f.out, "output directory");
  cmd->add_option("-j,--threads", f.threads, "worker threads (default: MOMA_THREADS or 1)");
  cmd->add_option("--set", f.set, "extra key=value override, repeatable");
  cmd->add_flag("--dry-run", f.dry_run, "print the resolved configuration and exit");
}

moma::ExperimentSpec resolve(const SpecFlags& f) {
  moma::ExperimentSpec base;
  base.run.threads = moma::default_thread_count();
  auto spec = f.config.empty() ? base : moma::parse_config(f.config, base);
  auto put = [&](const char* key, const std::optional<std::string>& v) {
    if (v) moma::apply_setting(spec, key, *v);
  };
  put("algorithm", f.algorithm);
  put("seed", f.seed);
  put("repetitions", f.reps);
  put("out", f.out);
  put("threads", f.threads);
  for (const auto& kv : f.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw moma::ConfigError("--set expects key=value, got '" + kv + "'");
    moma::apply_setting(spec, moma::detail::trim(kv.substr(0, eq)), moma::detail::trim(kv.substr(eq + 1)));
  }
  moma::validate(spec);
  return spec;
}

std::optional<moma::ObjectiveVector> parse_point(const std::string& s) {
  if (s.empty()) return std::nullopt;
  moma::ObjectiveVector v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw moma::ConfigError("--ref: bad coordinate '" + item + "'");
    v.push_back(x);
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memetic multi-objective optimizer with adaptive weights"};
  app.require_subcommand(1);

  SpecFlags run_flags, compare_flags;
  auto* run_cmd = app.add_subcommand("run", "run one algorithm for the configured repetitions");
  add_spec_flags(run_cmd, run_flags);
  auto* compare_cmd = app.add_subcommand("compare", "run every listed algorithm on shared seeds");
  add_spec_flags(compare_cmd, compare_flags);

  std::vector<std::string> fronts;
  std::string oracle, ref, metrics_out;
  auto* metrics_cmd = app.add_subcommand("metrics", "GD, HV and N_nd of front CSV files");
  metrics_cmd->add_option("fronts", fronts, "front CSV files")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--oracle", oracle, "true-front CSV for GD")->check(CLI::ExistingFile);
  metrics_cmd->add_option("--ref", ref, "HV reference point, comma separated");
  metrics_cmd->add_option("-o,--out", metrics_out, "write the table here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*metrics_cmd) {
      const auto point = parse_point(ref);
      if (metrics_out.empty()) return moma::cmd_metrics(fronts, oracle, point, std::cout, std::cerr);
      std::ofstream os(metrics_out);
      if (!os) throw moma::IoError("cannot write " + metrics_out);
      return moma::cmd_metrics(fronts, oracle, point, os, std::cerr);
    }
    const bool compare = static_cast<bool>(*compare_cmd);
    const auto& flags = compare ? compare_flags : run_flags;
    const auto spec = resolve(flags);
    if (flags.dry_run) {
      std::cout << moma::echo(spec);
      return 0;
    }
    return compare ? moma::cmd_compare(spec, std::cerr) : moma::cmd_run(spec, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
