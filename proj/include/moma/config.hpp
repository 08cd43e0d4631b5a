#pragma once

// Experiment configuration: a flat `key = value` file ('#' starts a comment).
// Absent keys keep their defaults; see `config_keys()` for the schema.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "moma/engine.hpp"
#include "moma/errors.hpp"

namespace moma {

struct ExperimentSpec {
  RunConfig run;
  std::string out = "results";
  std::size_t repetitions = 1;
  std::vector<Algorithm> algorithms{Algorithm::moma_aw, Algorithm::soga_fw, Algorithm::nsga2};
  std::string oracle_front;  ///< optional reference front CSV for GD
  /// compare: NSGA-II receives MOMA-AW's evaluation count of the same seed.
  bool budget_parity = false;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] inline void bad_value(const std::string& key, const std::string& value, const std::string& range) {
  throw ConfigError("key '" + key + "': invalid value '" + value + "' (accepted: " + range + ")");
}

inline double parse_real(const std::string& key, const std::string& v, double lo, double hi, const std::string& range) {
  double x = 0.0;
  std::size_t used = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, range);
  }
  if (used != v.size() || !(x >= lo && x <= hi)) bad_value(key, v, range);
  return x;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v, std::uint64_t lo, std::uint64_t hi,
                                const std::string& range) {
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (v.empty() || ec != std::errc() || ptr != end || x < lo || x > hi) bad_value(key, v, range);
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  const auto s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, v, "true, false");
}

inline std::string real_str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

struct ConfigKey {
  std::string name;
  std::string accepted;
  std::function<void(ExperimentSpec&, const std::string&)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

/// The full schema in echo order.
inline const std::vector<ConfigKey>& config_keys() {
  using namespace detail;
  constexpr auto umax = std::numeric_limits<std::uint64_t>::max();
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    auto uint_key = [&k](std::string name, std::uint64_t lo, std::uint64_t hi, std::string range,
                         std::function<std::uint64_t&(ExperimentSpec&)> ref) {
      k.push_back({name, range,
                   [=](ExperimentSpec& s, const std::string& v) { ref(s) = parse_uint(name, v, lo, hi, range); },
                   [=](const ExperimentSpec& s) { return std::to_string(ref(const_cast<ExperimentSpec&>(s))); }});
    };
    auto size_key = [&k](std::string name, std::size_t lo, std::string range, std::function<std::size_t&(ExperimentSpec&)> ref) {
      k.push_back({name, range,
                   [=](ExperimentSpec& s, const std::string& v) {
                     ref(s) = static_cast<std::size_t>(parse_uint(name, v, lo, std::numeric_limits<std::size_t>::max(), range));
                   },
                   [=](const ExperimentSpec& s) { return std::to_string(ref(const_cast<ExperimentSpec&>(s))); }});
    };
    auto real_key = [&k](std::string name, double lo, double hi, std::string range, std::function<double&(ExperimentSpec&)> ref) {
      k.push_back({name, range, [=](ExperimentSpec& s, const std::string& v) { ref(s) = parse_real(name, v, lo, hi, range); },
                   [=](const ExperimentSpec& s) { return real_str(ref(const_cast<ExperimentSpec&>(s))); }});
    };
    auto bool_key = [&k](std::string name, std::function<bool&(ExperimentSpec&)> ref) {
      k.push_back({name, "true, false", [=](ExperimentSpec& s, const std::string& v) { ref(s) = parse_bool(name, v); },
                   [=](const ExperimentSpec& s) { return std::string(ref(const_cast<ExperimentSpec&>(s)) ? "true" : "false"); }});
    };
    const double inf = std::numeric_limits<double>::infinity();

    k.push_back({"algorithm", "MOMA-AW, SOGA-FW, NSGA-II",
                 [](ExperimentSpec& s, const std::string& v) {
                   try {
                     s.run.algorithm = parse_algorithm(v);
                   } catch (const ConfigError&) {
                     bad_value("algorithm", v, "MOMA-AW, SOGA-FW, NSGA-II");
                   }
                 },
                 [](const ExperimentSpec& s) { return to_string(s.run.algorithm); }});
    k.push_back({"algorithms", "comma-separated non-empty list of MOMA-AW, SOGA-FW, NSGA-II",
                 [](ExperimentSpec& s, const std::string& v) {
                   std::vector<Algorithm> list;
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ',')) {
                     item = trim(item);
                     if (item.empty()) continue;
                     try {
                       list.push_back(parse_algorithm(item));
                     } catch (const ConfigError&) {
                       bad_value("algorithms", v, "comma-separated non-empty list of MOMA-AW, SOGA-FW, NSGA-II");
                     }
                   }
                   if (list.empty()) bad_value("algorithms", v, "comma-separated non-empty list of MOMA-AW, SOGA-FW, NSGA-II");
                   s.algorithms = std::move(list);
                 },
                 [](const ExperimentSpec& s) {
                   std::string out;
                   for (std::size_t i = 0; i < s.algorithms.size(); ++i) out += (i ? "," : "") + to_string(s.algorithms[i]);
                   return out;
                 }});
    k.push_back({"problem", "lotz, knapsack, resonator, resonator-size",
                 [](ExperimentSpec& s, const std::string& v) {
                   const auto n = lower(v);
                   if (n != "lotz" && n != "knapsack" && n != "resonator" && n != "resonator-size")
                     bad_value("problem", v, "lotz, knapsack, resonator, resonator-size");
                   s.run.problem.name = n;
                 },
                 [](const ExperimentSpec& s) { return s.run.problem.name; }});
    uint_key("problem_seed", 0, umax, "integer >= 0", [](ExperimentSpec& s) -> std::uint64_t& { return s.run.problem.seed; });
    size_key("n", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.run.problem.n; });
    size_key("nx", 0, "integer >= 0 (0 = default)", [](ExperimentSpec& s) -> std::size_t& { return s.run.problem.nx; });
    size_key("ny", 0, "integer >= 0 (0 = default)", [](ExperimentSpec& s) -> std::size_t& { return s.run.problem.ny; });
    real_key("z0", 1e-9, inf, "real > 0", [](ExperimentSpec& s) -> double& { return s.run.problem.z0; });
    size_key("agents", 2, "integer >= 2", [](ExperimentSpec& s) -> std::size_t& { return s.run.agents; });
    size_key("iterations", 0, "integer >= 0", [](ExperimentSpec& s) -> std::size_t& { return s.run.iterations; });
    real_key("p_mutation", 0, 1, "[0, 1]", [](ExperimentSpec& s) -> double& { return s.run.variation.p_mutation; });
    real_key("p_crossover", 0, 1, "[0, 1]", [](ExperimentSpec& s) -> double& { return s.run.variation.p_crossover; });
    size_key("crossover_points", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.run.variation.crossover_points; });
    real_key("delta_r", 0, 1, "[0, 1]", [](ExperimentSpec& s) -> double& { return s.run.weights.delta_r; });
    real_key("delta_c", 0, 1, "[0, 1]", [](ExperimentSpec& s) -> double& { return s.run.weights.delta_c; });
    size_key("neighborhood_capacity", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.run.weights.capacity; });
    size_key("wvg_count", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.run.weights.wvg_count; });
    k.push_back({"weight_orientation", "utopian, negated",
                 [](ExperimentSpec& s, const std::string& v) {
                   const auto n = lower(v);
                   if (n == "utopian") s.run.weights.orientation = WeightOrientation::utopian;
                   else if (n == "negated") s.run.weights.orientation = WeightOrientation::negated;
                   else bad_value("weight_orientation", v, "utopian, negated");
                 },
                 [](const ExperimentSpec& s) {
                   return std::string(s.run.weights.orientation == WeightOrientation::utopian ? "utopian" : "negated");
                 }});
    k.push_back({"eps_schedule", "taper, constant",
                 [](ExperimentSpec& s, const std::string& v) {
                   const auto n = lower(v);
                   if (n == "taper") s.run.eps.kind = EpsSchedule::Kind::taper;
                   else if (n == "constant") s.run.eps.kind = EpsSchedule::Kind::constant;
                   else bad_value("eps_schedule", v, "taper, constant");
                 },
                 [](const ExperimentSpec& s) {
                   return std::string(s.run.eps.kind == EpsSchedule::Kind::taper ? "taper" : "constant");
                 }});
    real_key("eps", 0, inf, "real >= 0", [](ExperimentSpec& s) -> double& { return s.run.eps.constant; });
    real_key("eps_hi", 1e-300, inf, "real > 0", [](ExperimentSpec& s) -> double& { return s.run.eps.hi; });
    real_key("eps_lo", 1e-300, inf, "real > 0", [](ExperimentSpec& s) -> double& { return s.run.eps.lo; });
    size_key("eps_t_start", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.run.eps.t_start; });
    size_key("eps_t_end", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.run.eps.t_end; });
    k.push_back({"counter_mode", "accepted, evaluations",
                 [](ExperimentSpec& s, const std::string& v) {
                   const auto n = lower(v);
                   if (n == "accepted") s.run.counter_mode = CounterMode::accepted;
                   else if (n == "evaluations") s.run.counter_mode = CounterMode::evaluations;
                   else bad_value("counter_mode", v, "accepted, evaluations");
                 },
                 [](const ExperimentSpec& s) {
                   return std::string(s.run.counter_mode == CounterMode::accepted ? "accepted" : "evaluations");
                 }});
    size_key("max_flips", 0, "integer >= 0", [](ExperimentSpec& s) -> std::size_t& { return s.run.max_flips; });
    uint_key("seed", 0, umax, "integer >= 0", [](ExperimentSpec& s) -> std::uint64_t& { return s.run.seed; });
    size_key("threads", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.run.threads; });
    size_key("sweep_count", 2, "integer >= 2", [](ExperimentSpec& s) -> std::size_t& { return s.run.sweep_count; });
    k.push_back({"soga_budget", "full, shared",
                 [](ExperimentSpec& s, const std::string& v) {
                   const auto n = lower(v);
                   if (n == "full") s.run.soga_budget = SogaBudget::full;
                   else if (n == "shared") s.run.soga_budget = SogaBudget::shared;
                   else bad_value("soga_budget", v, "full, shared");
                 },
                 [](const ExperimentSpec& s) { return std::string(s.run.soga_budget == SogaBudget::full ? "full" : "shared"); }});
    k.push_back({"archive_mode", "accepted, endpoints",
                 [](ExperimentSpec& s, const std::string& v) {
                   const auto n = lower(v);
                   if (n == "accepted") s.run.archive_mode = ArchiveMode::accepted;
                   else if (n == "endpoints") s.run.archive_mode = ArchiveMode::endpoints;
                   else bad_value("archive_mode", v, "accepted, endpoints");
                 },
                 [](const ExperimentSpec& s) {
                   return std::string(s.run.archive_mode == ArchiveMode::accepted ? "accepted" : "endpoints");
                 }});
    bool_key("memoize", [](ExperimentSpec& s) -> bool& { return s.run.memoize; });
    bool_key("adapt_weights", [](ExperimentSpec& s) -> bool& { return s.run.adapt_weights; });
    bool_key("local_search", [](ExperimentSpec& s) -> bool& { return s.run.local_search; });
    size_key("evaluation_budget", 0, "integer >= 0 (0 = none)", [](ExperimentSpec& s) -> std::size_t& { return s.run.evaluation_budget; });
    size_key("perturbation_budget", 0, "integer >= 0 (0 = none)",
             [](ExperimentSpec& s) -> std::size_t& { return s.run.perturbation_budget; });
    bool_key("record_weights", [](ExperimentSpec& s) -> bool& { return s.run.record_weights; });
    size_key("repetitions", 1, "integer >= 1", [](ExperimentSpec& s) -> std::size_t& { return s.repetitions; });
    k.push_back({"out", "non-empty path",
                 [](ExperimentSpec& s, const std::string& v) {
                   if (v.empty()) bad_value("out", v, "non-empty path");
                   s.out = v;
                 },
                 [](const ExperimentSpec& s) { return s.out; }});
    k.push_back({"oracle_front", "path to a front CSV, or empty", [](ExperimentSpec& s, const std::string& v) { s.oracle_front = v; },
                 [](const ExperimentSpec& s) { return s.oracle_front; }});
    bool_key("budget_parity", [](ExperimentSpec& s) -> bool& { return s.budget_parity; });
    return k;
  }();
  return keys;
}

inline const ConfigKey* find_config_key(const std::string& name) {
  for (const auto& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

/// Sets one key; unknown keys and out-of-range values throw ConfigError.
inline void apply_setting(ExperimentSpec& s, const std::string& key, const std::string& value) {
  const auto* k = find_config_key(key);
  if (!k) throw ConfigError("unknown key '" + key + "'");
  k->set(s, value);
}

/// Cross-field checks after all keys are applied.
inline void validate(const ExperimentSpec& s) {
  if (s.algorithms.empty()) throw ConfigError("key 'algorithms': must not be empty");
  s.run.validate();
}

/// Absent keys keep the values of `base`.
inline ExperimentSpec parse_config_text(std::istream& in, const std::string& origin = "<config>", ExperimentSpec base = {}) {
  ExperimentSpec s = std::move(base);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    try {
      apply_setting(s, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate(s);
  return s;
}

inline ExperimentSpec parse_config(const std::string& path, ExperimentSpec base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  return parse_config_text(in, path, std::move(base));
}

/// key = value text that parses back to the same spec.
inline std::string echo(const ExperimentSpec& s) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(s) + "\n";
  return out;
}

inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : config_keys()) {
    const auto v = k.get(s);
    if (k.accepted == "true, false" || (!v.empty() && nlohmann::json::accept(v) && v.front() != '"'))
      j[k.name] = nlohmann::json::parse(v);
    else
      j[k.name] = v;
  }
  j["problem_descriptor"] = to_json(s.run.problem);
  return j;
}

}  // namespace moma
