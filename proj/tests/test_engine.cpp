#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "moma/engine.hpp"

using namespace moma;

namespace {

std::string front_text(const RunResult& r, std::size_t m) {
  FrontArchive a = r.archive;
  a.sort();
  std::ostringstream os;
  write_front_csv(os, a, m);
  return os.str();
}

std::string trace_text(const RunResult& r) {
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  return os.str();
}

std::set<ObjectiveVector> as_set(const ObjectiveMatrix& f) { return {f.begin(), f.end()}; }

RunConfig lotz(std::size_t n, std::uint64_t seed) {
  RunConfig c;
  c.problem = {.name = "lotz", .n = n};
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Moma, LotzEightRecoversFront) {
  const LotzProblem p(8);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto r = run(p, lotz(8, s));
    EXPECT_EQ(as_set(r.archive.objectives()), as_set(*p.true_front())) << "seed " << s;
    EXPECT_EQ(r.iterations, 40u);
    EXPECT_EQ(r.trace.size(), 41u);
  }
}

TEST(Moma, ZeroIterationsIsFilteredInitialDescent) {
  const auto p = KnapsackProblem::random(14, 2);
  auto c = lotz(14, 3);
  c.problem = p.descriptor();
  c.iterations = 0;
  c.archive_mode = ArchiveMode::endpoints;
  const auto r = run(p, c);
  EXPECT_EQ(r.iterations, 0u);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(as_set(r.archive.objectives()), as_set(nondominated_filter(objectives_of(r.population))));
}

TEST(Moma, SameSeedBitIdentical) {
  const auto p = KnapsackProblem::random(16, 1);
  auto c = lotz(16, 11);
  c.problem = p.descriptor();
  c.iterations = 8;
  c.record_weights = true;
  const auto a = run(p, c), b = run(p, c);
  EXPECT_EQ(front_text(a, 2), front_text(b, 2));
  EXPECT_EQ(trace_text(a), trace_text(b));
  EXPECT_EQ(a.evaluations, b.evaluations);
  ASSERT_EQ(a.weight_history.size(), 9u);
  EXPECT_EQ(a.weight_history, b.weight_history);
  c.threads = 4;
  const auto t4 = run(p, c);
  EXPECT_EQ(front_text(a, 2), front_text(t4, 2));
  EXPECT_EQ(trace_text(a), trace_text(t4));
}

TEST(Moma, TraceIsMonotone) {
  const auto p = KnapsackProblem::random(18, 5);
  auto c = lotz(18, 2);
  c.problem = p.descriptor();
  c.iterations = 12;
  const auto r = run(p, c);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_EQ(r.trace[i].t, i);
    EXPECT_GE(r.trace[i].hv, r.trace[i - 1].hv);
    EXPECT_GE(r.trace[i].perturbations(), r.trace[i - 1].perturbations());
    EXPECT_GE(r.trace[i].evaluations, r.trace[i - 1].evaluations);
  }
  EXPECT_EQ(r.trace.back().hv, hypervolume(r.archive.objectives(), p.reference_point()).value);
  EXPECT_EQ(hv_at_perturbations(r.trace, r.trace.back().perturbations()), r.trace.back().hv);
  EXPECT_EQ(hv_at_perturbations(r.trace, 0), 0.0);
}

TEST(Moma, PerturbationBudgetStops) {
  const LotzProblem p(16);
  auto c = lotz(16, 1);
  c.iterations = 1000;
  c.perturbation_budget = 3000;
  const auto r = run(p, c);
  EXPECT_LT(r.iterations, 1000u);
  EXPECT_GE(r.perturbations(), 3000u);
}

TEST(Soga, ExtremeSweepFindsSingleObjectiveOptima) {
  const LotzProblem p(10);
  auto c = lotz(10, 4);
  c.algorithm = Algorithm::soga_fw;
  c.sweep_count = 2;
  const auto r = run(p, c);
  const auto f = as_set(r.archive.objectives());
  EXPECT_TRUE(f.count({0, 10}));
  EXPECT_TRUE(f.count({10, 0}));
}

TEST(Soga, SweepsEveryLatticePoint) {
  const LotzProblem p(8);
  auto c = lotz(8, 4);
  c.algorithm = Algorithm::soga_fw;
  c.sweep_count = 5;
  c.iterations = 3;
  const auto r = run(p, c);
  std::set<std::size_t> sweeps;
  for (const auto& row : r.trace) sweeps.insert(row.sweep);
  EXPECT_EQ(sweeps, (std::set<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(r.iterations, 15u);
  c.soga_budget = SogaBudget::shared;
  c.iterations = 10;
  EXPECT_EQ(run(p, c).iterations, 10u);
}

TEST(Soga, LotzFrontIsSubsetOfTruth) {
  const LotzProblem p(12);
  const auto truth = as_set(*p.true_front());
  for (std::uint64_t s = 1; s <= 3; ++s) {
    auto c = lotz(12, s);
    const auto m = run(p, c);
    c.algorithm = Algorithm::soga_fw;
    c.sweep_count = 5;
    c.soga_budget = SogaBudget::shared;
    const auto r = run(p, c);
    for (const auto& f : r.archive.objectives()) EXPECT_TRUE(truth.count(f));
    EXPECT_LE(r.archive.size(), m.archive.size());
    EXPECT_LT(r.evaluations, m.evaluations);
  }
}

TEST(Nsga2, DescentDominatesRawAtEqualIterations) {
  const LotzProblem p(16);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    auto c = lotz(16, s);
    const auto m = run(p, c);
    c.algorithm = Algorithm::nsga2;
    const auto n = run(p, c);
    EXPECT_GE(m.trace.back().hv, n.trace.back().hv);
    EXPECT_EQ(n.perturbations(), 0u);
    EXPECT_EQ(n.evaluations, 64u * 41u);
  }
}

TEST(Nsga2, SmokeAndDeterminism) {
  const LotzProblem p(16);
  auto c = lotz(16, 9);
  c.algorithm = Algorithm::nsga2;
  c.iterations = 1;
  c.agents = 4;
  const auto a = run(p, c), b = run(p, c);
  EXPECT_FALSE(a.archive.empty());
  EXPECT_EQ(front_text(a, 2), front_text(b, 2));
  EXPECT_EQ(a.population.size(), 4u);
}

TEST(Batch, SingleRepetitionEqualsRun) {
  auto c = lotz(10, 21);
  const auto b = run_batch(c, 1);
  const auto r = run(c);
  ASSERT_EQ(b.runs.size(), 1u);
  EXPECT_EQ(b.runs[0].seed, 21u);
  EXPECT_EQ(b.runs[0].n_nd, r.archive.size());
  EXPECT_EQ(b.runs[0].evaluations, r.evaluations);
  for (const auto& s : b.summary) {
    EXPECT_EQ(s.count, 1u);
    EXPECT_EQ(s.mean, s.spread.median);
    EXPECT_EQ(s.best, s.worst);
  }
}

TEST(Batch, SummaryRecomputedFromRunsCsv) {
  auto c = lotz(8, 100);
  c.iterations = 5;
  const auto b = run_batch(c, 30);
  std::stringstream runs, summary;
  write_runs_csv(runs, {b});
  write_summary_csv(summary, {b});
  std::string line;
  std::getline(runs, line);
  EXPECT_EQ(line, "algorithm,run,seed,status,hv,gd,n_nd,perturbations,evaluations,iterations,wall_seconds");
  std::vector<double> hv, gd;
  std::vector<std::uint64_t> seeds;
  while (std::getline(runs, line)) {
    std::vector<std::string> col;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) col.push_back(x);
    seeds.push_back(std::stoull(col[2]));
    hv.push_back(std::stod(col[4]));
    gd.push_back(std::stod(col[5]));
  }
  ASSERT_EQ(hv.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(seeds[i], 100 + i);
  std::sort(hv.begin(), hv.end());
  auto quart = [&](double p) {
    const double h = p * 29;
    const auto lo = static_cast<std::size_t>(h);
    return hv[lo] + (h - lo) * (hv[std::min<std::size_t>(lo + 1, 29)] - hv[lo]);
  };
  std::getline(summary, line);
  EXPECT_EQ(line, "algorithm,metric,count,mean,best,worst,min,q1,median,q3,max");
  bool seen = false;
  while (std::getline(summary, line)) {
    if (line.rfind("MOMA-AW,hv,", 0) != 0) continue;
    seen = true;
    std::vector<double> v;
    std::stringstream ls(line.substr(11));
    for (std::string x; std::getline(ls, x, ',');) v.push_back(std::stod(x));
    EXPECT_EQ(v[0], 30);
    EXPECT_NEAR(v[2], hv.back(), 1e-12);
    EXPECT_NEAR(v[3], hv.front(), 1e-12);
    EXPECT_NEAR(v[4], hv.front(), 1e-12);
    EXPECT_NEAR(v[5], quart(0.25), 1e-12);
    EXPECT_NEAR(v[6], quart(0.5), 1e-12);
    EXPECT_NEAR(v[7], quart(0.75), 1e-12);
    EXPECT_NEAR(v[8], hv.back(), 1e-12);
  }
  EXPECT_TRUE(seen);
  auto one = c;
  one.seed = 117;
  const auto again = run(one);
  EXPECT_EQ(b.runs[17].hv, hypervolume(again.archive.objectives(), LotzProblem(8).reference_point()).value);
  EXPECT_EQ(b.runs[17].n_nd, again.archive.size());
}

TEST(Batch, FailuresAreRecorded) {
  auto c = lotz(8, 1);
  c.problem.name = "nope";
  EXPECT_THROW(run_batch(c, 2), ConfigError);
  c = lotz(8, 1);
  c.agents = 1;
  EXPECT_THROW(run_batch(c, 2), ConfigError);
}

TEST(FiveNumber, LinearQuartiles) {
  const auto f = five_number({4, 1, 3, 2, 5});
  EXPECT_EQ(f.min, 1);
  EXPECT_EQ(f.q1, 2);
  EXPECT_EQ(f.median, 3);
  EXPECT_EQ(f.q3, 4);
  EXPECT_EQ(f.max, 5);
  EXPECT_DOUBLE_EQ(five_number({1, 2}).median, 1.5);
}
