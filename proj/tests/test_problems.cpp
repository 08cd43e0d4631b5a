#include <cmath>
#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "moma/metrics.hpp"
#include "moma/problems.hpp"

using namespace moma;

namespace {

Genome random_genome(const Problem& p, std::mt19937_64& gen) {
  std::vector<std::uint8_t> b(p.dof());
  for (auto& x : b) x = gen() & 1;
  return Genome(b, p.fixed_mask());
}

ResonatorSystem tiny(const CMatrix& z) {
  ResonatorSystem s;
  s.nx = static_cast<std::size_t>(z.rows());
  s.ny = 1;
  s.z = std::make_shared<CMatrix>(z);
  s.port = 0;
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Lotz, Examples) {
  EXPECT_EQ(lotz_evaluate(Genome::from_string("1100")), (ObjectiveVector{2, 2}));
  EXPECT_EQ(lotz_evaluate(Genome::from_string("1111")), (ObjectiveVector{0, 4}));
  EXPECT_EQ(lotz_evaluate(Genome::from_string("0000")), (ObjectiveVector{4, 0}));
}

TEST(Lotz, FrontByEnumeration) {
  for (std::size_t n : {4u, 8u}) {
    ObjectiveMatrix all;
    for (std::uint32_t x = 0; x < (1u << n); ++x) {
      Genome g(n);
      for (std::size_t i = 0; i < n; ++i)
        if (x >> i & 1) g.set(i, true);
      all.push_back(lotz_evaluate(g));
    }
    auto front = objectives_of(make_archive(all).entries());
    std::sort(front.begin(), front.end());
    auto truth = *LotzProblem(n).true_front();
    std::sort(truth.begin(), truth.end());
    EXPECT_EQ(front, truth);
    EXPECT_EQ(truth.size(), n + 1);
  }
}

TEST(Knapsack, Examples) {
  const std::vector<double> v{3, 5, 7}, w{2, 4, 6};
  EXPECT_EQ(knapsack_evaluate(Genome(3), v, w), (ObjectiveVector{0, 0}));
  EXPECT_EQ(knapsack_evaluate(Genome::from_string("111"), v, w), (ObjectiveVector{-15, 12}));
}

TEST(Knapsack, FrontByEnumeration) {
  const auto p = KnapsackProblem::random(12, 3);
  ObjectiveMatrix all;
  for (std::uint32_t x = 0; x < (1u << 12); ++x) {
    Genome g(12);
    for (std::size_t i = 0; i < 12; ++i)
      if (x >> i & 1) g.set(i, true);
    all.push_back(p.evaluate(g));
  }
  ObjectiveMatrix nd;
  for (const auto& a : all) {
    bool dom = false;
    for (const auto& b : all) dom |= dominates(b, a);
    if (!dom) nd.push_back(a);
  }
  std::sort(nd.begin(), nd.end());
  nd.erase(std::unique(nd.begin(), nd.end()), nd.end());
  auto truth = *p.true_front();
  std::sort(truth.begin(), truth.end());
  EXPECT_EQ(truth, nd);
}

TEST(Knapsack, SessionMatchesEvaluate) {
  std::mt19937_64 gen(1);
  const auto p = KnapsackProblem::random(20, 7);
  auto g = random_genome(p, gen);
  auto s = p.session(g);
  for (int step = 0; step < 50; ++step) {
    const std::size_t k = gen() % 20;
    Genome h = s->genome();
    h.flip(k);
    EXPECT_EQ(*s->probe(k), p.evaluate(h));
    s->apply(k);
    EXPECT_EQ(s->objectives(), p.evaluate(s->genome()));
  }
}

TEST(ResonatorSolve, ScalarAndDiagonal) {
  CMatrix one(1, 1);
  one << 2.0;
  const auto i1 = *resonator_solve(Genome::from_string("1"), tiny(one));
  EXPECT_NEAR(std::abs(i1(0) - cplx(0.5)), 0, 1e-15);

  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = cplx(2, 1);
  d(1, 1) = cplx(4, 0);
  d(2, 2) = cplx(0, 5);
  auto sys = tiny(d);
  const auto i3 = *resonator_solve(Genome::from_string("111"), sys);
  EXPECT_NEAR(std::abs(i3(0) - 1.0 / cplx(2, 1)), 0, 1e-15);
  EXPECT_NEAR(std::abs(i3(1)), 0, 1e-15);
  EXPECT_NEAR(std::abs(i3(2)), 0, 1e-15);
  EXPECT_THROW(resonator_solve(Genome::from_string("011"), sys), ContractError);
}

TEST(ResonatorSolve, Residual) {
  const ResonatorProblem p(16, 8, 1, ResonatorObjectives::q_gamma_regularity);
  const auto& sys = p.system();
  std::mt19937_64 gen(2);
  std::vector<std::size_t> idx(sys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), gen);
  Genome g = Genome::empty_like(p.fixed_mask());
  for (std::size_t i = 0; g.active_count() < 30; ++i) g.set(idx[i], true);
  const auto cur = *p.solve(g);
  const auto act = g.active_indices();
  CVector v = CVector::Zero(30), r(30);
  for (std::size_t i = 0; i < 30; ++i) {
    if (act[i] == sys.port) v(i) = sys.v_in;
    r(i) = -v(i);
    for (std::size_t j = 0; j < 30; ++j) r(i) += (*sys.z)(act[i], act[j]) * cur(j);
  }
  EXPECT_LE(r.norm() / v.norm(), 1e-10);
}

TEST(ResonatorObjectives, PortAndRegularity) {
  EXPECT_NEAR(reflection_power(cplx(1.0 / 20.0), 1.0, 20.0), 0.0, 1e-15);
  EXPECT_NEAR(reflection_power(cplx(1e-12), 1.0, 20.0), 1.0, 1e-9);
  EXPECT_EQ(reflection_power(cplx(0.0), 1.0, 20.0), 1.0);
  const ResonatorProblem p(8, 4, 3, ResonatorObjectives::q_gamma_regularity);
  const Genome full(std::vector<std::uint8_t>(32, 1), p.fixed_mask());
  const auto m = p.measure(full);
  EXPECT_DOUBLE_EQ(m.size, 1.0);
  EXPECT_GE(m.regularity, 0.15);
  EXPECT_DOUBLE_EQ(m.regularity, 0.15);
  EXPECT_DOUBLE_EQ(p.evaluate(full)[0], 1.0);
  EXPECT_DOUBLE_EQ(regularity_measure(2, 4, 1, 4), 0.15 * 0.5 + 0.30 * 0.25);
}

TEST(ResonatorObjectives, QMatchesDenseRecomputation) {
  const ResonatorProblem p(16, 8, 1, ResonatorObjectives::q_gamma_regularity);
  const auto& sys = p.system();
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 5; ++rep) {
    const auto g = random_genome(p, gen);
    const auto act = g.active_indices();
    const auto k = static_cast<Eigen::Index>(act.size());
    CMatrix za(k, k);
    Eigen::MatrixXd wa(k, k), ra(k, k);
    CVector v = CVector::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (act[i] == sys.port) v(i) = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        za(i, j) = (*sys.z)(act[i], act[j]);
        wa(i, j) = sys.w_e(act[i], act[j]);
        ra(i, j) = sys.r_m(act[i], act[j]);
      }
    }
    const CVector cur = za.fullPivLu().solve(v);
    const double q = (cur.adjoint() * wa.cast<cplx>() * cur)(0, 0).real() / (cur.adjoint() * ra.cast<cplx>() * cur)(0, 0).real();
    EXPECT_LE(rel(p.measure(g).q, q), 1e-10);
    EXPECT_LE(rel(p.evaluate(g)[0], q / p.q_reference()), 1e-10);
  }
}

TEST(ResonatorSession, ProbesMatchDenseSolves) {
  for (auto kind : {ResonatorObjectives::q_size, ResonatorObjectives::q_gamma_regularity}) {
    const ResonatorProblem p(8, 4, 5, kind);
    std::mt19937_64 gen(6);
    auto s = p.session(random_genome(p, gen));
    for (int step = 0; step < 150; ++step) {
      for (std::size_t k = 0; k < p.dof(); ++k) {
        if (s->genome().is_fixed(k)) continue;
        Genome h = s->genome();
        h.flip(k);
        const auto want = p.evaluate(h);
        const auto got = *s->probe(k);
        for (std::size_t m = 0; m < want.size(); ++m) EXPECT_LE(std::abs(got[m] - want[m]), 1e-9 * std::max(1.0, std::abs(want[m])));
      }
      std::size_t k = gen() % p.dof();
      if (s->genome().is_fixed(k)) continue;
      s->apply(k);
      const auto want = p.evaluate(s->genome());
      for (std::size_t m = 0; m < want.size(); ++m) EXPECT_LE(std::abs(s->objectives()[m] - want[m]), 1e-9 * std::max(1.0, std::abs(want[m])));
    }
  }
}

TEST(MakeInstance, Examples) {
  const auto lotz = make_instance({.name = "lotz", .seed = 42, .n = 16});
  EXPECT_EQ(lotz->objective_count(), 2u);
  EXPECT_EQ(lotz->dof(), 16u);
  for (auto b : lotz->fixed_mask()) EXPECT_EQ(b, 0);

  const auto r1 = make_instance({.name = "resonator", .seed = 9, .nx = 16, .ny = 8});
  const auto r2 = make_instance({.name = "resonator", .seed = 9, .nx = 16, .ny = 8});
  EXPECT_EQ(r1->objective_count(), 3u);
  EXPECT_EQ(r1->dof(), 128u);
  EXPECT_EQ(std::count(r1->fixed_mask().begin(), r1->fixed_mask().end(), 1), 1);
  const auto& a = dynamic_cast<const ResonatorProblem&>(*r1).system();
  const auto& b = dynamic_cast<const ResonatorProblem&>(*r2).system();
  EXPECT_TRUE(*a.z == *b.z);
  EXPECT_TRUE(a.w_e == b.w_e);
  std::mt19937_64 gen(1);
  const auto g = random_genome(*r1, gen);
  EXPECT_EQ(r1->evaluate(g), r2->evaluate(g));
  EXPECT_EQ(r1->descriptor(), r2->descriptor());

  const auto k1 = make_instance({.name = "knapsack", .seed = 7, .n = 20});
  const auto k2 = make_instance(k1->descriptor());
  EXPECT_EQ(*k1->true_front(), *k2->true_front());
  EXPECT_THROW(make_instance({.name = "tsp", .n = 5}), ConfigError);
}
