#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "moma/genome.hpp"
#include "moma/objectives.hpp"
#include "moma/random.hpp"

namespace moma {

/// Seeded recipe from which an instance is rebuilt bit-identically.
struct InstanceDescriptor {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t n = 0;   ///< bit count for lotz / knapsack
  std::size_t nx = 0;  ///< pixel columns for resonator problems
  std::size_t ny = 0;  ///< pixel rows for resonator problems
  double z0 = 20.0;    ///< port reference impedance for resonator problems

  friend bool operator==(const InstanceDescriptor&, const InstanceDescriptor&) = default;
};

inline nlohmann::json to_json(const InstanceDescriptor& d) {
  nlohmann::json j{{"name", d.name}, {"seed", d.seed}};
  if (d.n) j["n"] = d.n;
  if (d.nx) {
    j["nx"] = d.nx;
    j["ny"] = d.ny;
    j["z0"] = d.z0;
  }
  return j;
}

inline InstanceDescriptor descriptor_from_json(const nlohmann::json& j) {
  InstanceDescriptor d;
  d.name = j.at("name").get<std::string>();
  d.seed = j.value("seed", std::uint64_t{0});
  d.n = j.value("n", std::size_t{0});
  d.nx = j.value("nx", std::size_t{0});
  d.ny = j.value("ny", std::size_t{0});
  d.z0 = j.value("z0", 20.0);
  return d;
}

/// Objective state of one genome under single-bit flips. Problems with
/// incremental structure override this; the default re-evaluates.
class FlipSession {
 public:
  virtual ~FlipSession() = default;
  virtual const Genome& genome() const = 0;
  virtual const ObjectiveVector& objectives() const = 0;
  /// Objectives after flipping bit k, or nullopt when that flip is infeasible.
  virtual std::optional<ObjectiveVector> probe(std::size_t k) = 0;
  /// Commits the flip of bit k (which must have probed feasible).
  virtual void apply(std::size_t k) = 0;
};

/// A binary multi-objective minimization problem.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dof() const = 0;
  virtual std::size_t objective_count() const = 0;
  virtual const std::vector<std::uint8_t>& fixed_mask() const = 0;
  virtual ObjectiveVector evaluate(const Genome& g) const = 0;
  virtual InstanceDescriptor descriptor() const = 0;

  /// Fixed reference point for hypervolume traces (componentwise upper bound
  /// of the interesting region).
  virtual ObjectiveVector reference_point() const = 0;

  /// The exact Pareto front when it is cheap to obtain.
  virtual std::optional<ObjectiveMatrix> true_front() const { return std::nullopt; }

  virtual std::unique_ptr<FlipSession> session(const Genome& g) const;

  /// Free bits drawn fair-coin, fixed bits set.
  Genome random_genome(Rng& rng) const {
    const auto& mask = fixed_mask();
    std::vector<std::uint8_t> bits(dof());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = mask[i] ? 1 : static_cast<std::uint8_t>(rng.bernoulli(0.5));
    return Genome(std::move(bits), mask);
  }
};

class ReevaluatingSession final : public FlipSession {
 public:
  ReevaluatingSession(const Problem& p, Genome g) : problem_(&p), genome_(std::move(g)), f_(p.evaluate(genome_)) {}

  const Genome& genome() const override { return genome_; }
  const ObjectiveVector& objectives() const override { return f_; }

  std::optional<ObjectiveVector> probe(std::size_t k) override {
    Genome g = genome_;
    g.flip(k);
    return problem_->evaluate(g);
  }

  void apply(std::size_t k) override {
    genome_.flip(k);
    f_ = problem_->evaluate(genome_);
  }

 private:
  const Problem* problem_;
  Genome genome_;
  ObjectiveVector f_;
};

inline std::unique_ptr<FlipSession> Problem::session(const Genome& g) const {
  return std::make_unique<ReevaluatingSession>(*this, g);
}

}  // namespace moma
