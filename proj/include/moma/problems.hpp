#pragma once

// Test problems: LOTZ and bi-objective 0/1 knapsack (exact fronts known), and
// a synthetic resonator whose objectives are built from a complex symmetric
// linear system over the active pixels of a rectangular grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "moma/errors.hpp"
#include "moma/genome.hpp"
#include "moma/objectives.hpp"
#include "moma/problem.hpp"
#include "moma/random.hpp"
#include "moma/rank1.hpp"

namespace moma {

// ---------------------------------------------------------------- LOTZ

inline std::size_t leading_ones(const Genome& g) {
  std::size_t k = 0;
  while (k < g.size() && g[k]) ++k;
  return k;
}

inline std::size_t trailing_zeros(const Genome& g) {
  std::size_t k = 0;
  while (k < g.size() && !g[g.size() - 1 - k]) ++k;
  return k;
}

/// f = (n - LeadingOnes, n - TrailingZeros); front = {1^k 0^(n-k)}.
inline ObjectiveVector lotz_evaluate(const Genome& g) {
  const auto n = static_cast<double>(g.size());
  return {n - static_cast<double>(leading_ones(g)), n - static_cast<double>(trailing_zeros(g))};
}

class LotzProblem final : public Problem {
 public:
  LotzProblem(std::size_t n, std::uint64_t seed = 0) : n_(n), seed_(seed), mask_(n, 0) {
    if (n == 0) throw ConfigError("lotz: n must be positive");
  }

  std::string name() const override { return "lotz"; }
  std::size_t dof() const override { return n_; }
  std::size_t objective_count() const override { return 2; }
  const std::vector<std::uint8_t>& fixed_mask() const override { return mask_; }
  ObjectiveVector evaluate(const Genome& g) const override { return lotz_evaluate(g); }
  InstanceDescriptor descriptor() const override { return {.name = "lotz", .seed = seed_, .n = n_}; }

  ObjectiveVector reference_point() const override {
    const auto r = static_cast<double>(n_ + 1);
    return {r, r};
  }

  std::optional<ObjectiveMatrix> true_front() const override {
    ObjectiveMatrix f;
    for (std::size_t k = 0; k <= n_; ++k) f.push_back({static_cast<double>(n_ - k), static_cast<double>(k)});
    return f;
  }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> mask_;
};

// ---------------------------------------------------------------- knapsack

/// f = (-sum of selected values, sum of selected weights).
inline ObjectiveVector knapsack_evaluate(const Genome& g, const std::vector<double>& values, const std::vector<double>& weights) {
  if (values.size() != g.size() || weights.size() != g.size()) throw ContractError("knapsack: item count mismatch");
  double v = 0.0, w = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i]) {
      v += values[i];
      w += weights[i];
    }
  return {-v, w};
}

/// Exact front by enumerating all 2^n subsets (Gray-code order, integer data
/// keeps the sums exact). Returned sorted by weight ascending.
inline ObjectiveMatrix knapsack_front_bruteforce(const std::vector<double>& values, const std::vector<double>& weights) {
  const std::size_t n = values.size();
  if (n > 26) throw ConfigError("knapsack brute force limited to n <= 26");
  std::vector<std::pair<double, double>> pts;  // (weight, value)
  pts.reserve(std::size_t{1} << n);
  double v = 0.0, w = 0.0;
  std::vector<std::uint8_t> in(n, 0);
  pts.emplace_back(0.0, 0.0);
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << n); ++i) {
    const auto bit = static_cast<std::size_t>(__builtin_ctzll(i));
    if (in[bit]) {
      v -= values[bit];
      w -= weights[bit];
    } else {
      v += values[bit];
      w += weights[bit];
    }
    in[bit] ^= 1;
    pts.emplace_back(w, v);
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first != b.first ? a.first < b.first : a.second > b.second; });
  ObjectiveMatrix front;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& [pw, pv] : pts)
    if (pv > best_value) {
      best_value = pv;
      front.push_back({-pv, pw});
    }
  return front;
}

class KnapsackProblem final : public Problem {
 public:
  KnapsackProblem(std::vector<double> values, std::vector<double> weights, std::uint64_t seed = 0)
      : values_(std::move(values)), weights_(std::move(weights)), seed_(seed), mask_(values_.size(), 0) {
    if (values_.empty() || values_.size() != weights_.size()) throw ConfigError("knapsack: need matching non-empty item lists");
  }

  /// Uncorrelated instance: integer values and weights uniform in [10, 100].
  static KnapsackProblem random(std::size_t n, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x6b6e6170ULL}));
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = static_cast<double>(10 + rng.index(91));
      w[i] = static_cast<double>(10 + rng.index(91));
    }
    return KnapsackProblem(std::move(v), std::move(w), seed);
  }

  std::string name() const override { return "knapsack"; }
  std::size_t dof() const override { return values_.size(); }
  std::size_t objective_count() const override { return 2; }
  const std::vector<std::uint8_t>& fixed_mask() const override { return mask_; }
  ObjectiveVector evaluate(const Genome& g) const override { return knapsack_evaluate(g, values_, weights_); }
  InstanceDescriptor descriptor() const override { return {.name = "knapsack", .seed = seed_, .n = values_.size()}; }

  ObjectiveVector reference_point() const override {
    return {1.0, std::accumulate(weights_.begin(), weights_.end(), 0.0) + 1.0};
  }

  std::optional<ObjectiveMatrix> true_front() const override {
    if (values_.size() > 26) return std::nullopt;
    if (!front_) front_ = std::make_shared<ObjectiveMatrix>(knapsack_front_bruteforce(values_, weights_));
    return *front_;
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }

  std::unique_ptr<FlipSession> session(const Genome& g) const override;

 private:
  std::vector<double> values_, weights_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> mask_;
  mutable std::shared_ptr<ObjectiveMatrix> front_;
};

class KnapsackSession final : public FlipSession {
 public:
  KnapsackSession(const KnapsackProblem& p, Genome g) : p_(&p), g_(std::move(g)), f_(p.evaluate(g_)) {}
  const Genome& genome() const override { return g_; }
  const ObjectiveVector& objectives() const override { return f_; }
  std::optional<ObjectiveVector> probe(std::size_t k) override {
    const double s = g_[k] ? -1.0 : 1.0;
    return ObjectiveVector{f_[0] - s * p_->values()[k], f_[1] + s * p_->weights()[k]};
  }
  void apply(std::size_t k) override {
    f_ = *probe(k);
    g_.flip(k);
  }

 private:
  const KnapsackProblem* p_;
  Genome g_;
  ObjectiveVector f_;
};

inline std::unique_ptr<FlipSession> KnapsackProblem::session(const Genome& g) const {
  return std::make_unique<KnapsackSession>(*this, g);
}

// ---------------------------------------------------------------- resonator

/// a * b for real a and complex b as two real products.
inline CMatrix real_times(const Eigen::MatrixXd& a, const CMatrix& b) {
  CMatrix r(a.rows(), b.cols());
  r.real() = a * b.real();
  r.imag() = a * b.imag();
  return r;
}

/// Synthetic stand-in for a method-of-moments system on a pixel grid.
/// Z = R + jX is complex symmetric with R symmetric positive definite, so
/// every principal submatrix is nonsingular; W is a positive semidefinite
/// stored-energy form. One pixel on the long edge is the driven port.
struct ResonatorSystem {
  std::size_t nx = 0, ny = 0;
  ElementGeometry geometry;
  DistanceMatrix distance;
  std::shared_ptr<const CMatrix> z;
  Eigen::MatrixXd w_e;
  Eigen::MatrixXd r_m;
  std::size_t port = 0;
  double v_in = 1.0;
  double z0 = 20.0;
  double condition = 0.0;  ///< 2-norm condition number of Z

  std::size_t size() const { return nx * ny; }

  /// Neighbor pairs (p, q), p < q, of the 4-connected pixel grid.
  std::vector<std::pair<std::size_t, std::size_t>> grid_edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t r = 0; r < ny; ++r)
      for (std::size_t c = 0; c < nx; ++c) {
        const std::size_t p = r * nx + c;
        if (c + 1 < nx) e.emplace_back(p, p + 1);
        if (r + 1 < ny) e.emplace_back(p, p + nx);
      }
    return e;
  }

  static ResonatorSystem make(std::size_t nx, std::size_t ny, std::uint64_t seed, double z0 = 20.0) {
    if (nx < 2 || ny < 1) throw ConfigError("resonator: grid must be at least 2x1");
    ResonatorSystem s;
    s.nx = nx;
    s.ny = ny;
    s.z0 = z0;
    const double width = 2.0, height = width * static_cast<double>(ny) / static_cast<double>(nx);
    s.geometry = ElementGeometry::pixel_grid(nx, ny, width, height);
    s.distance = build_distance_matrix(s.geometry);
    s.port = nx / 2;  // middle of the bottom long edge
    const std::size_t n = nx * ny;
    const double h = width / static_cast<double>(nx);
    auto center = [&](std::size_t p) {
      return std::array<double, 2>{(static_cast<double>(p % nx) + 0.5) * h, (static_cast<double>(p / nx) + 0.5) * h};
    };

    Rng rng(derive_seed(seed, {0x7265736fULL}));
    const double extent = static_cast<double>(std::max(nx, ny));
    // R: broad coherent kernel plus a ridge. X: capacitive grid-graph term
    // plus a long-range inductive term and short-range noise.
    const double r_amp = 1.0, r_len = 3.0 * extent, r_ridge = 0.005;
    const double w_len = 1.0;
    const double x_cap = 5.0, x_mass = 0.01, x_ind = 2.0, x_len = extent, x_noise = 0.3;

    Eigen::MatrixXd r(n, n), w(n, n), x(n, n);
    std::vector<double> self_w(n);
    for (std::size_t p = 0; p < n; ++p) self_w[p] = 0.5 + 0.5 * rng.uniform();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p; q < n; ++q) {
        const auto cp = center(p), cq = center(q);
        const double d = std::hypot(cp[0] - cq[0], cp[1] - cq[1]) / h;
        const bool adjacent = std::abs(d - 1.0) < 1e-9;
        const double lap = p == q ? 4.0 + x_mass : (adjacent ? -1.0 : 0.0);
        const double noise = p == q ? 0.0 : x_noise * rng.normal() * std::exp(-d);
        r(p, q) = r(q, p) = r_amp * std::exp(-(d / r_len) * (d / r_len)) + (p == q ? r_ridge : 0.0);
        w(p, q) = w(q, p) = std::exp(-(d / w_len) * (d / w_len)) + (p == q ? self_w[p] : 0.0);
        x(p, q) = x(q, p) = x_ind * std::exp(-(d / x_len) * (d / x_len)) - x_cap * lap + noise;
      }
    auto zm = std::make_shared<CMatrix>(n, n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) (*zm)(p, q) = cplx(r(p, q), x(p, q));
    s.r_m = std::move(r);
    s.w_e = std::move(w);
    Eigen::JacobiSVD<CMatrix> svd(*zm);
    const auto& sv = svd.singularValues();
    s.condition = sv(0) / sv(sv.size() - 1);
    if (!(s.condition <= 1e6)) throw ConfigError("resonator: generated system is ill-conditioned");
    s.z = std::move(zm);
    return s;
  }
};

/// Direct dense solve of Z_aa I = V_a over the active pixels; nullopt when
/// Z_aa is numerically singular.
inline std::optional<CVector> resonator_solve(const Genome& g, const ResonatorSystem& sys) {
  if (g.size() != sys.size()) throw ContractError("resonator: genome length mismatch");
  if (!g[sys.port]) throw ContractError("resonator: driven port must be active");
  const auto act = g.active_indices();
  const auto k = static_cast<Eigen::Index>(act.size());
  CMatrix za(k, k);
  CVector v = CVector::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) za(i, j) = (*sys.z)(static_cast<Eigen::Index>(act[i]), static_cast<Eigen::Index>(act[j]));
    if (act[i] == sys.port) v(i) = sys.v_in;
  }
  Eigen::PartialPivLU<CMatrix> lu(za);
  if (std::abs(lu.determinant()) < 1e-300) return std::nullopt;
  return CVector(lu.solve(v));
}

/// Which objective set a resonator problem exposes.
enum class ResonatorObjectives {
  q_size,              ///< (Q / Q_ref, a / a_0)
  q_gamma_regularity,  ///< (Q / Q_ref, |Gamma|^2, R)
};

struct ResonatorMeasures {
  double q = 0.0;      ///< unnormalized W/R quadratic-form ratio
  cplx i_in{0.0, 0.0};
  double gamma2 = 1.0;
  double size = 0.0;   ///< a_n / a_0
  double regularity = 0.0;
  bool feasible = true;
};

/// Reflection |Gamma|^2 for port current i_in; a vanishing current is total mismatch.
inline double reflection_power(cplx i_in, double v_in, double z0) {
  if (std::abs(i_in) < 1e-15) return 1.0;
  const cplx zin = v_in / i_in;
  return std::norm((zin - z0) / (zin + z0));
}

/// Regularity 0.15 A_n/A_0 + 0.30 h_n with h_n the fraction of grid
/// neighbor pairs whose states differ (a boundary-length smoothness proxy).
inline double regularity_measure(std::size_t active, std::size_t total, std::size_t transitions, std::size_t edges) {
  const double area = static_cast<double>(active) / static_cast<double>(total);
  const double h = edges ? static_cast<double>(transitions) / static_cast<double>(edges) : 0.0;
  return 0.15 * area + 0.30 * h;
}

class ResonatorProblem final : public Problem {
 public:
  ResonatorProblem(std::size_t nx, std::size_t ny, std::uint64_t seed, ResonatorObjectives kind, double z0 = 20.0)
      : sys_(ResonatorSystem::make(nx, ny, seed, z0)), seed_(seed), kind_(kind), mask_(nx * ny, 0) {
    mask_[sys_.port] = 1;
    edges_ = sys_.grid_edges();
    neighbors_.resize(sys_.size());
    for (auto [p, q] : edges_) {
      neighbors_[p].push_back(q);
      neighbors_[q].push_back(p);
    }
    const Genome full(std::vector<std::uint8_t>(sys_.size(), 1), mask_);
    a0_ = circumscribing_radius(full, sys_.distance);
    q_ref_ = 1.0;
    const auto full_m = measure(full);
    q_ref_ = full_m.q;
    // Infeasible genomes score 10x the worst of the full and feed-only shapes.
    const auto feed_only = measure(Genome::empty_like(mask_));
    const auto fa = to_objectives(full_m), fb = to_objectives(feed_only);
    sentinel_.resize(fa.size());
    for (std::size_t m = 0; m < fa.size(); ++m) sentinel_[m] = 10.0 * std::max({fa[m], fb[m], 1.0});
    const double q_feed = feed_only.q / q_ref_;
    hv_q_ = 1.1 * (kind_ == ResonatorObjectives::q_size ? q_feed : std::max(q_feed, 1.0));
  }

  std::string name() const override { return kind_ == ResonatorObjectives::q_size ? "resonator-size" : "resonator"; }
  std::size_t dof() const override { return sys_.size(); }
  std::size_t objective_count() const override { return kind_ == ResonatorObjectives::q_size ? 2 : 3; }
  const std::vector<std::uint8_t>& fixed_mask() const override { return mask_; }
  InstanceDescriptor descriptor() const override {
    return {.name = name(), .seed = seed_, .nx = sys_.nx, .ny = sys_.ny, .z0 = sys_.z0};
  }

  ObjectiveVector reference_point() const override {
    if (kind_ == ResonatorObjectives::q_size) return {hv_q_, 1.1};
    return {hv_q_, 1.0, 0.45};
  }

  ObjectiveVector evaluate(const Genome& g) const override {
    const auto m = measure(g);
    return m.feasible ? to_objectives(m) : sentinel_;
  }

  std::optional<CVector> solve(const Genome& g) const { return resonator_solve(g, sys_); }

  ResonatorMeasures measure(const Genome& g) const {
    ResonatorMeasures m;
    const auto sol = solve(g);
    if (!sol) {
      m.feasible = false;
      return m;
    }
    const auto act = g.active_indices();
    const CVector& cur = *sol;
    const auto k = static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXd wa(k, k), ra(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        wa(i, j) = sys_.w_e(static_cast<Eigen::Index>(act[i]), static_cast<Eigen::Index>(act[j]));
        ra(i, j) = sys_.r_m(static_cast<Eigen::Index>(act[i]), static_cast<Eigen::Index>(act[j]));
      }
    const double qw = cur.dot(wa.cast<cplx>() * cur).real();
    const double qr = cur.dot(ra.cast<cplx>() * cur).real();
    m.q = qw / qr;
    for (Eigen::Index i = 0; i < k; ++i)
      if (act[i] == sys_.port) m.i_in = cur(i);
    m.gamma2 = reflection_power(m.i_in, sys_.v_in, sys_.z0);
    m.size = circumscribing_radius(g, sys_.distance) / a0_;
    std::size_t transitions = 0;
    for (auto [p, q] : edges_) transitions += g[p] != g[q];
    m.regularity = regularity_measure(act.size(), sys_.size(), transitions, edges_.size());
    return m;
  }

  ObjectiveVector to_objectives(const ResonatorMeasures& m) const {
    if (kind_ == ResonatorObjectives::q_size) return {m.q / q_ref_, m.size};
    return {m.q / q_ref_, m.gamma2, m.regularity};
  }

  std::unique_ptr<FlipSession> session(const Genome& g) const override;

  const ResonatorSystem& system() const { return sys_; }
  ResonatorObjectives kind() const { return kind_; }
  double q_reference() const { return q_ref_; }
  double a0() const { return a0_; }
  const ObjectiveVector& sentinel() const { return sentinel_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  const std::vector<std::vector<std::size_t>>& neighbors() const { return neighbors_; }

  /// Cross-check every accepted incremental state against a dense solve.
  void set_cross_validation(bool on) { cross_validate_ = on; }
  bool cross_validation() const { return cross_validate_; }


 private:
  ResonatorSystem sys_;
  std::uint64_t seed_;
  ResonatorObjectives kind_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
  double a0_ = 1.0;
  double q_ref_ = 1.0;
  ObjectiveVector sentinel_;
  double hv_q_ = 1.0;
  bool cross_validate_ = false;
};

/// Incremental resonator state. The inverse of Z_aa is tracked by bordering
/// updates; each neighborhood scan precomputes W Y, R Y and Y Z[a, c] for the
/// inactive pixels c so that every probe costs O(active).
class ResonatorSession final : public FlipSession {
 public:
  static constexpr std::size_t kRefactorInterval = 64;

  ResonatorSession(const ResonatorProblem& p, Genome g)
      : p_(&p), g_(std::move(g)), inv_(p.system().z, g_.active_indices()), radius_(p.system().distance, g_) {
    if (!g_[p.system().port]) throw ContractError("resonator: driven port must be active");
    active_count_ = g_.active_count();
    for (auto [a, b] : p.edges()) transitions_ += g_[a] != g_[b];
    refresh_state();
  }

  const Genome& genome() const override { return g_; }
  const ObjectiveVector& objectives() const override { return f_; }

  std::optional<ObjectiveVector> probe(std::size_t k) override {
    if (!scan_ready_) prepare_scan();
    const auto& sys = p_->system();
    ResonatorMeasures m;
    const auto port_pos = static_cast<Eigen::Index>(inv_.position(sys.port));
    if (g_[k]) {
      const auto pk = static_cast<Eigen::Index>(inv_.position(k));
      const cplx piv = inv_.inverse()(pk, pk);
      if (std::abs(piv) < kSingularPivot) return std::nullopt;
      const cplx c = cur_(pk) / piv;
      const auto y = inv_.inverse().col(pk);
      const double qw = iwi_ - 2.0 * std::real(c * wi_.dot(y)) + std::norm(c) * y.dot(wy_.col(pk)).real();
      const double qr = iri_ - 2.0 * std::real(c * ri_.dot(y)) + std::norm(c) * y.dot(ry_.col(pk)).real();
      m.q = qw / qr;
      m.i_in = cur_(port_pos) - c * y(port_pos);
    } else {
      const auto col = static_cast<Eigen::Index>(inactive_pos_[k]);
      const auto kk = static_cast<Eigen::Index>(k);
      const auto u = u_.col(col);
      const cplx s = (*sys.z)(kk, kk) - (b_.col(col).transpose() * u)(0, 0);
      if (std::abs(s) < kSingularPivot) return std::nullopt;
      const cplx yk = -(b_.col(col).transpose() * cur_)(0, 0) / s;
      // x = I - yk u on the old active set, yk on the new pixel.
      const auto wu = wu_.col(col);
      const auto ru = ru_.col(col);
      const double xwx = iwi_ - 2.0 * std::real(yk * wi_.dot(u)) + std::norm(yk) * u.dot(wu).real();
      const double xrx = iri_ - 2.0 * std::real(yk * ri_.dot(u)) + std::norm(yk) * u.dot(ru).real();
      const cplx wqx = wq_i_(col) - yk * wq_u_(col);
      const cplx rqx = rq_i_(col) - yk * rq_u_(col);
      const double wkk = sys.w_e(kk, kk), rkk = sys.r_m(kk, kk);
      const double qw = xwx + 2.0 * std::real(std::conj(yk) * wqx) + std::norm(yk) * wkk;
      const double qr = xrx + 2.0 * std::real(std::conj(yk) * rqx) + std::norm(yk) * rkk;
      m.q = qw / qr;
      m.i_in = cur_(port_pos) - yk * u(port_pos);
    }
    m.gamma2 = reflection_power(m.i_in, sys.v_in, sys.z0);
    if (p_->kind() == ResonatorObjectives::q_size) {
      m.size = radius_.probe(k) / p_->a0();
    } else {
      long dt = 0;
      for (std::size_t q : p_->neighbors()[k]) dt += g_[q] != g_[k] ? -1 : 1;
      const std::size_t na = g_[k] ? active_count_ - 1 : active_count_ + 1;
      m.regularity = regularity_measure(na, sys.size(), static_cast<std::size_t>(static_cast<long>(transitions_) + dt), p_->edges().size());
    }
    return p_->to_objectives(m);
  }

  void apply(std::size_t k) override {
    std::optional<ObjectiveVector> probed;
    if (p_->cross_validation()) probed = probe(k);
    for (std::size_t q : p_->neighbors()[k]) transitions_ += g_[q] != g_[k] ? -1 : 1;
    const bool ok = g_[k] ? inv_.remove(k) : inv_.add(k);
    if (!ok) throw ContractError("resonator: applied an infeasible flip");
    g_[k] ? --active_count_ : ++active_count_;
    g_.flip(k);
    radius_.apply(k);
    if (inv_.updates_since_refactor() >= kRefactorInterval) inv_.refactor();
    refresh_state();
    if (probed) {
      const auto direct = p_->evaluate(g_);
      for (std::size_t m = 0; m < direct.size(); ++m) {
        const double scale = std::max({std::abs(direct[m]), std::abs((*probed)[m]), 1e-300});
        max_cross_error_ = std::max({max_cross_error_, std::abs(direct[m] - (*probed)[m]) / scale,
                                     std::abs(direct[m] - f_[m]) / scale});
      }
    }
  }

  /// Largest relative disagreement seen between the incremental and dense
  /// evaluations (only tracked when cross validation is on).
  double max_cross_error() const { return max_cross_error_; }
  const InverseState& inverse_state() const { return inv_; }

 private:
  /// Current, quadratic forms and objectives from the tracked inverse.
  void refresh_state() {
    const auto& sys = p_->system();
    const auto& act = inv_.active();
    const auto k = static_cast<Eigen::Index>(act.size());
    wa_.resize(k, k);
    ra_.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        wa_(i, j) = sys.w_e(static_cast<Eigen::Index>(act[i]), static_cast<Eigen::Index>(act[j]));
        ra_(i, j) = sys.r_m(static_cast<Eigen::Index>(act[i]), static_cast<Eigen::Index>(act[j]));
      }
    const auto pp = static_cast<Eigen::Index>(inv_.position(sys.port));
    cur_ = inv_.inverse().col(pp) * sys.v_in;
    wi_ = real_times(wa_, cur_);
    ri_ = real_times(ra_, cur_);
    iwi_ = cur_.dot(wi_).real();
    iri_ = cur_.dot(ri_).real();
    ResonatorMeasures m;
    m.q = iwi_ / iri_;
    m.i_in = cur_(pp);
    m.gamma2 = reflection_power(m.i_in, sys.v_in, sys.z0);
    m.size = radius_.radius() / p_->a0();
    m.regularity = regularity_measure(active_count_, sys.size(), transitions_, p_->edges().size());
    f_ = p_->to_objectives(m);
    scan_ready_ = false;
  }

  void prepare_scan() {
    const auto& sys = p_->system();
    const auto& act = inv_.active();
    const auto k = static_cast<Eigen::Index>(act.size());
    const CMatrix& y = inv_.inverse();
    wy_ = real_times(wa_, y);
    ry_ = real_times(ra_, y);
    std::vector<std::size_t> inactive;
    inactive_pos_.assign(sys.size(), 0);
    for (std::size_t q = 0; q < sys.size(); ++q)
      if (!g_[q]) {
        inactive_pos_[q] = inactive.size();
        inactive.push_back(q);
      }
    const auto m = static_cast<Eigen::Index>(inactive.size());
    b_.resize(k, m);
    Eigen::MatrixXd wq(m, k), rq(m, k);
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto q = static_cast<Eigen::Index>(inactive[static_cast<std::size_t>(c)]);
      for (Eigen::Index i = 0; i < k; ++i) {
        const auto a = static_cast<Eigen::Index>(act[static_cast<std::size_t>(i)]);
        b_(i, c) = (*sys.z)(a, q);
        wq(c, i) = sys.w_e(q, a);
        rq(c, i) = sys.r_m(q, a);
      }
    }
    u_ = y * b_;
    wu_ = real_times(wa_, u_);
    ru_ = real_times(ra_, u_);
    wq_i_ = real_times(wq, cur_);
    rq_i_ = real_times(rq, cur_);
    wq_u_.resize(m);
    rq_u_.resize(m);
    for (Eigen::Index c = 0; c < m; ++c) {
      wq_u_(c) = cplx(wq.row(c).dot(u_.col(c).real()), wq.row(c).dot(u_.col(c).imag()));
      rq_u_(c) = cplx(rq.row(c).dot(u_.col(c).real()), rq.row(c).dot(u_.col(c).imag()));
    }
    scan_ready_ = true;
  }

  const ResonatorProblem* p_;
  Genome g_;
  InverseState inv_;
  RadiusTracker radius_;
  std::size_t active_count_ = 0;
  std::size_t transitions_ = 0;
  ObjectiveVector f_;

  Eigen::MatrixXd wa_, ra_;
  CVector cur_, wi_, ri_;
  double iwi_ = 0.0, iri_ = 0.0;

  bool scan_ready_ = false;
  CMatrix wy_, ry_, b_, u_, wu_, ru_;
  CVector wq_i_, rq_i_, wq_u_, rq_u_;
  std::vector<std::size_t> inactive_pos_;

  double max_cross_error_ = 0.0;
};

inline std::unique_ptr<FlipSession> ResonatorProblem::session(const Genome& g) const {
  return std::make_unique<ResonatorSession>(*this, g);
}

// ---------------------------------------------------------------- factory

/// Builds an instance from its descriptor. Known names: lotz, knapsack
/// (uses n), resonator and resonator-size (use nx, ny, z0).
inline std::unique_ptr<Problem> make_instance(const InstanceDescriptor& d) {
  if (d.name == "lotz") {
    if (d.n == 0) throw ConfigError("lotz: n must be positive");
    return std::make_unique<LotzProblem>(d.n, d.seed);
  }
  if (d.name == "knapsack") {
    if (d.n == 0) throw ConfigError("knapsack: n must be positive");
    return std::make_unique<KnapsackProblem>(KnapsackProblem::random(d.n, d.seed));
  }
  if (d.name == "resonator" || d.name == "resonator-size") {
    const auto kind = d.name == "resonator" ? ResonatorObjectives::q_gamma_regularity : ResonatorObjectives::q_size;
    return std::make_unique<ResonatorProblem>(d.nx ? d.nx : 16, d.ny ? d.ny : 8, d.seed, kind, d.z0);
  }
  throw ConfigError("unknown problem '" + d.name + "' (expected lotz, knapsack, resonator, resonator-size)");
}

}  // namespace moma
