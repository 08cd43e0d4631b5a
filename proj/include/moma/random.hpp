#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace moma {

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix64(master);
  for (auto t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

/// Seeded random stream. The helpers below avoid the implementation-defined
/// std:: distributions so golden values are identical across standard libraries.
class Rng {
 public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    // Lemire's nearly-divisionless rejection.
    const std::uint64_t range = n;
    std::uint64_t x = engine_();
    __uint128_t m = static_cast<__uint128_t>(x) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        x = engine_();
        m = static_cast<__uint128_t>(x) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    // Box-Muller, one value per call.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform point on the (m-1)-simplex, i.e. Dirichlet(1, ..., 1).
  std::vector<double> dirichlet(std::size_t m) {
    std::vector<double> d(m);
    double sum = 0.0;
    for (auto& v : d) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      v = -std::log(u);
      sum += v;
    }
    for (auto& v : d) v /= sum;
    return d;
  }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) std::swap(first[i - 1], first[index(i)]);
  }

 private:
  engine_type engine_;
};

}  // namespace moma
