// Small seeded generators for the property tests.
#pragma once

#include "invasion/grid.hpp"
#include "invasion/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace testgen {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  std::vector<double> vector(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

  /// A physically admissible random state: densities in [0, 1], kappa >= 0.
  invasion::StateField state(std::size_t n) {
    invasion::StateField w(n);
    for (std::size_t k = 0; k < n; ++k) {
      w.set_cell(k, {uniform(0.0, 1.0), uniform(0.0, 1.0), uniform(0.0, 1.0), uniform(0.0, 1.0),
                     uniform(0.0, 2.0)});
    }
    return w;
  }

  invasion::GridSpec grid(std::size_t n_lo = 3, std::size_t n_hi = 12) {
    const double a = uniform(-3.0, 0.0);
    return {a, a + uniform(0.5, 4.0), index(n_lo, n_hi), index(n_lo, n_hi)};
  }

private:
  std::mt19937_64 engine_;
};

inline constexpr int kTrials = 50;

}  // namespace testgen
