#pragma once

#include <random>
#include <vector>

#include "aslcheck/core.hpp"

namespace aslcheck::testing {

/// Gamble set with entries uniform in [lo, hi], drawn from the std engine (independent of gen).
inline GambleSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t m, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (auto& r : rows) {
    for (double& v : r) v = u(rng);
  }
  return GambleSet::from_rows(std::move(rows));
}

}  // namespace aslcheck::testing
