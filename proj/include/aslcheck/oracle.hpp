#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "aslcheck/core.hpp"
#include "aslcheck/error.hpp"

namespace aslcheck {

using Rational = boost::multiprecision::mpq_rational;

inline constexpr std::int64_t kSnapDenominator = 1'000'000;
inline constexpr std::size_t kOracleMaxSize = 16;

/// Integer numerator of v on the grid 1/denominator.
inline std::int64_t snap_numerator(double v, std::int64_t denominator = kSnapDenominator) {
  return std::llround(v * static_cast<double>(denominator));
}

/// Rounds every gamble value to the nearest multiple of 1/denominator. The result is what both the
/// exact oracle and the floating-point solvers see, so they decide the identical instance.
inline GambleSet snap_to_grid(const GambleSet& d, std::int64_t denominator = kSnapDenominator) {
  std::vector<Gamble> gambles;
  gambles.reserve(d.num_gambles());
  for (const auto& g : d.gambles()) {
    std::vector<double> v(g.size());
    for (std::size_t w = 0; w < g.size(); ++w) {
      v[w] = static_cast<double>(snap_numerator(g[w], denominator)) / static_cast<double>(denominator);
    }
    gambles.emplace_back(std::move(v));
  }
  return GambleSet(d.space(), std::move(gambles));
}

namespace detail {

/// Dense rational tableau for  min sum(artificials)  s.t.  T x = rhs, x >= 0, with the artificial
/// columns forming the initial basis. Bland's rule guarantees termination.
class RationalPhaseOne {
 public:
  RationalPhaseOne(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs, std::size_t structural)
      : rows_(std::move(rows)), rhs_(std::move(rhs)), structural_(structural) {
    const std::size_t m = rows_.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (rhs_[i] < 0) {
        for (auto& a : rows_[i]) a = -a;
        rhs_[i] = -rhs_[i];
      }
      rows_[i].resize(structural_ + m, Rational(0));
      rows_[i][structural_ + i] = 1;
      basis_.push_back(structural_ + i);
    }
  }

  /// Minimum of the sum of artificials.
  Rational solve() {
    const std::size_t m = rows_.size();
    const std::size_t cols = structural_ + m;
    // Reduced costs of the phase-one objective with the artificial basis.
    std::vector<Rational> reduced(cols, Rational(0));
    Rational value = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < structural_; ++j) reduced[j] -= rows_[i][j];
      value += rhs_[i];
    }
    while (true) {
      std::size_t entering = cols;
      for (std::size_t j = 0; j < cols; ++j) {
        if (reduced[j] < 0) {
          entering = j;
          break;
        }
      }
      if (entering == cols) return value;

      std::size_t leave = m;
      Rational best_ratio;
      for (std::size_t i = 0; i < m; ++i) {
        if (rows_[i][entering] <= 0) continue;
        Rational ratio = rhs_[i] / rows_[i][entering];
        if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m) throw Error(ErrorKind::InvalidArgument, "phase-one program cannot be unbounded");

      const Rational pivot = rows_[leave][entering];
      for (auto& a : rows_[leave]) a /= pivot;
      rhs_[leave] /= pivot;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == leave || rows_[i][entering] == 0) continue;
        const Rational factor = rows_[i][entering];
        for (std::size_t j = 0; j < cols; ++j) {
          if (rows_[leave][j] != 0) rows_[i][j] -= factor * rows_[leave][j];
        }
        rhs_[i] -= factor * rhs_[leave];
      }
      const Rational factor = reduced[entering];
      for (std::size_t j = 0; j < cols; ++j) {
        if (rows_[leave][j] != 0) reduced[j] -= factor * rows_[leave][j];
      }
      value += factor * rhs_[leave];
      basis_[leave] = entering;
    }
  }

 private:
  std::vector<std::vector<Rational>> rows_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basis_;
  std::size_t structural_;
};

}  // namespace detail

/// Exact decision of avoiding sure loss: is there a pmf p with sum_w f_i(w) p(w) >= 0 for every i?
/// Gamble values are snapped to the grid 1/kSnapDenominator first and then handled as exact rationals.
inline bool exact_oracle_asl(const GambleSet& d) {
  const std::size_t n = d.num_gambles();
  const std::size_t m = d.num_outcomes();
  if (n > kOracleMaxSize || m > kOracleMaxSize) {
    throw Error(ErrorKind::SizeGuard, "exact oracle limited to 16 gambles and 16 outcomes");
  }
  // Columns: p (m), surplus e (n).  Rows: sum_w f_i(w) p(w) - e_i = 0;  sum_w p(w) = 1.
  std::vector<std::vector<Rational>> rows(n + 1, std::vector<Rational>(m + n, Rational(0)));
  std::vector<Rational> rhs(n + 1, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < m; ++w) rows[i][w] = Rational(snap_numerator(d.value(i, w)), kSnapDenominator);
    rows[i][m + i] = -1;
  }
  for (std::size_t w = 0; w < m; ++w) rows[n][w] = 1;
  rhs[n] = 1;
  detail::RationalPhaseOne phase_one(std::move(rows), std::move(rhs), m + n);
  return phase_one.solve() == 0;
}

}  // namespace aslcheck
