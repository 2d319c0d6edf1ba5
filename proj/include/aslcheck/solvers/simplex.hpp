#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "aslcheck/lp.hpp"
#include "aslcheck/solvers/options.hpp"

namespace aslcheck {

namespace detail {

/// LU factorization of a basis matrix plus a product-form eta file for the column
/// replacements made since the last refactorization.
class BasisFactor {
 public:
  static constexpr std::size_t kRefactorInterval = 50;

  void refactor(const Matrix& A, std::span<const std::size_t> basis) {
    const auto m = static_cast<Eigen::Index>(basis.size());
    Matrix B(A.rows(), m);
    for (Eigen::Index k = 0; k < m; ++k) B.col(k) = A.col(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(k)]));
    lu_.compute(B);
    etas_.clear();
    singular_ = m > 0 && !(lu_.rcond() > 1e-13);
  }

  bool singular() const noexcept { return singular_; }
  bool due() const noexcept { return etas_.size() >= kRefactorInterval; }

  /// B^{-1} r
  Vector ftran(const Vector& r) const {
    if (r.size() == 0) return r;
    Vector x = lu_.solve(r);
    for (const auto& e : etas_) {
      const double xr = x(e.row) / e.pivot;
      x -= xr * e.column;
      x(e.row) = xr;
    }
    return x;
  }

  /// B^{-T} r
  Vector btran(const Vector& r) const {
    if (r.size() == 0) return r;
    Vector v = r;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const double dot = it->column.dot(v) - it->column(it->row) * v(it->row);
      v(it->row) = (v(it->row) - dot) / it->pivot;
    }
    return lu_.transpose().solve(v);
  }

  /// Column `row` of the basis was replaced; d = B_old^{-1} a_entering.
  void update(Eigen::Index row, const Vector& d) { etas_.push_back({row, d(row), d}); }

 private:
  struct Eta {
    Eigen::Index row;
    double pivot;
    Vector column;
  };
  Eigen::PartialPivLU<Matrix> lu_;
  std::vector<Eta> etas_;
  bool singular_ = false;
};

}  // namespace detail

/// Revised simplex method from a feasible basis.
///
/// Pricing is Dantzig's largest-decrease rule while the basic solution is nondegenerate and switches
/// to Bland's smallest-index rule (entering and leaving) as soon as any basic variable sits at zero,
/// which rules out cycling on the fully degenerate reduced primal.
inline SolveOutcome revised_simplex(const StandardLp& lp, std::span<const std::size_t> initial_basis,
                                    const SolverOptions& opts = {}) {
  lp.validate();
  opts.validate();
  detail::Stopwatch clock;
  const auto m = static_cast<Eigen::Index>(lp.rows());
  const auto n = static_cast<Eigen::Index>(lp.cols());
  if (static_cast<Eigen::Index>(initial_basis.size()) != m) {
    throw Error(ErrorKind::InvalidBasis, "basis has " + std::to_string(initial_basis.size()) + " columns, expected " +
                                             std::to_string(m));
  }
  std::vector<std::size_t> basis(initial_basis.begin(), initial_basis.end());
  std::vector<char> is_basic(static_cast<std::size_t>(n), 0);
  for (auto j : basis) {
    if (static_cast<Eigen::Index>(j) >= n || is_basic[j]) throw Error(ErrorKind::InvalidBasis, "basis columns must be distinct and in range");
    is_basic[j] = 1;
  }

  detail::BasisFactor factor;
  factor.refactor(lp.A, basis);
  if (factor.singular()) throw Error(ErrorKind::InvalidBasis, "initial basis is singular");
  Vector xb = factor.ftran(lp.b);
  const double infeasible = m > 0 ? xb.minCoeff() : 0.0;
  if (infeasible < -opts.feas_tol * std::max(1.0, lp.b.lpNorm<Eigen::Infinity>())) {
    throw Error(ErrorKind::InvalidBasis, "initial basis is infeasible (min basic value " + std::to_string(infeasible) + ")");
  }
  xb = xb.cwiseMax(0.0);

  const int max_iters = opts.max_iters > 0 ? opts.max_iters : 50 * static_cast<int>(m + n);
  constexpr double kPivotTol = 1e-9;

  SolveOutcome out;
  auto finish = [&](SolveStatus status) {
    out.status = status;
    out.x = Vector::Zero(n);
    for (Eigen::Index k = 0; k < m; ++k) out.x(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(k)])) = xb(k);
    Vector cb(m);
    for (Eigen::Index k = 0; k < m; ++k) cb(k) = lp.c(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(k)]));
    out.y = factor.btran(cb);
    out.t = lp.c - lp.A.transpose() * out.y;
    out.objective = lp.c.dot(out.x);
    out.primal_residual_inf = primal_residual_inf(lp, out.x);
    out.dual_residual_inf = m > 0 ? std::max(0.0, -out.t.minCoeff()) : 0.0;
    out.duality_gap = std::abs(out.x.dot(out.t));
    out.wall_time_ns = clock.elapsed_ns();
    return out;
  };

  Vector cb(m);
  for (int iter = 0; iter < max_iters; ++iter) {
    out.iterations = iter;
    for (Eigen::Index k = 0; k < m; ++k) cb(k) = lp.c(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(k)]));
    const Vector y = factor.btran(cb);
    const bool degenerate = m > 0 && xb.minCoeff() <= opts.feas_tol;
    if (opts.trace != nullptr) detail::emit_trace(opts, iter, cb.dot(xb), 0.0, 0.0, 0.0);

    Eigen::Index entering = -1;
    double best = -opts.opt_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (is_basic[static_cast<std::size_t>(j)]) continue;
      const double dj = lp.c(j) - lp.A.col(j).dot(y);
      if (dj < best) {
        entering = j;
        if (degenerate) break;
        best = dj;
      }
    }
    if (entering < 0) return finish(SolveStatus::Optimal);

    const Vector w = factor.ftran(lp.A.col(entering));
    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k) {
      if (w(k) <= kPivotTol) continue;
      const double r = xb(k) / w(k);
      if (r < ratio - 1e-12 ||
          (r <= ratio + 1e-12 && leave >= 0 && basis[static_cast<std::size_t>(k)] < basis[static_cast<std::size_t>(leave)])) {
        ratio = std::min(r, ratio);
        leave = k;
      }
    }
    if (leave < 0) {
      out.ray = Vector::Zero(n);
      out.ray(entering) = 1.0;
      for (Eigen::Index k = 0; k < m; ++k) out.ray(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(k)])) = -w(k);
      out.iterations = iter + 1;
      return finish(SolveStatus::Unbounded);
    }

    const double theta = std::max(0.0, ratio);
    xb -= theta * w;
    xb(leave) = theta;
    xb = xb.cwiseMax(0.0);
    is_basic[basis[static_cast<std::size_t>(leave)]] = 0;
    is_basic[static_cast<std::size_t>(entering)] = 1;
    basis[static_cast<std::size_t>(leave)] = static_cast<std::size_t>(entering);
    factor.update(leave, w);
    if (factor.due() || std::abs(w(leave)) < 1e-7) {
      factor.refactor(lp.A, basis);
      if (factor.singular()) throw Error(ErrorKind::InvalidBasis, "basis became singular");
      xb = factor.ftran(lp.b).cwiseMax(0.0);
    }
  }
  out.iterations = max_iters;
  return finish(SolveStatus::IterLimit);
}

}  // namespace aslcheck
