#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "aslcheck/lp.hpp"
#include "aslcheck/solvers/options.hpp"

namespace aslcheck {

namespace detail {

/// Solves (A D A') w = rhs for diagonal D > 0, with a small diagonal shift if the factorization
/// loses definiteness near convergence.
inline Vector solve_normal_equations(const Matrix& A, const Vector& d, const Vector& rhs) {
  if (A.rows() == 0) return Vector(0);
  Matrix M = A * d.asDiagonal() * A.transpose();
  Eigen::LDLT<Matrix> ldlt(M);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Vector w = ldlt.solve(rhs);
    if (w.allFinite()) return w;
  }
  const double shift = 1e-12 * std::max(1.0, M.diagonal().maxCoeff());
  M.diagonal().array() += shift;
  return M.ldlt().solve(rhs);
}

/// Orthogonal factorization of B = S A' for a positive diagonal scaling S. Solves the
/// normal equations (A S^2 A') z = v through B instead of forming the product, falling back to
/// the product when B loses column rank.
class ScaledProjection {
 public:
  ScaledProjection(const Matrix& A, Vector s) : A_(A), s_(std::move(s)), qr_(s_.asDiagonal() * A.transpose()) {
    full_rank_ = qr_.rank() == A.rows();
  }

  /// (A S^2 A')^-1 v
  Vector solve_normal(const Vector& v) const {
    const auto m = A_.rows();
    if (m == 0) return Vector(0);
    if (!full_rank_) return solve_normal_equations(A_, s_.cwiseProduct(s_), v);
    // B'B = P R'R P'
    const auto R = qr_.matrixQR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
    Vector z = qr_.colsPermutation().transpose() * v;
    R.transpose().solveInPlace(z);
    R.solveInPlace(z);
    return qr_.colsPermutation() * z;
  }

  /// Least-squares dual estimate: argmin_w |S (c - A' w)|.
  Vector dual_estimate(const Vector& c) const {
    if (A_.rows() == 0) return Vector(0);
    if (full_rank_) return qr_.solve(Vector(s_.cwiseProduct(c)));
    return solve_normal(A_ * s_.cwiseProduct(s_).cwiseProduct(c));
  }

  /// Smallest step in the S^-1 norm with A dx = residual.
  Vector feasibility_step(const Vector& residual) const {
    if (A_.rows() == 0) return Vector::Zero(s_.size());
    return s_.cwiseProduct(s_).cwiseProduct(A_.transpose() * solve_normal(residual));
  }

 private:
  const Matrix& A_;
  Vector s_;
  Eigen::ColPivHouseholderQR<Matrix> qr_;
  bool full_rank_ = false;
};

/// Largest step s in (0, inf] with v + s*dv >= 0, given v > 0.
inline double max_step_to_boundary(const Vector& v, const Vector& dv) {
  double step = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (dv(j) < 0.0) step = std::min(step, -v(j) / dv(j));
  }
  return step;
}

}  // namespace detail

/// Consecutive iterations with a flat objective after which affine scaling stops.
inline constexpr int kAffineStallSteps = 5;
/// Primal residual allowed at such a stop, as a multiple of feas_tol.
inline constexpr double kAffineStallResidual = 1e3;

/// Primal affine scaling from an interior feasible point.
///
/// Each iteration rescales by the current iterate, projects the cost onto the null space of the
/// scaled constraint matrix, and moves a fixed fraction of the way to the boundary. On fully
/// degenerate programs the fraction is capped at opts.degenerate_step_cap.
inline SolveOutcome affine_scaling(const StandardLp& lp, const StartPoint& x0, const SolverOptions& opts = {}) {
  lp.validate();
  opts.validate();
  detail::Stopwatch clock;
  const auto n = static_cast<Eigen::Index>(lp.cols());
  if (x0.x.size() != n) throw Error(ErrorKind::DimensionMismatch, "start point has the wrong number of columns");
  if (n > 0 && !(x0.x.minCoeff() > 0.0)) throw Error(ErrorKind::NonInteriorStart, "affine scaling needs x0 > 0");
  const double scale_b = std::max(1.0, lp.b.size() > 0 ? lp.b.lpNorm<Eigen::Infinity>() : 0.0);
  if (primal_residual_inf(lp, x0.x) > opts.feas_tol * scale_b) {
    throw Error(ErrorKind::NonInteriorStart, "affine scaling needs A x0 = b");
  }

  const double fraction =
      lp.meta.fully_degenerate ? std::min(opts.step_fraction, opts.degenerate_step_cap) : opts.step_fraction;
  const int max_iters = opts.max_iters > 0 ? opts.max_iters : 500;
  const double cost_scale = std::max(1.0, n > 0 ? lp.c.lpNorm<Eigen::Infinity>() : 0.0);

  SolveOutcome out;
  Vector x = x0.x;
  Vector w;
  Vector r;
  auto finish = [&](SolveStatus status, int iters) {
    out.status = status;
    out.iterations = iters;
    out.x = x;
    out.y = w;
    out.t = r;
    out.objective = lp.c.dot(x);
    out.primal_residual_inf = primal_residual_inf(lp, x);
    out.dual_residual_inf = r.size() > 0 ? std::max(0.0, -r.minCoeff()) : 0.0;
    out.duality_gap = out.objective.value() - lp.b.dot(w);
    out.wall_time_ns = clock.elapsed_ns();
    return out;
  };

  double previous = lp.c.dot(x);
  int flat_steps = 0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Vector x2 = x.cwiseProduct(x);
    const detail::ScaledProjection projection(lp.A, x);
    w = projection.dual_estimate(lp.c);
    r = lp.c - lp.A.transpose() * w;
    const double objective = lp.c.dot(x);
    const double gap = objective - lp.b.dot(w);
    const double residual = primal_residual_inf(lp, x);
    const double dual_infeas = n > 0 ? std::max(0.0, -r.minCoeff()) : 0.0;
    detail::emit_trace(opts, iter, objective, residual, dual_infeas, gap);

    if (opts.early_negative && objective < -opts.early_negative_threshold && residual <= opts.feas_tol * scale_b) {
      return finish(SolveStatus::EarlyNegative, iter);
    }
    const bool feasible = residual <= opts.feas_tol * scale_b;
    if (feasible && dual_infeas <= opts.opt_tol * cost_scale &&
        std::abs(gap) <= opts.gap_tol * std::max(1.0, std::abs(objective))) {
      return finish(SolveStatus::Optimal, iter);
    }

    const Vector dx = -x2.cwiseProduct(r);
    const double slope = lp.c.dot(dx);
    if (feasible && n > 0 && dx.minCoeff() >= 0.0 && slope < 0.0) {
      out.ray = dx;
      return finish(SolveStatus::Unbounded, iter + 1);
    }
    const double to_boundary = detail::max_step_to_boundary(x, dx);
    if (!std::isfinite(to_boundary)) return finish(SolveStatus::Optimal, iter);  // dx == 0
    x += fraction * to_boundary * dx;
    // Pull round-off drift in A x back to b, keeping x interior.
    const Vector correction = detail::ScaledProjection(lp.A, x).feasibility_step(lp.b - lp.A * x);
    const double room = detail::max_step_to_boundary(x, correction);
    x += std::min(1.0, 0.5 * room) * correction;

    const double current = lp.c.dot(x);
    const bool flat = std::abs(previous - current) < opts.opt_tol * std::max(1.0, std::abs(current));
    if (feasible && flat && dual_infeas <= opts.opt_tol * cost_scale) {
      return finish(SolveStatus::Optimal, iter + 1);
    }
    // On degenerate optima the dual estimates can oscillate while the objective has settled.
    flat_steps = flat ? flat_steps + 1 : 0;
    if (flat_steps >= kAffineStallSteps && residual <= kAffineStallResidual * opts.feas_tol * scale_b) {
      return finish(SolveStatus::Optimal, iter + 1);
    }
    previous = current;
  }
  return finish(SolveStatus::IterLimit, max_iters);
}

}  // namespace aslcheck
