#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "aslcheck/lp.hpp"
#include "aslcheck/solvers/affine.hpp"
#include "aslcheck/solvers/options.hpp"

namespace aslcheck {

inline constexpr double kDivergenceThreshold = 1e14;
inline constexpr double kCenteringSigma = 0.1;

/// Infeasible-start primal-dual path following on
///   A x = b,  A'y + t = c,  x't = 0,  x, t > 0.
///
/// Damped Newton steps toward the centered target sigma * x't / n, with separate primal and dual
/// step lengths min(1, fraction * distance to the boundary).
inline SolveOutcome primal_dual(const StandardLp& lp, const StartPoint& start, const SolverOptions& opts = {}) {
  lp.validate();
  opts.validate();
  detail::Stopwatch clock;
  const auto n = static_cast<Eigen::Index>(lp.cols());
  const auto m = static_cast<Eigen::Index>(lp.rows());
  if (start.x.size() != n || start.t.size() != n || start.y.size() != m) {
    throw Error(ErrorKind::DimensionMismatch, "primal-dual start has the wrong dimensions");
  }
  if (n > 0 && !(start.x.minCoeff() > 0.0 && start.t.minCoeff() > 0.0)) {
    throw Error(ErrorKind::NonInteriorStart, "primal-dual needs x > 0 and t > 0");
  }

  const int max_iters = opts.max_iters > 0 ? opts.max_iters : 500;
  const double scale_b = std::max(1.0, m > 0 ? lp.b.lpNorm<Eigen::Infinity>() : 0.0);

  Vector x = start.x;
  Vector y = start.y;
  Vector t = start.t;
  SolveOutcome out;
  auto finish = [&](SolveStatus status, int iters, double rp, double rd) {
    out.status = status;
    out.iterations = iters;
    out.x = x;
    out.y = y;
    out.t = t;
    out.objective = lp.c.dot(x);
    out.primal_residual_inf = rp;
    out.dual_residual_inf = rd;
    out.duality_gap = x.dot(t);
    out.wall_time_ns = clock.elapsed_ns();
    return out;
  };

  // Work buffers reused across iterations. Rows of A are few in the reduced programs, so the
  // per-column loops below touch each column of A' once per pass.
  const Matrix at = lp.A.transpose();
  Vector rp(m), rd(n), d(n), g(n), u(n), rhs(m), dy(m), dt(n), dx(n), scaled(n);
  Matrix normal(m, m);
  Eigen::LDLT<Matrix> ldlt(m);

  for (int iter = 0;; ++iter) {
    rp.noalias() = lp.b - at.transpose() * x;
    rd.noalias() = lp.c - at * y;
    double rd_inf = 0.0, gap = 0.0, objective = 0.0, x_norm = 0.0, t_norm = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      rd(j) -= t(j);
      rd_inf = std::max(rd_inf, std::abs(rd(j)));
      gap += x(j) * t(j);
      objective += lp.c(j) * x(j);
      x_norm = std::max(x_norm, x(j));
      t_norm = std::max(t_norm, t(j));
    }
    const double rp_inf = m > 0 ? rp.lpNorm<Eigen::Infinity>() : 0.0;
    detail::emit_trace(opts, iter, objective, rp_inf, rd_inf, gap);

    if (opts.early_negative && rp_inf <= opts.feas_tol * scale_b && objective < -opts.early_negative_threshold) {
      return finish(SolveStatus::EarlyNegative, iter, rp_inf, rd_inf);
    }
    if (rp_inf <= opts.feas_tol && rd_inf <= opts.feas_tol && gap <= opts.gap_tol &&
        std::abs(objective - lp.b.dot(y)) <= opts.gap_tol * std::max(1.0, std::abs(objective))) {
      return finish(SolveStatus::Optimal, iter, rp_inf, rd_inf);
    }
    const double dual_norm = std::max(t_norm, m > 0 ? y.lpNorm<Eigen::Infinity>() : 0.0);
    if (x_norm > kDivergenceThreshold || dual_norm > kDivergenceThreshold) {
      // A primal iterate running off along a feasible direction means the primal is unbounded;
      // a diverging dual means there is no primal feasible point.
      const bool primal_side = x_norm > kDivergenceThreshold && rp_inf <= std::sqrt(opts.feas_tol) * x_norm;
      return finish(primal_side ? SolveStatus::Unbounded : SolveStatus::Infeasible, iter, rp_inf, rd_inf);
    }
    if (iter >= max_iters) return finish(SolveStatus::IterLimit, iter, rp_inf, rd_inf);

    const double target = kCenteringSigma * gap / static_cast<double>(std::max<Eigen::Index>(n, 1));
    for (Eigen::Index j = 0; j < n; ++j) {
      d(j) = x(j) / t(j);
      g(j) = target / t(j) - x(j);
      u(j) = g(j) - d(j) * rd(j);
    }
    // rhs = rp - A (g - D rd)
    rhs.noalias() = rp - at.transpose() * u;

    auto directions = [&] {
      dt.noalias() = rd - at * dy;
      for (Eigen::Index j = 0; j < n; ++j) dx(j) = g(j) - d(j) * dt(j);
    };
    bool solved = false;
    if (m > 0) {
      for (Eigen::Index i = 0; i < m; ++i) {
        scaled = at.col(i).cwiseProduct(d);
        for (Eigen::Index j = 0; j <= i; ++j) normal(i, j) = normal(j, i) = scaled.dot(at.col(j));
      }
      ldlt.compute(normal);
      if (ldlt.info() == Eigen::Success) {
        dy = ldlt.solve(rhs);
        if (dy.allFinite()) {
          directions();
          // A dx = rp holds exactly in exact arithmetic; large drift means the product lost accuracy.
          const double drift = (at.transpose() * dx - rp).lpNorm<Eigen::Infinity>();
          solved = drift <= 1e-3 * opts.feas_tol * std::max({1.0, rp_inf, dx.lpNorm<Eigen::Infinity>()});
        }
      }
    }
    if (!solved) {
      dy = detail::ScaledProjection(lp.A, d.cwiseSqrt()).solve_normal(rhs);
      directions();
    }

    double to_p = std::numeric_limits<double>::infinity();
    double to_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (dx(j) < 0.0) to_p = std::min(to_p, -x(j) / dx(j));
      if (dt(j) < 0.0) to_d = std::min(to_d, -t(j) / dt(j));
    }
    const double step_p = std::min(1.0, opts.step_fraction * to_p);
    const double step_d = std::min(1.0, opts.step_fraction * to_d);
    x += step_p * dx;
    y += step_d * dy;
    t += step_d * dt;
  }
}

}  // namespace aslcheck
