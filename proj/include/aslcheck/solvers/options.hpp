#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "aslcheck/error.hpp"
#include "aslcheck/lp.hpp"

namespace aslcheck {

enum class SolveStatus { Optimal, Unbounded, EarlyNegative, Infeasible, IterLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::EarlyNegative: return "early-negative";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterLimit: return "iteration-limit";
  }
  return "?";
}

struct SolverOptions {
  /// 0 selects the per-method default: 50*(m+n) for simplex, 500 for the interior methods.
  int max_iters = 0;
  double feas_tol = 1e-9;
  double opt_tol = 1e-8;
  double gap_tol = 1e-8;
  /// Stop as soon as a feasible iterate has objective below -early_negative_threshold.
  /// Only sound on fully degenerate programs, where a negative value implies unboundedness.
  bool early_negative = false;
  double early_negative_threshold = 1e-7;
  /// Fraction of the distance to the boundary taken by interior steps.
  double step_fraction = 0.995;
  /// Upper bound on the affine-scaling step fraction for fully degenerate programs.
  double degenerate_step_cap = 2.0 / 3.0;
  /// Iterates are reported as CSV lines "iteration,objective,primal_residual,dual_residual,gap".
  std::ostream* trace = nullptr;

  void validate() const {
    if (!(feas_tol > 0 && opt_tol > 0 && gap_tol > 0 && early_negative_threshold > 0 && degenerate_step_cap > 0)) {
      throw Error(ErrorKind::InvalidArgument, "solver tolerances must be positive");
    }
    if (!(step_fraction > 0.0 && step_fraction < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "step_fraction must lie in (0,1)");
    }
    if (max_iters < 0) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 0");
  }
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::IterLimit;
  std::optional<double> objective;
  /// Terminal primal iterate (basic solution for simplex).
  Vector x;
  /// Dual estimate and reduced costs, when the method produces them.
  Vector y;
  Vector t;
  /// Direction of unboundedness found by the simplex ratio test: A ray = 0, ray >= 0, c'ray < 0.
  Vector ray;
  int iterations = 0;
  double primal_residual_inf = 0.0;
  double dual_residual_inf = 0.0;
  double duality_gap = 0.0;
  std::int64_t wall_time_ns = 0;

  bool has_dual() const noexcept { return y.size() > 0 || t.size() > 0; }
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t elapsed_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void emit_trace(const SolverOptions& opts, int iter, double objective, double rp, double rd, double gap) {
  if (opts.trace == nullptr) return;
  *opts.trace << iter << ',' << objective << ',' << rp << ',' << rd << ',' << gap << '\n';
}

}  // namespace detail

}  // namespace aslcheck
