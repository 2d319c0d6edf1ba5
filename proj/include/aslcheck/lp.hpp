#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "aslcheck/core.hpp"
#include "aslcheck/error.hpp"

namespace aslcheck {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FormulationKind { P1, P3, D3, D4Phase1, P4Prime, Generic };

inline const char* to_string(FormulationKind k) {
  switch (k) {
    case FormulationKind::P1: return "P1";
    case FormulationKind::P3: return "P3";
    case FormulationKind::D3: return "D3";
    case FormulationKind::D4Phase1: return "D4Phase1";
    case FormulationKind::P4Prime: return "P4Prime";
    case FormulationKind::Generic: return "Generic";
  }
  return "?";
}

inline FormulationKind formulation_kind_from_string(const std::string& s) {
  for (auto k : {FormulationKind::P1, FormulationKind::P3, FormulationKind::D3, FormulationKind::D4Phase1,
                 FormulationKind::P4Prime, FormulationKind::Generic}) {
    if (s == to_string(k)) return k;
  }
  throw Error(ErrorKind::Parse, "unknown formulation kind '" + s + "'");
}

/// Half-open column range [begin, end) holding one variable block.
struct ColumnBlock {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const ColumnBlock&, const ColumnBlock&) = default;
};

struct FormulationMeta {
  FormulationKind kind = FormulationKind::Generic;
  std::optional<std::size_t> omega0;
  std::vector<ColumnBlock> layout;
  bool fully_degenerate = false;
  /// A feasible starting basis in closed form, one column per row (empty if none is known).
  std::vector<std::size_t> initial_basis;

  const ColumnBlock& block(const std::string& name) const {
    for (const auto& b : layout) {
      if (b.name == name) return b;
    }
    throw Error(ErrorKind::InvalidArgument, "no column block named '" + name + "'");
  }
  bool has_block(const std::string& name) const {
    return std::any_of(layout.begin(), layout.end(), [&](const ColumnBlock& b) { return b.name == name; });
  }
};

/// min c'x  s.t.  Ax = b, x >= 0
struct StandardLp {
  Matrix A;
  Vector b;
  Vector c;
  FormulationMeta meta;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(A.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(A.cols()); }

  void validate() const {
    if (b.size() != A.rows() || c.size() != A.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "LP data dimensions are inconsistent");
    }
    if (A.hasNaN() || b.hasNaN() || c.hasNaN()) throw Error(ErrorKind::InvalidArgument, "LP data contains NaN");
    std::size_t next = 0;
    for (const auto& blk : meta.layout) {
      if (blk.begin != next || blk.end < blk.begin) {
        throw Error(ErrorKind::InvalidArgument, "column layout is not a partition at block '" + blk.name + "'");
      }
      next = blk.end;
    }
    if (!meta.layout.empty() && next != cols()) {
      throw Error(ErrorKind::InvalidArgument, "column layout does not cover all columns");
    }
  }
};

/// Starting iterate. Absent parts are empty vectors.
struct StartPoint {
  Vector x;
  Vector y;
  Vector t;

  bool has_x() const noexcept { return x.size() > 0; }
  bool has_y() const noexcept { return y.size() > 0; }
  bool has_t() const noexcept { return t.size() > 0; }
};

inline double primal_residual_inf(const StandardLp& lp, const Vector& x) {
  if (lp.rows() == 0) return 0.0;
  return (lp.A * x - lp.b).lpNorm<Eigen::Infinity>();
}

inline double dual_residual_inf(const StandardLp& lp, const Vector& y, const Vector& t) {
  if (lp.cols() == 0) return 0.0;
  return (lp.A.transpose() * y + t - lp.c).lpNorm<Eigen::Infinity>();
}

namespace detail {

class LayoutBuilder {
 public:
  std::size_t add(std::string name, std::size_t count) {
    std::size_t begin = next_;
    blocks_.push_back({std::move(name), begin, begin + count});
    next_ += count;
    return begin;
  }
  std::size_t total() const noexcept { return next_; }
  std::vector<ColumnBlock> take() { return std::move(blocks_); }

 private:
  std::vector<ColumnBlock> blocks_;
  std::size_t next_ = 0;
};

inline void require_omega0(const GambleSet& d, std::size_t omega0) {
  if (omega0 >= d.num_outcomes()) {
    throw Error(ErrorKind::InvalidArgument, "omega0 index " + std::to_string(omega0) + " out of range");
  }
}

/// Outcomes other than omega0, in index order. Row/column k of the reduced programs maps to others[k].
inline std::vector<std::size_t> other_outcomes(std::size_t num_outcomes, std::size_t omega0) {
  std::vector<std::size_t> out;
  out.reserve(num_outcomes - 1);
  for (std::size_t w = 0; w < num_outcomes; ++w) {
    if (w != omega0) out.push_back(w);
  }
  return out;
}

}  // namespace detail

inline std::vector<std::size_t> other_outcomes(const GambleSet& d, std::size_t omega0) {
  return detail::other_outcomes(d.num_outcomes(), omega0);
}

/// Outcome with the most nonnegative gamble values; lowest index wins ties.
inline std::size_t select_omega0(const GambleSet& d) {
  std::size_t best = 0;
  std::size_t best_count = 0;
  for (std::size_t w = 0; w < d.num_outcomes(); ++w) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < d.num_gambles(); ++i) count += d.value(i, w) >= 0.0 ? 1 : 0;
    if (w == 0 || count > best_count) {
      best = w;
      best_count = count;
    }
  }
  return best;
}

/// min alpha  s.t.  sum_i f_i(w) lambda_i - alpha <= 0 for all w, lambda >= 0, alpha free.
/// Columns: lambda (n), alpha_plus, alpha_minus, s (|Omega|).
inline StandardLp build_p1(const GambleSet& d) {
  const std::size_t n = d.num_gambles();
  const std::size_t m = d.num_outcomes();
  detail::LayoutBuilder layout;
  const auto lam = layout.add("lambda", n);
  const auto ap = layout.add("alpha_plus", 1);
  const auto am = layout.add("alpha_minus", 1);
  const auto s = layout.add("s", m);

  StandardLp lp;
  lp.A = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(layout.total()));
  lp.b = Vector::Zero(static_cast<Eigen::Index>(m));
  lp.c = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
  for (std::size_t w = 0; w < m; ++w) {
    const auto row = static_cast<Eigen::Index>(w);
    for (std::size_t i = 0; i < n; ++i) lp.A(row, static_cast<Eigen::Index>(lam + i)) = d.value(i, w);
    lp.A(row, static_cast<Eigen::Index>(ap)) = -1.0;
    lp.A(row, static_cast<Eigen::Index>(am)) = 1.0;
    lp.A(row, static_cast<Eigen::Index>(s + w)) = 1.0;
    lp.meta.initial_basis.push_back(s + w);
  }
  lp.c(static_cast<Eigen::Index>(ap)) = 1.0;
  lp.c(static_cast<Eigen::Index>(am)) = -1.0;
  lp.meta.kind = FormulationKind::P1;
  lp.meta.layout = layout.take();
  lp.meta.fully_degenerate = true;
  return lp;
}

/// Reduced primal with one equality row per outcome other than omega0:
///   sum_i (f_i(w) - f_i(w0)) lambda_i - alpha + s(w) = 0.
/// Columns: lambda (n), alpha, s (|Omega|-1). Objective sum_i f_i(w0) lambda_i + alpha.
inline StandardLp build_p3(const GambleSet& d, std::size_t omega0) {
  detail::require_omega0(d, omega0);
  const std::size_t n = d.num_gambles();
  const auto others = other_outcomes(d, omega0);
  const std::size_t m = others.size();
  detail::LayoutBuilder layout;
  const auto lam = layout.add("lambda", n);
  const auto alpha = layout.add("alpha", 1);
  const auto s = layout.add("s", m);

  StandardLp lp;
  lp.A = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(layout.total()));
  lp.b = Vector::Zero(static_cast<Eigen::Index>(m));
  lp.c = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
  for (std::size_t k = 0; k < m; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (std::size_t i = 0; i < n; ++i) {
      lp.A(row, static_cast<Eigen::Index>(lam + i)) = d.value(i, others[k]) - d.value(i, omega0);
    }
    lp.A(row, static_cast<Eigen::Index>(alpha)) = -1.0;
    lp.A(row, static_cast<Eigen::Index>(s + k)) = 1.0;
    lp.meta.initial_basis.push_back(s + k);
  }
  for (std::size_t i = 0; i < n; ++i) lp.c(static_cast<Eigen::Index>(lam + i)) = d.value(i, omega0);
  lp.c(static_cast<Eigen::Index>(alpha)) = 1.0;
  lp.meta.kind = FormulationKind::P3;
  lp.meta.omega0 = omega0;
  lp.meta.layout = layout.take();
  lp.meta.fully_degenerate = true;
  return lp;
}

/// Gambles with f_j(w0) < 0; these rows of D3 get an artificial variable.
inline std::vector<bool> negative_at_omega0(const GambleSet& d, std::size_t omega0) {
  std::vector<bool> neg(d.num_gambles());
  for (std::size_t j = 0; j < d.num_gambles(); ++j) neg[j] = d.value(j, omega0) < 0.0;
  return neg;
}

/// Phase-1 form of the reduced dual with nonnegative right-hand sides.
/// Columns: p (|Omega|-1), s (n), v (|N|), q. Rows: one per gamble, then sum p + q = 1.
/// The initial basis holds v_j (j in N) or s_j (j not in N) per gamble row, and q for the last row.
inline StandardLp build_d3(const GambleSet& d, std::size_t omega0) {
  detail::require_omega0(d, omega0);
  const std::size_t n = d.num_gambles();
  const auto others = other_outcomes(d, omega0);
  const std::size_t m = others.size();
  const auto neg = negative_at_omega0(d, omega0);
  const auto num_neg = static_cast<std::size_t>(std::count(neg.begin(), neg.end(), true));

  detail::LayoutBuilder layout;
  const auto p = layout.add("p", m);
  const auto s = layout.add("s", n);
  const auto v = layout.add("v", num_neg);
  const auto q = layout.add("q", 1);

  StandardLp lp;
  const auto rows = static_cast<Eigen::Index>(n + 1);
  lp.A = Matrix::Zero(rows, static_cast<Eigen::Index>(layout.total()));
  lp.b = Vector::Zero(rows);
  lp.c = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
  lp.meta.initial_basis.resize(n + 1);

  std::size_t next_v = v;
  for (std::size_t j = 0; j < n; ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    const double f0 = d.value(j, omega0);
    const double sign = neg[j] ? -1.0 : 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      lp.A(row, static_cast<Eigen::Index>(p + k)) = sign * (f0 - d.value(j, others[k]));
    }
    lp.A(row, static_cast<Eigen::Index>(s + j)) = sign;
    lp.b(row) = sign * f0;
    if (neg[j]) {
      lp.A(row, static_cast<Eigen::Index>(next_v)) = 1.0;
      lp.c(static_cast<Eigen::Index>(next_v)) = 1.0;
      lp.meta.initial_basis[j] = next_v;
      ++next_v;
    } else {
      lp.meta.initial_basis[j] = s + j;
    }
  }
  const auto last = static_cast<Eigen::Index>(n);
  for (std::size_t k = 0; k < m; ++k) lp.A(last, static_cast<Eigen::Index>(p + k)) = 1.0;
  lp.A(last, static_cast<Eigen::Index>(q)) = 1.0;
  lp.b(last) = 1.0;
  lp.meta.initial_basis[n] = q;

  lp.meta.kind = FormulationKind::D3;
  lp.meta.omega0 = omega0;
  lp.meta.layout = layout.take();
  lp.meta.fully_degenerate = false;
  return lp;
}

/// Phase-1 program for the slack form of the reduced dual, with the closed-form interior start
/// p0(w) = q0 = 1/|Omega|, gamma0 = 1.
/// Columns: p (|Omega|-1), t (n), q, gamma. Rows: one per gamble, then sum p + q = 1.
inline std::pair<StandardLp, StartPoint> build_d4_phase1(const GambleSet& d, std::size_t omega0) {
  detail::require_omega0(d, omega0);
  const std::size_t n = d.num_gambles();
  const auto others = other_outcomes(d, omega0);
  const std::size_t m = others.size();
  const double p0 = 1.0 / static_cast<double>(d.num_outcomes());

  detail::LayoutBuilder layout;
  const auto p = layout.add("p", m);
  const auto t = layout.add("t", n);
  const auto q = layout.add("q", 1);
  const auto gamma = layout.add("gamma", 1);

  StandardLp lp;
  const auto rows = static_cast<Eigen::Index>(n + 1);
  const auto cols = static_cast<Eigen::Index>(layout.total());
  lp.A = Matrix::Zero(rows, cols);
  lp.b = Vector::Zero(rows);
  lp.c = Vector::Zero(cols);
  StartPoint start;
  start.x = Vector::Zero(cols);

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double f0 = d.value(i, omega0);
    double h = f0;
    for (std::size_t k = 0; k < m; ++k) {
      const double a = f0 - d.value(i, others[k]);
      lp.A(row, static_cast<Eigen::Index>(p + k)) = a;
      h -= a * p0;
    }
    const double t0 = h > 0.0 ? h : 1.0;
    const double r = h > 0.0 ? 0.0 : h - t0;
    lp.A(row, static_cast<Eigen::Index>(t + i)) = 1.0;
    lp.A(row, static_cast<Eigen::Index>(gamma)) = r;
    lp.b(row) = f0;
    start.x(static_cast<Eigen::Index>(t + i)) = t0;
  }
  const auto last = static_cast<Eigen::Index>(n);
  for (std::size_t k = 0; k < m; ++k) {
    lp.A(last, static_cast<Eigen::Index>(p + k)) = 1.0;
    start.x(static_cast<Eigen::Index>(p + k)) = p0;
  }
  lp.A(last, static_cast<Eigen::Index>(q)) = 1.0;
  lp.b(last) = 1.0;
  start.x(static_cast<Eigen::Index>(q)) = p0;
  start.x(static_cast<Eigen::Index>(gamma)) = 1.0;
  lp.c(static_cast<Eigen::Index>(gamma)) = 1.0;

  lp.meta.kind = FormulationKind::D4Phase1;
  lp.meta.omega0 = omega0;
  lp.meta.layout = layout.take();
  lp.meta.fully_degenerate = false;
  return {std::move(lp), std::move(start)};
}

/// The coefficients r_i of gamma in the gamble rows of a phase-1 program.
inline Vector phase1_residual_coefficients(const StandardLp& d4p) {
  if (d4p.meta.kind != FormulationKind::D4Phase1) {
    throw Error(ErrorKind::InvalidArgument, "expected a D4Phase1 program");
  }
  const auto& t = d4p.meta.block("t");
  const auto& g = d4p.meta.block("gamma");
  return d4p.A.col(static_cast<Eigen::Index>(g.begin)).head(static_cast<Eigen::Index>(t.size()));
}

/// Dual of the phase-1 program, written in standard form. Its rows are the columns of the
/// phase-1 program (p, t, q, gamma blocks), i.e. A' y + slack = c with y = (lambda, alpha) free:
///   p(w):   sum_i (f_i(w0) - f_i(w)) lambda_i + alpha + s(w) = 0
///   t_i:    lambda_i + u_i = 0
///   q:      alpha + beta = 0
///   gamma:  sum_i r_i lambda_i + mu = 1
/// The free variables are split; objective is max sum_i f_i(w0) lambda_i + alpha, stored as a minimization.
/// Columns: lambda_plus (n), lambda_minus (n), alpha_plus, alpha_minus, s (|Omega|-1), u (n), beta, mu.
inline StandardLp build_p4prime(const StandardLp& d4p) {
  if (d4p.meta.kind != FormulationKind::D4Phase1) {
    throw Error(ErrorKind::InvalidArgument, "build_p4prime expects a D4Phase1 program");
  }
  const std::size_t n = d4p.meta.block("t").size();
  const std::size_t m = d4p.meta.block("p").size();
  const auto rows = static_cast<Eigen::Index>(d4p.cols());  // m + n + 2
  detail::LayoutBuilder layout;
  const auto lp_ = layout.add("lambda_plus", n);
  const auto lm = layout.add("lambda_minus", n);
  const auto ap = layout.add("alpha_plus", 1);
  const auto am = layout.add("alpha_minus", 1);
  const auto s = layout.add("s", m);
  const auto u = layout.add("u", n);
  const auto beta = layout.add("beta", 1);
  const auto mu = layout.add("mu", 1);

  StandardLp lp;
  lp.A = Matrix::Zero(rows, static_cast<Eigen::Index>(layout.total()));
  lp.b = d4p.c;
  lp.c = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
  const Matrix At = d4p.A.transpose();
  // y = (lambda_1..lambda_n, alpha) indexes the rows of the phase-1 program.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      lp.A(r, static_cast<Eigen::Index>(lp_ + i)) = At(r, static_cast<Eigen::Index>(i));
      lp.A(r, static_cast<Eigen::Index>(lm + i)) = -At(r, static_cast<Eigen::Index>(i));
    }
    lp.A(r, static_cast<Eigen::Index>(ap)) = At(r, static_cast<Eigen::Index>(n));
    lp.A(r, static_cast<Eigen::Index>(am)) = -At(r, static_cast<Eigen::Index>(n));
  }
  // One slack per phase-1 column, in the same order: s for p, u for t, beta for q, mu for gamma.
  for (std::size_t k = 0; k < m; ++k) lp.A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s + k)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) lp.A(static_cast<Eigen::Index>(m + i), static_cast<Eigen::Index>(u + i)) = 1.0;
  lp.A(static_cast<Eigen::Index>(m + n), static_cast<Eigen::Index>(beta)) = 1.0;
  lp.A(static_cast<Eigen::Index>(m + n + 1), static_cast<Eigen::Index>(mu)) = 1.0;

  for (std::size_t i = 0; i < n; ++i) {
    lp.c(static_cast<Eigen::Index>(lp_ + i)) = -d4p.b(static_cast<Eigen::Index>(i));
    lp.c(static_cast<Eigen::Index>(lm + i)) = d4p.b(static_cast<Eigen::Index>(i));
  }
  lp.c(static_cast<Eigen::Index>(ap)) = -d4p.b(static_cast<Eigen::Index>(n));
  lp.c(static_cast<Eigen::Index>(am)) = d4p.b(static_cast<Eigen::Index>(n));

  lp.meta.kind = FormulationKind::P4Prime;
  lp.meta.omega0 = d4p.meta.omega0;
  lp.meta.layout = layout.take();
  lp.meta.fully_degenerate = false;
  return lp;
}

/// Closed-form interior point of  sum_i a_ij lambda_i - alpha + s_j = b_j  with lambda, alpha, s > 0.
/// a_ij and b_j are read from the lambda block of `lp`; lambda_i = lambda0 for every i.
inline StartPoint start_point_p3(const StandardLp& lp, double lambda0 = 1.0) {
  if (lp.meta.kind != FormulationKind::P3) throw Error(ErrorKind::InvalidArgument, "start_point_p3 expects a P3 program");
  if (!(lambda0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda0 must be positive");
  const auto& lam = lp.meta.block("lambda");
  const auto& alpha = lp.meta.block("alpha");
  const auto& s = lp.meta.block("s");
  const auto m = static_cast<Eigen::Index>(lp.rows());

  Vector slack_base(m);  // b_j - sum_i a_ij lambda0
  for (Eigen::Index j = 0; j < m; ++j) {
    double acc = lp.b(j);
    for (std::size_t i = lam.begin; i < lam.end; ++i) acc -= lp.A(j, static_cast<Eigen::Index>(i)) * lambda0;
    slack_base(j) = acc;
  }
  const double delta = m > 0 ? slack_base.minCoeff() : 0.0;
  const double alpha0 = 1.0 + std::max(0.0, -delta);

  StartPoint sp;
  sp.x = Vector::Zero(static_cast<Eigen::Index>(lp.cols()));
  for (std::size_t i = lam.begin; i < lam.end; ++i) sp.x(static_cast<Eigen::Index>(i)) = lambda0;
  sp.x(static_cast<Eigen::Index>(alpha.begin)) = alpha0;
  for (Eigen::Index j = 0; j < m; ++j) sp.x(static_cast<Eigen::Index>(s.begin) + j) = slack_base(j) + alpha0;
  return sp;
}

/// Dual-side start for the primal-dual run on P3: v(w) = -1/|Omega|, and slacks
/// t_i = 1 (lambda columns), q = 1/|Omega| (alpha column), p(w) = 1/|Omega| (s columns).
inline StartPoint start_point_d5(std::size_t n, std::size_t m_omega) {
  if (n < 1 || m_omega < 2) throw Error(ErrorKind::InvalidArgument, "start_point_d5 needs n >= 1 and |Omega| >= 2");
  const double inv = 1.0 / static_cast<double>(m_omega);
  const auto m = static_cast<Eigen::Index>(m_omega - 1);
  const auto nn = static_cast<Eigen::Index>(n);
  StartPoint sp;
  sp.y = Vector::Constant(m, -inv);
  sp.t = Vector(nn + 1 + m);
  sp.t.head(nn).setOnes();
  sp.t(nn) = inv;
  sp.t.tail(m).setConstant(inv);
  return sp;
}

/// Interior start for the dual of the phase-1 program.
/// lambda_i = -c with c = 0.5 / (1 + sum_j |r_j|), so sum_i r_i lambda_i < 1;
/// u = -lambda, mu = 1 - sum_i r_i lambda_i, and (beta, s) from the closed-form interior point
/// after substituting alpha = -beta.
///
/// y = (lambda, alpha) and t = (s, u, beta, mu) pair with the phase-1 program's rows and columns.
/// x is the same point in the split standard form of `lp`, shifted so every entry is positive.
inline StartPoint start_point_p4prime(const StandardLp& lp) {
  if (lp.meta.kind != FormulationKind::P4Prime) {
    throw Error(ErrorKind::InvalidArgument, "start_point_p4prime expects a P4Prime program");
  }
  const auto& lp_blk = lp.meta.block("lambda_plus");
  const auto& s_blk = lp.meta.block("s");
  const std::size_t n = lp_blk.size();
  const std::size_t m = s_blk.size();
  const auto gamma_row = static_cast<Eigen::Index>(m + n + 1);

  double sum_abs_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum_abs_r += std::abs(lp.A(gamma_row, static_cast<Eigen::Index>(lp_blk.begin + i)));
  const double c_lambda = 0.5 / (1.0 + sum_abs_r);

  Vector lambda = Vector::Constant(static_cast<Eigen::Index>(n), -c_lambda);
  double r_dot_lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r_dot_lambda += lp.A(gamma_row, static_cast<Eigen::Index>(lp_blk.begin + i)) * lambda(static_cast<Eigen::Index>(i));
  }
  const double mu = 1.0 - r_dot_lambda;

  // Rows k < m:  sum_i a_ik lambda_i - beta + s_k = 0.
  Vector slack_base(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc -= lp.A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(lp_blk.begin + i)) * lambda(static_cast<Eigen::Index>(i));
    }
    slack_base(static_cast<Eigen::Index>(k)) = acc;
  }
  const double delta = m > 0 ? slack_base.minCoeff() : 0.0;
  const double beta = 1.0 + std::max(0.0, -delta);
  const double alpha = -beta;

  StartPoint sp;
  sp.y = Vector(static_cast<Eigen::Index>(n + 1));
  sp.y.head(static_cast<Eigen::Index>(n)) = lambda;
  sp.y(static_cast<Eigen::Index>(n)) = alpha;
  sp.t = Vector(static_cast<Eigen::Index>(m + n + 2));
  sp.t.head(static_cast<Eigen::Index>(m)) = slack_base.array() + beta;
  sp.t.segment(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = -lambda;
  sp.t(static_cast<Eigen::Index>(m + n)) = beta;
  sp.t(static_cast<Eigen::Index>(m + n + 1)) = mu;

  sp.x = Vector::Zero(static_cast<Eigen::Index>(lp.cols()));
  const auto& lm_blk = lp.meta.block("lambda_minus");
  for (std::size_t i = 0; i < n; ++i) {
    sp.x(static_cast<Eigen::Index>(lp_blk.begin + i)) = 1.0;
    sp.x(static_cast<Eigen::Index>(lm_blk.begin + i)) = 1.0 - lambda(static_cast<Eigen::Index>(i));
  }
  sp.x(static_cast<Eigen::Index>(lp.meta.block("alpha_plus").begin)) = 1.0;
  sp.x(static_cast<Eigen::Index>(lp.meta.block("alpha_minus").begin)) = 1.0 - alpha;
  const auto slack_begin = static_cast<Eigen::Index>(s_blk.begin);
  sp.x.segment(slack_begin, sp.t.size()) = sp.t;  // s, u, beta, mu are contiguous in both
  return sp;
}

// Plain-text listing:
//   LP <kind>
//   SIZE <rows> <cols>
//   OMEGA0 <index>            (optional)
//   DEGENERATE <0|1>
//   BLOCK <name> <begin> <end>
//   BASIS <j0> <j1> ...       (optional)
//   COST <j> <value>          (nonzeros)
//   ENTRY <i> <j> <value>     (nonzeros)
//   RHS <i> <value>           (nonzeros)
//   START <j> <value>         (optional, primal start)
//   END

inline void dump_lp(std::ostream& out, const StandardLp& lp, const StartPoint* start = nullptr) {
  out << std::setprecision(17);
  out << "LP " << to_string(lp.meta.kind) << '\n';
  out << "SIZE " << lp.rows() << ' ' << lp.cols() << '\n';
  if (lp.meta.omega0) out << "OMEGA0 " << *lp.meta.omega0 << '\n';
  out << "DEGENERATE " << (lp.meta.fully_degenerate ? 1 : 0) << '\n';
  for (const auto& b : lp.meta.layout) out << "BLOCK " << b.name << ' ' << b.begin << ' ' << b.end << '\n';
  if (!lp.meta.initial_basis.empty()) {
    out << "BASIS";
    for (auto j : lp.meta.initial_basis) out << ' ' << j;
    out << '\n';
  }
  for (Eigen::Index j = 0; j < lp.c.size(); ++j) {
    if (lp.c(j) != 0.0) out << "COST " << j << ' ' << lp.c(j) << '\n';
  }
  for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < lp.A.cols(); ++j) {
      if (lp.A(i, j) != 0.0) out << "ENTRY " << i << ' ' << j << ' ' << lp.A(i, j) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < lp.b.size(); ++i) {
    if (lp.b(i) != 0.0) out << "RHS " << i << ' ' << lp.b(i) << '\n';
  }
  if (start != nullptr && start->has_x()) {
    for (Eigen::Index j = 0; j < start->x.size(); ++j) out << "START " << j << ' ' << start->x(j) << '\n';
  }
  out << "END\n";
}

struct LpListing {
  StandardLp lp;
  std::optional<Vector> start;
};

inline LpListing parse_lp(std::istream& in) {
  LpListing listing;
  auto& lp = listing.lp;
  bool sized = false;
  bool ended = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) { throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + msg); };
  auto check_col = [&](long long j) {
    if (!sized) fail("entry before SIZE");
    if (j < 0 || j >= lp.A.cols()) fail("column index out of range");
  };
  auto check_row = [&](long long i) {
    if (!sized) fail("entry before SIZE");
    if (i < 0 || i >= lp.A.rows()) fail("row index out of range");
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "LP") {
      std::string kind;
      if (!(ls >> kind)) fail("missing kind");
      lp.meta.kind = formulation_kind_from_string(kind);
    } else if (tag == "SIZE") {
      long long r = -1, c = -1;
      if (!(ls >> r >> c) || r < 0 || c < 0) fail("bad SIZE");
      lp.A = Matrix::Zero(r, c);
      lp.b = Vector::Zero(r);
      lp.c = Vector::Zero(c);
      sized = true;
    } else if (tag == "OMEGA0") {
      std::size_t w = 0;
      if (!(ls >> w)) fail("bad OMEGA0");
      lp.meta.omega0 = w;
    } else if (tag == "DEGENERATE") {
      int flag = 0;
      if (!(ls >> flag)) fail("bad DEGENERATE");
      lp.meta.fully_degenerate = flag != 0;
    } else if (tag == "BLOCK") {
      ColumnBlock b;
      if (!(ls >> b.name >> b.begin >> b.end)) fail("bad BLOCK");
      lp.meta.layout.push_back(b);
    } else if (tag == "BASIS") {
      long long j = 0;
      while (ls >> j) {
        check_col(j);
        lp.meta.initial_basis.push_back(static_cast<std::size_t>(j));
      }
    } else if (tag == "COST") {
      long long j = 0;
      double v = 0;
      if (!(ls >> j >> v)) fail("bad COST");
      check_col(j);
      lp.c(j) = v;
    } else if (tag == "ENTRY") {
      long long i = 0, j = 0;
      double v = 0;
      if (!(ls >> i >> j >> v)) fail("bad ENTRY");
      check_row(i);
      check_col(j);
      lp.A(i, j) = v;
    } else if (tag == "RHS") {
      long long i = 0;
      double v = 0;
      if (!(ls >> i >> v)) fail("bad RHS");
      check_row(i);
      lp.b(i) = v;
    } else if (tag == "START") {
      long long j = 0;
      double v = 0;
      if (!(ls >> j >> v)) fail("bad START");
      check_col(j);
      if (!listing.start) listing.start = Vector::Zero(lp.A.cols());
      (*listing.start)(j) = v;
    } else if (tag == "END") {
      ended = true;
      break;
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!sized) throw Error(ErrorKind::Parse, "missing SIZE");
  if (!ended) throw Error(ErrorKind::Parse, "missing END");
  lp.validate();
  return listing;
}

}  // namespace aslcheck
