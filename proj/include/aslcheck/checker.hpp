#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aslcheck/core.hpp"
#include "aslcheck/error.hpp"
#include "aslcheck/lp.hpp"
#include "aslcheck/solvers/affine.hpp"
#include "aslcheck/solvers/options.hpp"
#include "aslcheck/solvers/primal_dual.hpp"
#include "aslcheck/solvers/simplex.hpp"

namespace aslcheck {

enum class Method { Simplex, AffineScaling, PrimalDual };
enum class Formulation { P3, D3, D4Prime };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Simplex: return "simplex";
    case Method::AffineScaling: return "affine";
    case Method::PrimalDual: return "primal-dual";
  }
  return "?";
}

inline const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::P3: return "P3";
    case Formulation::D3: return "D3";
    case Formulation::D4Prime: return "D4prime";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  for (auto m : {Method::Simplex, Method::AffineScaling, Method::PrimalDual}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + s + "' (expected simplex, affine or primal-dual)");
}

inline Formulation formulation_from_string(const std::string& s) {
  for (auto f : {Formulation::P3, Formulation::D3, Formulation::D4Prime}) {
    if (s == to_string(f)) return f;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown formulation '" + s + "' (expected P3, D3 or D4prime)");
}

/// The method/formulation pairs that are supported.
inline constexpr std::array<std::pair<Method, Formulation>, 6> kMethodPairs{{
    {Method::Simplex, Formulation::P3},
    {Method::Simplex, Formulation::D3},
    {Method::AffineScaling, Formulation::P3},
    {Method::AffineScaling, Formulation::D4Prime},
    {Method::PrimalDual, Formulation::P3},
    {Method::PrimalDual, Formulation::D4Prime},
}};

inline bool is_supported(Method m, Formulation f) {
  return std::find(kMethodPairs.begin(), kMethodPairs.end(), std::pair{m, f}) != kMethodPairs.end();
}

struct MethodChoice {
  Method method = Method::PrimalDual;
  Formulation formulation = Formulation::P3;
  SolverOptions options;

  /// Default options for the pair: the interior methods stop early on a negative objective
  /// when solving the fully degenerate reduced primal.
  static MethodChoice make(Method method, Formulation formulation) {
    MethodChoice choice{method, formulation, {}};
    choice.options.early_negative = formulation == Formulation::P3 && method != Method::Simplex;
    choice.validate();
    return choice;
  }

  void validate() const {
    if (!is_supported(method, formulation)) {
      throw Error(ErrorKind::InvalidArgument, std::string("unsupported combination ") + to_string(method) + " x " +
                                                  to_string(formulation));
    }
    options.validate();
  }

  std::string label() const { return std::string(to_string(method)) + "/" + to_string(formulation); }
};

inline constexpr double kCertTolerance = 1e-6;
inline constexpr double kGammaTolerance = 1e-7;

/// A pmf with E_p(f_i) >= 0 for every gamble.
struct AslWitness {
  Pmf p;
};

/// A nonnegative combination whose payoff is negative everywhere; alpha is its maximum payoff.
struct SureLossWitness {
  std::vector<double> lambda;
  double alpha = 0.0;
};

using Certificate = std::variant<AslWitness, SureLossWitness>;

struct AslVerdict {
  bool avoids = false;
  Certificate certificate;
  SolveOutcome diagnostics;
  /// The closed-form optimum for an outcome where every gamble is nonnegative fired.
  bool fast_path = false;
  /// The certificate read off the requested method failed verification and was re-derived
  /// from the simplex method on D3.
  bool used_fallback = false;
};

/// Thrown when a check cannot produce a trustworthy verdict; carries the solver diagnostics.
class CheckError : public Error {
 public:
  CheckError(ErrorKind kind, const std::string& what, SolveOutcome diagnostics)
      : Error(kind, what), diagnostics_(std::move(diagnostics)) {}
  const SolveOutcome& diagnostics() const noexcept { return diagnostics_; }

 private:
  SolveOutcome diagnostics_;
};

inline double max_combination(const GambleSet& d, std::span<const double> lambda) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < d.num_outcomes(); ++w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.num_gambles(); ++i) acc += lambda[i] * d.value(i, w);
    best = std::max(best, acc);
  }
  return best;
}

inline bool verify(const GambleSet& d, const AslWitness& w, double tol = kCertTolerance) {
  if (w.p.size() != d.num_outcomes()) return false;
  return std::all_of(d.gambles().begin(), d.gambles().end(),
                     [&](const Gamble& f) { return expectation(w.p, f) >= -tol; });
}

inline bool verify(const GambleSet& d, const SureLossWitness& w, double tol = kCertTolerance) {
  if (w.lambda.size() != d.num_gambles()) return false;
  double l1 = 0.0;
  for (double l : w.lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) return false;
    l1 += l;
  }
  if (!(l1 > 0.0)) return false;
  return max_combination(d, w.lambda) <= -tol * std::max(1.0, l1);
}

inline bool verify(const GambleSet& d, const Certificate& c, double tol = kCertTolerance) {
  return std::visit([&](const auto& w) { return verify(d, w, tol); }, c);
}

namespace detail {

inline std::optional<SureLossWitness> make_sure_loss_witness(const GambleSet& d, std::vector<double> lambda) {
  double l1 = 0.0;
  for (double& l : lambda) {
    if (!std::isfinite(l)) return std::nullopt;
    l = std::max(l, 0.0);
    l1 += l;
  }
  if (!(l1 > 0.0)) return std::nullopt;
  for (double& l : lambda) l /= l1;
  SureLossWitness w{std::move(lambda), 0.0};
  w.alpha = max_combination(d, w.lambda);
  return w;
}

/// pmf from reduced-space masses: others[k] gets mass[k], omega0 gets q.
inline std::optional<AslWitness> make_asl_witness(const GambleSet& d, std::size_t omega0, const Vector& mass, double q) {
  std::vector<double> weights(d.num_outcomes(), 0.0);
  const auto others = other_outcomes(d, omega0);
  for (std::size_t k = 0; k < others.size(); ++k) weights[others[k]] = mass(static_cast<Eigen::Index>(k));
  weights[omega0] = q;
  try {
    return AslWitness{Pmf::from_weights(std::move(weights))};
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::vector<double> block_values(const StandardLp& lp, const Vector& v, const std::string& name) {
  const auto& blk = lp.meta.block(name);
  return {v.data() + blk.begin, v.data() + blk.end};
}

struct RawVerdict {
  bool avoids = false;
  std::optional<Certificate> certificate;
  SolveOutcome outcome;
};

[[noreturn]] inline void fail_on_status(const SolveOutcome& out, const std::string& label) {
  throw CheckError(ErrorKind::IterationLimit,
                   label + " ended with status " + to_string(out.status) + " after " + std::to_string(out.iterations) +
                       " iterations",
                   out);
}

/// Fully degenerate reduced primal: objective ~ 0 means avoiding sure loss, a negative value or a
/// ray means sure loss with lambda read off the lambda block.
inline RawVerdict interpret_p3(const GambleSet& d, const StandardLp& lp, const SolveOutcome& out, const std::string& label) {
  RawVerdict v{false, std::nullopt, out};
  const std::size_t omega0 = *lp.meta.omega0;
  switch (out.status) {
    case SolveStatus::Optimal: {
      v.avoids = true;
      if (out.y.size() == static_cast<Eigen::Index>(lp.rows())) {
        // Dual of the reduced primal: p(w) = -v(w), p(omega0) = 1 + sum v.
        if (auto w = make_asl_witness(d, omega0, -out.y, 1.0 + out.y.sum())) v.certificate = *w;
      }
      return v;
    }
    case SolveStatus::Unbounded:
    case SolveStatus::EarlyNegative: {
      v.avoids = false;
      const Vector& source = out.ray.size() > 0 ? out.ray : out.x;
      if (auto w = make_sure_loss_witness(d, block_values(lp, source, "lambda"))) v.certificate = *w;
      return v;
    }
    default:
      fail_on_status(out, label);
  }
}

/// Phase-1 programs (D3, D4'): zero optimum means a feasible pmf; a positive optimum yields the
/// sure-loss combination from the duals of the gamble rows, lambda_j = -sign_j * y_j.
inline RawVerdict interpret_phase_one(const GambleSet& d, const StandardLp& lp, const SolveOutcome& out,
                                      std::span<const double> row_sign, const std::string& label) {
  RawVerdict v{false, std::nullopt, out};
  if (out.status != SolveStatus::Optimal) fail_on_status(out, label);
  const std::size_t omega0 = *lp.meta.omega0;
  const double value = out.objective.value_or(0.0);
  if (value <= kGammaTolerance) {
    v.avoids = true;
    const auto& p = lp.meta.block("p");
    const auto& q = lp.meta.block("q");
    const Vector mass = out.x.segment(static_cast<Eigen::Index>(p.begin), static_cast<Eigen::Index>(p.size()));
    if (auto w = make_asl_witness(d, omega0, mass, out.x(static_cast<Eigen::Index>(q.begin)))) v.certificate = *w;
    return v;
  }
  v.avoids = false;
  if (out.y.size() == static_cast<Eigen::Index>(lp.rows())) {
    std::vector<double> lambda(d.num_gambles());
    for (std::size_t j = 0; j < d.num_gambles(); ++j) lambda[j] = -row_sign[j] * out.y(static_cast<Eigen::Index>(j));
    if (auto w = make_sure_loss_witness(d, std::move(lambda))) v.certificate = *w;
  }
  return v;
}

inline RawVerdict solve_formulation(const GambleSet& d, std::size_t omega0, const MethodChoice& choice) {
  const std::string label = choice.label();
  const auto& opts = choice.options;
  switch (choice.formulation) {
    case Formulation::P3: {
      const StandardLp lp = build_p3(d, omega0);
      SolveOutcome out;
      if (choice.method == Method::Simplex) {
        out = revised_simplex(lp, lp.meta.initial_basis, opts);
      } else if (choice.method == Method::AffineScaling) {
        out = affine_scaling(lp, start_point_p3(lp), opts);
      } else {
        StartPoint start = start_point_d5(d.num_gambles(), d.num_outcomes());
        start.x = start_point_p3(lp).x;
        out = primal_dual(lp, start, opts);
      }
      return interpret_p3(d, lp, out, label);
    }
    case Formulation::D3: {
      const StandardLp lp = build_d3(d, omega0);
      std::vector<double> sign(d.num_gambles());
      const auto neg = negative_at_omega0(d, omega0);
      for (std::size_t j = 0; j < sign.size(); ++j) sign[j] = neg[j] ? -1.0 : 1.0;
      return interpret_phase_one(d, lp, revised_simplex(lp, lp.meta.initial_basis, opts), sign, label);
    }
    case Formulation::D4Prime: {
      auto [lp, start] = build_d4_phase1(d, omega0);
      SolverOptions phase_one_opts = opts;
      phase_one_opts.early_negative = false;  // not fully degenerate
      SolveOutcome out;
      if (choice.method == Method::AffineScaling) {
        out = affine_scaling(lp, start, phase_one_opts);
      } else {
        const StartPoint dual = start_point_p4prime(build_p4prime(lp));
        start.y = dual.y;
        start.t = dual.t;
        out = primal_dual(lp, start, phase_one_opts);
      }
      const std::vector<double> sign(d.num_gambles(), 1.0);
      return interpret_phase_one(d, lp, out, sign, label);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unreachable formulation");
}

}  // namespace detail

/// Decides whether `d` avoids sure loss with the chosen method and formulation and returns a
/// numerically verified certificate for the verdict.
inline AslVerdict avoids_sure_loss(const GambleSet& d, const MethodChoice& choice) {
  choice.validate();
  const std::size_t omega0 = select_omega0(d);

  bool all_nonnegative = true;
  for (std::size_t i = 0; i < d.num_gambles(); ++i) all_nonnegative = all_nonnegative && d.value(i, omega0) >= 0.0;
  if (all_nonnegative) {
    AslVerdict v{true, AslWitness{Pmf::point_mass(d.num_outcomes(), omega0)}, {}, true, false};
    v.diagnostics.status = SolveStatus::Optimal;
    v.diagnostics.objective = 0.0;
    return v;
  }
  if (d.num_outcomes() == 1) {
    // Some gamble is negative on the only outcome.
    std::vector<double> lambda(d.num_gambles(), 0.0);
    for (std::size_t i = 0; i < d.num_gambles(); ++i) lambda[i] = d.value(i, 0) < 0.0 ? 1.0 : 0.0;
    AslVerdict v{false, *detail::make_sure_loss_witness(d, lambda), {}, true, false};
    v.diagnostics.status = SolveStatus::Unbounded;
    return v;
  }

  detail::RawVerdict raw = detail::solve_formulation(d, omega0, choice);
  if (raw.certificate && verify(d, *raw.certificate)) {
    return AslVerdict{raw.avoids, std::move(*raw.certificate), std::move(raw.outcome), false, false};
  }

  // Interior methods can stop before the terminal iterate yields a clean certificate.
  MethodChoice fallback = MethodChoice::make(Method::Simplex, Formulation::D3);
  fallback.options.feas_tol = choice.options.feas_tol;
  detail::RawVerdict clean = detail::solve_formulation(d, omega0, fallback);
  if (clean.avoids != raw.avoids) {
    throw CheckError(ErrorKind::CertificateFailure,
                     choice.label() + " verdict disagrees with the simplex/D3 re-solve used to extract a certificate",
                     raw.outcome);
  }
  if (!clean.certificate || !verify(d, *clean.certificate)) {
    throw CheckError(ErrorKind::CertificateFailure, "no verifiable certificate for " + choice.label(), raw.outcome);
  }
  return AslVerdict{raw.avoids, std::move(*clean.certificate), std::move(raw.outcome), false, true};
}

// Natural extension of a set of desirable gambles:
//   upper(g) = min beta   s.t. sum_i f_i(w) lambda_i - beta  <= -g(w), lambda >= 0
//   lower(g) = max gamma  s.t. sum_i f_i(w) lambda_i + gamma <=  g(w), lambda >= 0
// The free variable is written as an offset from max g (resp. min g) plus a difference of two
// nonnegative parts, so the slack basis is feasible.

namespace detail {

inline double natural_extension(std::span<const Gamble> e, const Gamble& g, bool upper, const SolverOptions& opts) {
  const std::size_t m = g.size();
  if (m == 0) throw Error(ErrorKind::DimensionMismatch, "empty gamble");
  for (const auto& f : e) require_same_size(f.size(), m, "natural extension");
  const double anchor = upper ? g.max() : g.min();
  if (e.empty()) return anchor;

  const std::size_t n = e.size();
  LayoutBuilder layout;
  const auto lam = layout.add("lambda", n);
  const auto fp = layout.add("free_plus", 1);
  const auto fm = layout.add("free_minus", 1);
  const auto s = layout.add("s", m);
  StandardLp lp;
  lp.A = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(layout.total()));
  lp.b = Vector(static_cast<Eigen::Index>(m));
  lp.c = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
  const double sign = upper ? -1.0 : 1.0;  // coefficient of the free variable
  for (std::size_t w = 0; w < m; ++w) {
    const auto row = static_cast<Eigen::Index>(w);
    for (std::size_t i = 0; i < n; ++i) lp.A(row, static_cast<Eigen::Index>(lam + i)) = e[i][w];
    lp.A(row, static_cast<Eigen::Index>(fp)) = sign;
    lp.A(row, static_cast<Eigen::Index>(fm)) = -sign;
    lp.A(row, static_cast<Eigen::Index>(s + w)) = 1.0;
    lp.b(row) = upper ? anchor - g[w] : g[w] - anchor;
    lp.meta.initial_basis.push_back(s + w);
  }
  // upper: minimise the free part; lower: maximise it.
  lp.c(static_cast<Eigen::Index>(fp)) = upper ? 1.0 : -1.0;
  lp.c(static_cast<Eigen::Index>(fm)) = upper ? -1.0 : 1.0;
  lp.meta.layout = layout.take();

  const SolveOutcome out = revised_simplex(lp, lp.meta.initial_basis, opts);
  if (out.status == SolveStatus::Unbounded) {
    throw CheckError(ErrorKind::Unbounded, "natural extension is unbounded: the gamble set incurs sure loss", out);
  }
  if (out.status != SolveStatus::Optimal) fail_on_status(out, "natural extension");
  const double offset = out.x(static_cast<Eigen::Index>(fp)) - out.x(static_cast<Eigen::Index>(fm));
  return anchor + offset;
}

}  // namespace detail

/// Upper natural extension of g under e: the infimum selling price implied by e.
inline double upper_natural_extension(std::span<const Gamble> e, const Gamble& g, const SolverOptions& opts = {}) {
  return detail::natural_extension(e, g, true, opts);
}
inline double upper_natural_extension(const GambleSet& e, const Gamble& g, const SolverOptions& opts = {}) {
  return upper_natural_extension(std::span<const Gamble>(e.gambles()), g, opts);
}

/// Lower natural extension of g under e: the supremum buying price implied by e.
inline double lower_natural_extension(std::span<const Gamble> e, const Gamble& g, const SolverOptions& opts = {}) {
  return detail::natural_extension(e, g, false, opts);
}
inline double lower_natural_extension(const GambleSet& e, const Gamble& g, const SolverOptions& opts = {}) {
  return lower_natural_extension(std::span<const Gamble>(e.gambles()), g, opts);
}

inline nlohmann::json to_json(const AslVerdict& v, const GambleSet& d, const MethodChoice& choice) {
  nlohmann::json j;
  j["avoids_sure_loss"] = v.avoids;
  j["method"] = to_string(choice.method);
  j["formulation"] = to_string(choice.formulation);
  if (const auto* w = std::get_if<AslWitness>(&v.certificate)) {
    nlohmann::json pmf = nlohmann::json::object();
    for (std::size_t k = 0; k < d.num_outcomes(); ++k) pmf[d.space().label(k)] = w->p[k];
    j["certificate"] = {{"type", "pmf"}, {"p", pmf}};
  } else {
    const auto& s = std::get<SureLossWitness>(v.certificate);
    j["certificate"] = {{"type", "sure_loss"}, {"lambda", s.lambda}, {"max_payoff", s.alpha}};
  }
  j["diagnostics"] = {{"status", to_string(v.diagnostics.status)},
                      {"iterations", v.diagnostics.iterations},
                      {"primal_residual_inf", v.diagnostics.primal_residual_inf},
                      {"dual_residual_inf", v.diagnostics.dual_residual_inf},
                      {"duality_gap", v.diagnostics.duality_gap},
                      {"wall_time_ns", v.diagnostics.wall_time_ns},
                      {"fast_path", v.fast_path},
                      {"used_fallback", v.used_fallback}};
  if (v.diagnostics.objective) j["diagnostics"]["objective"] = *v.diagnostics.objective;
  return j;
}

}  // namespace aslcheck
