#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aslcheck/error.hpp"

namespace aslcheck {

/// Finite outcome space with stable, unique string labels.
class OutcomeSpace {
 public:
  explicit OutcomeSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw Error(ErrorKind::InvalidArgument, "outcome space must be nonempty");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (!seen.insert(l).second) throw Error(ErrorKind::InvalidArgument, "duplicate outcome label '" + l + "'");
    }
  }

  /// Labels "w0", "w1", ... for generated instances.
  static OutcomeSpace indexed(std::size_t size) {
    std::vector<std::string> labels;
    labels.reserve(size);
    for (std::size_t i = 0; i < size; ++i) labels.push_back("w" + std::to_string(i));
    return OutcomeSpace(std::move(labels));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  friend bool operator==(const OutcomeSpace&, const OutcomeSpace&) = default;

 private:
  std::vector<std::string> labels_;
};

/// A payoff per outcome. All entries finite.
class Gamble {
 public:
  Gamble() = default;
  explicit Gamble(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "gamble entries must be finite");
    }
  }
  Gamble(std::initializer_list<double> values) : Gamble(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  Gamble shifted(double c) const {
    std::vector<double> out(values_);
    for (double& v : out) v += c;
    return Gamble(std::move(out));
  }
  Gamble scaled(double c) const {
    std::vector<double> out(values_);
    for (double& v : out) v *= c;
    return Gamble(std::move(out));
  }

  friend bool operator==(const Gamble&, const Gamble&) = default;

 private:
  std::vector<double> values_;
};

/// The set of desirable gambles under test: n >= 1 gambles on a common space.
class GambleSet {
 public:
  GambleSet(OutcomeSpace space, std::vector<Gamble> gambles)
      : space_(std::move(space)), gambles_(std::move(gambles)) {
    if (gambles_.empty()) throw Error(ErrorKind::InvalidArgument, "gamble set must contain at least one gamble");
    for (const auto& g : gambles_) {
      if (g.size() != space_.size()) {
        throw Error(ErrorKind::DimensionMismatch, "gamble has " + std::to_string(g.size()) +
                                                      " entries, outcome space has " + std::to_string(space_.size()));
      }
    }
  }

  /// Convenience for generated or test data: rows are gambles, outcomes labelled w0.. .
  static GambleSet from_rows(std::vector<std::vector<double>> rows) {
    if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "gamble set must contain at least one gamble");
    auto space = OutcomeSpace::indexed(rows.front().size());
    std::vector<Gamble> gambles;
    gambles.reserve(rows.size());
    for (auto& r : rows) gambles.emplace_back(std::move(r));
    return GambleSet(std::move(space), std::move(gambles));
  }

  const OutcomeSpace& space() const noexcept { return space_; }
  std::size_t num_outcomes() const noexcept { return space_.size(); }
  std::size_t num_gambles() const noexcept { return gambles_.size(); }
  const std::vector<Gamble>& gambles() const noexcept { return gambles_; }
  const Gamble& operator[](std::size_t i) const { return gambles_[i]; }

  /// f_i(w)
  double value(std::size_t gamble, std::size_t outcome) const { return gambles_[gamble][outcome]; }

  GambleSet with_gamble(Gamble g) const {
    auto gambles = gambles_;
    gambles.push_back(std::move(g));
    return GambleSet(space_, std::move(gambles));
  }
  GambleSet without_gamble(std::size_t index) const {
    auto gambles = gambles_;
    gambles.erase(gambles.begin() + static_cast<std::ptrdiff_t>(index));
    return GambleSet(space_, std::move(gambles));
  }

  friend bool operator==(const GambleSet&, const GambleSet&) = default;

 private:
  OutcomeSpace space_;
  std::vector<Gamble> gambles_;
};

inline constexpr double kPmfTolerance = 1e-12;

/// Probability mass function: nonnegative, sums to one.
class Pmf {
 public:
  /// Renormalizes when the sum is within kPmfTolerance of one, rejects otherwise.
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw Error(ErrorKind::InvalidArgument, "pmf must be nonempty");
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0) throw Error(ErrorKind::InvalidArgument, "pmf entries must be finite and >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kPmfTolerance) {
      throw Error(ErrorKind::InvalidArgument, "pmf entries sum to " + std::to_string(sum));
    }
    for (double& p : probs_) p /= sum;
  }
  Pmf(std::initializer_list<double> probs) : Pmf(std::vector<double>(probs)) {}

  /// Projects an approximate mass vector (e.g. read off a solver iterate) onto the simplex
  /// by clipping negatives and dividing by the total.
  static Pmf from_weights(std::vector<double> weights) {
    double sum = 0.0;
    for (double& w : weights) {
      if (!std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "pmf weights must be finite");
      w = std::max(w, 0.0);
      sum += w;
    }
    if (!(sum > 0.0)) throw Error(ErrorKind::InvalidArgument, "pmf weights have no positive mass");
    for (double& w : weights) w /= sum;
    return Pmf(std::move(weights));
  }

  static Pmf uniform(std::size_t size) { return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size))); }

  static Pmf point_mass(std::size_t size, std::size_t at) {
    std::vector<double> p(size, 0.0);
    p.at(at) = 1.0;
    return Pmf(std::move(p));
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

 private:
  std::vector<double> probs_;
};

namespace detail {
inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}
}  // namespace detail

/// E_p(f)
inline double expectation(const Pmf& p, const Gamble& f) {
  detail::require_same_size(p.size(), f.size(), "expectation");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] * f[i];
  return sum;
}

struct Prevision {
  Pmf pmf;
};

struct Polyhedral {
  std::vector<Pmf> pmfs;
};

struct LinearVacuous {
  Pmf pmf;
  double delta;
};

struct Vacuous {};

/// The four lower prevision families used to build instances.
class LowerPrevision {
 public:
  using Variant = std::variant<Prevision, Polyhedral, LinearVacuous, Vacuous>;

  template <class T>
    requires(!std::is_same_v<std::decay_t<T>, LowerPrevision> && std::is_constructible_v<Variant, T &&>)
  LowerPrevision(T&& v) : v_(std::forward<T>(v)) {  // NOLINT(google-explicit-constructor)
    if (const auto* poly = std::get_if<Polyhedral>(&v_)) {
      if (poly->pmfs.empty()) throw Error(ErrorKind::InvalidArgument, "polyhedral lower prevision needs >= 1 pmf");
      for (const auto& p : poly->pmfs) detail::require_same_size(p.size(), poly->pmfs.front().size(), "polyhedral pmfs");
    }
    if (const auto* lv = std::get_if<LinearVacuous>(&v_)) {
      if (!(lv->delta >= 0.0 && lv->delta <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "linear-vacuous delta must lie in [0,1]");
      }
    }
  }

  const Variant& variant() const noexcept { return v_; }

  template <class T>
  bool holds() const noexcept {
    return std::holds_alternative<T>(v_);
  }

  /// Lower prevision of f.
  double evaluate(const Gamble& f) const {
    return std::visit(
        [&](const auto& lp) -> double {
          using T = std::decay_t<decltype(lp)>;
          if constexpr (std::is_same_v<T, Prevision>) {
            return expectation(lp.pmf, f);
          } else if constexpr (std::is_same_v<T, Polyhedral>) {
            double best = expectation(lp.pmfs.front(), f);
            for (std::size_t j = 1; j < lp.pmfs.size(); ++j) best = std::min(best, expectation(lp.pmfs[j], f));
            return best;
          } else if constexpr (std::is_same_v<T, LinearVacuous>) {
            return (1.0 - lp.delta) * expectation(lp.pmf, f) + lp.delta * f.min();
          } else {
            if (f.size() == 0) throw Error(ErrorKind::DimensionMismatch, "vacuous evaluation of an empty gamble");
            return f.min();
          }
        },
        v_);
  }

 private:
  Variant v_;
};

inline double evaluate(const LowerPrevision& lp, const Gamble& f) { return lp.evaluate(f); }

// JSON schema: {"outcomes": ["a", ...], "gambles": [[...], ...]}

inline nlohmann::json to_json(const GambleSet& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& g : d.gambles()) rows.push_back(std::vector<double>(g.values().begin(), g.values().end()));
  return nlohmann::json{{"outcomes", d.space().labels()}, {"gambles", rows}};
}

inline GambleSet gamble_set_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("outcomes") || !j.contains("gambles")) {
      throw Error(ErrorKind::Parse, "expected an object with \"outcomes\" and \"gambles\"");
    }
    OutcomeSpace space(j.at("outcomes").get<std::vector<std::string>>());
    std::vector<Gamble> gambles;
    for (const auto& row : j.at("gambles")) gambles.emplace_back(row.get<std::vector<double>>());
    return GambleSet(std::move(space), std::move(gambles));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

}  // namespace aslcheck
