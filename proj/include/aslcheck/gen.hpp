#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aslcheck/checker.hpp"
#include "aslcheck/core.hpp"
#include "aslcheck/error.hpp"

namespace aslcheck {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (splitmix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

/// Reproducible random stream identified by (seed, stream_id).
///
/// Draws depend only on the pair: the engine is a fixed-definition mt19937_64 and the conversion
/// to doubles is done here rather than through the implementation-defined std distributions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(hash_combine(splitmix64(seed), stream_id)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent sub-stream for a named role, e.g. the j-th prevision of a polyhedral set.
  RngStream split(std::uint64_t role) const { return RngStream(seed_, hash_combine(stream_id_, role)); }

  /// Uniform on the open interval (0, 1); zero draws are rejected.
  double uniform_open() {
    while (true) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

namespace stream_role {
inline constexpr std::uint64_t kPrevisions = 0x100;
inline constexpr std::uint64_t kGambles = 0x200;
inline constexpr std::uint64_t kExtraGamble = 0x300;
inline constexpr std::uint64_t kBias = 0x400;
inline constexpr std::uint64_t kBase = 0x500;
}  // namespace stream_role

/// p(w) = ln r_w / sum_v ln r_v for r in (0,1)^m.
inline Pmf pmf_from_uniforms(std::span<const double> r) {
  if (r.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one outcome");
  std::vector<double> logs(r.size());
  double total = 0.0;
  for (std::size_t w = 0; w < r.size(); ++w) {
    if (!(r[w] > 0.0 && r[w] < 1.0)) throw Error(ErrorKind::InvalidArgument, "uniform draws must lie in (0,1)");
    logs[w] = std::log(r[w]);
    total += logs[w];
  }
  for (double& l : logs) l /= total;
  return Pmf(std::move(logs));
}

inline Pmf gen_pmf(RngStream& rng, std::size_t m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "need at least one outcome");
  std::vector<double> r(m);
  for (double& v : r) v = rng.uniform_open();
  return pmf_from_uniforms(r);
}

inline LowerPrevision gen_prevision(RngStream& rng, std::size_t m) { return Prevision{gen_pmf(rng, m)}; }

/// Lower envelope of k previsions, each drawn from its own sub-stream.
inline LowerPrevision gen_polyhedral(RngStream& rng, std::size_t m, std::size_t k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "polyhedral lower prevision needs k >= 1");
  std::vector<Pmf> pmfs;
  pmfs.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    RngStream sub = rng.split(stream_role::kPrevisions + j);
    pmfs.push_back(gen_pmf(sub, m));
  }
  return Polyhedral{std::move(pmfs)};
}

inline LowerPrevision gen_linear_vacuous(RngStream& rng, std::size_t m, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "linear-vacuous delta must lie in (0,1)");
  return LinearVacuous{gen_pmf(rng, m), delta};
}

enum class Bias { None, Uniform, Constant };

inline constexpr double kConstantBias = 0.01;

inline const char* to_string(Bias b) {
  switch (b) {
    case Bias::None: return "none";
    case Bias::Uniform: return "uniform";
    case Bias::Constant: return "constant";
  }
  return "?";
}

struct GenSpec {
  std::size_t n_outcomes = 2;
  std::size_t n_gambles = 1;
  std::size_t k_previsions = 32;
  double delta = 0.05;
  Bias bias = Bias::None;

  void validate() const {
    if (n_outcomes < 2) throw Error(ErrorKind::InvalidArgument, "need at least two outcomes");
    if (n_gambles < 1) throw Error(ErrorKind::InvalidArgument, "need at least one gamble");
    if (k_previsions < 1) throw Error(ErrorKind::InvalidArgument, "need at least one prevision");
  }
};

/// Uniform (0,1) payoff per outcome.
inline Gamble gen_uniform_gamble(RngStream& rng, std::size_t m) {
  std::vector<double> v(m);
  for (double& x : v) x = rng.uniform_open();
  return Gamble(std::move(v));
}

/// { f_i - lower(f_i) + eta_i } for uniform random f_i; avoids sure loss because `lower` is coherent
/// and eta_i >= 0.
inline GambleSet gen_asl_set(RngStream& rng, const GenSpec& spec, const LowerPrevision& lower) {
  spec.validate();
  RngStream gamble_rng = rng.split(stream_role::kGambles);
  RngStream bias_rng = rng.split(stream_role::kBias);
  std::vector<Gamble> out;
  out.reserve(spec.n_gambles);
  for (std::size_t i = 0; i < spec.n_gambles; ++i) {
    const Gamble f = gen_uniform_gamble(gamble_rng, spec.n_outcomes);
    double eta = 0.0;
    if (spec.bias == Bias::Uniform) eta = bias_rng.uniform_open();
    if (spec.bias == Bias::Constant) eta = kConstantBias;
    out.push_back(f.shifted(eta - lower.evaluate(f)));
  }
  return GambleSet(OutcomeSpace::indexed(spec.n_outcomes), std::move(out));
}

/// e plus g - upper(g) - delta for a uniform random g; incurs sure loss whenever e avoids it.
inline GambleSet gen_non_asl_set(RngStream& rng, const GambleSet& e, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  RngStream g_rng = rng.split(stream_role::kExtraGamble);
  const Gamble g = gen_uniform_gamble(g_rng, e.num_outcomes());
  const double beta = upper_natural_extension(e, g);
  return e.with_gamble(g.shifted(-beta - delta));
}

/// e plus g - P(g) with P(g) = (1 - delta) lower(g) + delta upper(g); still avoids sure loss.
inline GambleSet extend_asl_set(RngStream& rng, const GambleSet& e, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must lie in [0,1)");
  RngStream g_rng = rng.split(stream_role::kExtraGamble);
  const Gamble g = gen_uniform_gamble(g_rng, e.num_outcomes());
  const double lo = lower_natural_extension(e, g);
  const double hi = upper_natural_extension(e, g);
  const double price = (1.0 - delta) * lo + delta * hi;
  return e.with_gamble(g.shifted(-price));
}

enum class GroundTruth { Asl, NotAsl };

inline const char* to_string(GroundTruth t) { return t == GroundTruth::Asl ? "asl" : "not_asl"; }

inline GroundTruth ground_truth_from_string(const std::string& s) {
  if (s == "asl") return GroundTruth::Asl;
  if (s == "not_asl") return GroundTruth::NotAsl;
  throw Error(ErrorKind::InvalidArgument, "ground truth must be 'asl' or 'not_asl'");
}

/// Benchmark instance with exactly `spec.n_gambles` gambles: for avoiding sure loss a polyhedral
/// lower prevision over k pmfs generates all gambles; otherwise n-1 gambles are generated that way
/// and one violating gamble is appended with margin spec.delta.
inline GambleSet generate_instance(RngStream rng, const GenSpec& spec, GroundTruth truth) {
  spec.validate();
  RngStream prev_rng = rng.split(stream_role::kBase);
  const LowerPrevision lower = gen_polyhedral(prev_rng, spec.n_outcomes, spec.k_previsions);
  if (truth == GroundTruth::Asl) return gen_asl_set(rng, spec, lower);
  if (spec.n_gambles < 2) throw Error(ErrorKind::InvalidArgument, "a sure-loss instance needs at least two gambles");
  GenSpec base = spec;
  base.n_gambles = spec.n_gambles - 1;
  const GambleSet e = gen_asl_set(rng, base, lower);
  return gen_non_asl_set(rng, e, spec.delta);
}

}  // namespace aslcheck
