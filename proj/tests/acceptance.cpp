// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aslcheck/bench.hpp"
#include "aslcheck/checker.hpp"
#include "aslcheck/gen.hpp"
#include "aslcheck/lp.hpp"
#include "aslcheck/oracle.hpp"
#include "aslcheck/solvers/affine.hpp"
#include "aslcheck/solvers/primal_dual.hpp"
#include "aslcheck/solvers/simplex.hpp"

using namespace aslcheck;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kSizes[] = {2, 4, 8, 16};

struct Instance {
  GambleSet d;
  GroundTruth label;
  bool oracle;  // exact verdict on the snapped set `d`
};

struct Tally {
  long checked = 0;
  long failed = 0;
  std::string first_failure;

  void record(bool ok, const std::string& what) {
    ++checked;
    if (!ok) {
      if (failed == 0) first_failure = what;
      ++failed;
    }
  }
  bool pass() const { return failed == 0 && checked > 0; }
};

GenSpec spec_for(std::size_t n, std::size_t m, Bias bias = Bias::None) {
  GenSpec spec;
  spec.n_gambles = n;
  spec.n_outcomes = m;
  spec.k_previsions = 32;
  spec.delta = 0.05;
  spec.bias = bias;
  return spec;
}

// Instance k uses sizes (n, |Omega|) = kSizes[k % 4], kSizes[(k / 4) % 4]; the first half avoids
// sure loss and the second half does not.
Instance corpus_instance(int k, Bias bias = Bias::None) {
  const std::size_t n = kSizes[k % 4];
  const std::size_t m = kSizes[(k / 4) % 4];
  const GroundTruth truth = k < 250 ? GroundTruth::Asl : GroundTruth::NotAsl;
  GambleSet d = snap_to_grid(generate_instance(RngStream(kSeed, static_cast<std::uint64_t>(k)), spec_for(n, m, bias), truth));
  const bool oracle = exact_oracle_asl(d);
  return {std::move(d), truth, oracle};
}

std::vector<Instance> build_corpus(Bias bias = Bias::None, int count = 500) {
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(corpus_instance(k, bias));
  return out;
}

// Independent certificate check, written without the library's verify().
bool certificate_sound(const GambleSet& d, const Certificate& c) {
  if (const auto* w = std::get_if<AslWitness>(&c)) {
    if (w->p.size() != d.num_outcomes()) return false;
    double total = 0.0;
    for (std::size_t k = 0; k < d.num_outcomes(); ++k) {
      if (w->p[k] < 0.0) return false;
      total += w->p[k];
    }
    if (std::abs(total - 1.0) > 1e-9) return false;
    for (const auto& f : d.gambles()) {
      double e = 0.0;
      for (std::size_t k = 0; k < d.num_outcomes(); ++k) e += w->p[k] * f[k];
      if (e < -1e-6) return false;
    }
    return true;
  }
  const auto& s = std::get<SureLossWitness>(c);
  if (s.lambda.size() != d.num_gambles()) return false;
  double mass = 0.0;
  for (double l : s.lambda) {
    if (!(l >= 0.0)) return false;
    mass += l;
  }
  if (!(mass > 0.0)) return false;
  double worst = -HUGE_VAL;
  for (std::size_t k = 0; k < d.num_outcomes(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.num_gambles(); ++i) acc += s.lambda[i] * d.value(i, k);
    worst = std::max(worst, acc);
  }
  return worst < 0.0;
}

std::string describe(const MethodChoice& c, int k) { return c.label() + " on corpus instance " + std::to_string(k); }

bool report(int id, const std::string& name, const Tally& t, const std::string& extra = "") {
  std::printf("CRITERION %d %s  %s: %ld/%ld checks passed%s%s%s\n", id, t.pass() ? "PASS" : "FAIL", name.c_str(),
              t.checked - t.failed, t.checked, extra.empty() ? "" : "; ", extra.c_str(),
              t.failed ? ("; first failure: " + t.first_failure).c_str() : "");
  std::fflush(stdout);
  return t.pass();
}

// Criteria 1 and 4 share the corpus and the verdicts.
void oracle_and_certificates(const std::vector<Instance>& corpus, Tally& agree, Tally& sound, int& label_mismatch) {
  const auto choices = table_methods();
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& inst = corpus[k];
    if (inst.oracle != (inst.label == GroundTruth::Asl)) ++label_mismatch;
    for (const auto& choice : choices) {
      const auto what = describe(choice, static_cast<int>(k));
      try {
        const AslVerdict v = avoids_sure_loss(inst.d, choice);
        agree.record(v.avoids == inst.oracle, what);
        sound.record(certificate_sound(inst.d, v.certificate), what);
      } catch (const Error& e) {
        agree.record(false, what + " threw " + e.what());
        sound.record(false, what + " threw " + e.what());
      }
    }
  }
}

bool sure_loss_status(SolveStatus s) { return s == SolveStatus::Unbounded || s == SolveStatus::EarlyNegative; }

Tally p3_dichotomy(const std::vector<Instance>& corpus) {
  Tally t;
  SolverOptions interior;
  interior.early_negative = true;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& inst = corpus[k];
    const StandardLp lp = build_p3(inst.d, select_omega0(inst.d));
    if (!lp.meta.fully_degenerate) {
      t.record(false, "P3 of instance " + std::to_string(k) + " is not fully degenerate");
      continue;
    }
    std::vector<std::pair<std::string, SolveOutcome>> runs;
    runs.emplace_back("simplex", revised_simplex(lp, lp.meta.initial_basis));
    runs.emplace_back("affine", affine_scaling(lp, start_point_p3(lp), interior));
    StartPoint sp = start_point_d5(inst.d.num_gambles(), inst.d.num_outcomes());
    sp.x = start_point_p3(lp).x;
    runs.emplace_back("primal-dual", primal_dual(lp, sp, interior));
    for (const auto& [name, out] : runs) {
      const auto what = name + "/P3 on instance " + std::to_string(k) + " status " + to_string(out.status);
      if (out.status == SolveStatus::Optimal) {
        t.record(out.objective && std::abs(*out.objective) <= 1e-8 && inst.oracle, what);
      } else {
        t.record(!inst.oracle && sure_loss_status(out.status), what);
      }
    }
  }
  return t;
}

Tally starting_points() {
  Tally t;
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_int_distribution<std::size_t> size(1, 64);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  auto random_set = [&](std::size_t n, std::size_t m) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (auto& r : rows) {
      for (double& v : r) v = value(rng);
    }
    return GambleSet::from_rows(std::move(rows));
  };
  auto check = [&](const StandardLp& lp, const Vector& x, const std::string& what) {
    const bool ok = x.size() == static_cast<Eigen::Index>(lp.cols()) && primal_residual_inf(lp, x) <= 1e-10 &&
                    x.minCoeff() > 0.0;
    t.record(ok, what);
  };
  for (int k = 0; k < 1000; ++k) {
    const auto d = random_set(size(rng), 1 + size(rng));
    const auto lp = build_p3(d, select_omega0(d));
    check(lp, start_point_p3(lp).x, "P3 start " + std::to_string(k));
  }
  for (int k = 0; k < 1000; ++k) {
    const auto d = random_set(size(rng), 1 + size(rng));
    const auto [lp, start] = build_d4_phase1(d, select_omega0(d));
    check(lp, start.x, "D4' start " + std::to_string(k));
  }
  return t;
}

Tally boundary_cases() {
  Tally t;
  const auto choices = table_methods();
  for (std::uint64_t k = 0; k < 100; ++k) {
    RngStream rng(kSeed + 5, k);
    const std::size_t n = kSizes[k % 3];  // keep n + 1 within the exact oracle's size guard
    const std::size_t m = kSizes[(k / 3) % 4];
    const GenSpec spec = spec_for(n, m);
    RngStream base = rng.split(stream_role::kBase);
    const auto e = gen_asl_set(rng, spec, gen_polyhedral(base, m, spec.k_previsions));
    RngStream g_rng = rng.split(stream_role::kExtraGamble);
    const Gamble g = gen_uniform_gamble(g_rng, m);
    const double beta = upper_natural_extension(e, g);
    const auto above = e.with_gamble(g.shifted(-beta + 0.01));
    const auto below = e.with_gamble(g.shifted(-beta - 0.01));
    const auto tag = "boundary case " + std::to_string(k);
    t.record(exact_oracle_asl(snap_to_grid(above)), tag + ": oracle on +0.01");
    t.record(!exact_oracle_asl(snap_to_grid(below)), tag + ": oracle on -0.01");
    for (const auto& c : choices) {
      t.record(avoids_sure_loss(above, c).avoids, tag + " +0.01 with " + c.label());
      t.record(!avoids_sure_loss(below, c).avoids, tag + " -0.01 with " + c.label());
    }
  }
  return t;
}

bool relative_performance() {
  // Desk-grid cell |D| = 2^6, |Omega| = 2^2, sure-loss instances, preset seed and repetitions.
  const BenchPlan plan = desk_plan();
  const std::size_t n = 64;
  const std::size_t m = 4;
  const auto pd = MethodChoice::make(Method::PrimalDual, Formulation::P3);
  const auto sx = MethodChoice::make(Method::Simplex, Formulation::P3);
  std::vector<BenchRecord> pd_records;
  std::vector<BenchRecord> sx_records;
  bool agree = true;
  for (int rep = 0; rep < plan.reps; ++rep) {
    const auto seed = instance_seed(plan.seed, n, m, GroundTruth::NotAsl, rep);
    const auto d = bench_instance(seed, n, m, GroundTruth::NotAsl, plan.k_previsions, plan.delta, plan.bias);
    pd_records.push_back(time_check(d, pd));
    sx_records.push_back(time_check(d, sx));
    agree = agree && pd_records.back().verdict == "not_asl" && sx_records.back().verdict == "not_asl";
  }
  const double pd_mean = summarize(pd_records).front().mean_ns;
  const double sx_mean = summarize(sx_records).front().mean_ns;
  const double ratio = sx_mean / pd_mean;
  const bool pass = agree && ratio >= 1.5;
  std::printf("CRITERION 6 %s  relative performance at |D|=64 |Omega|=4 not-ASL (%d reps): primal-dual/P3 %.1f us, "
              "simplex/P3 %.1f us, speed-up %.2fx (required >= 1.50x)%s\n",
              pass ? "PASS" : "FAIL", plan.reps, pd_mean / 1e3, sx_mean / 1e3, ratio,
              agree ? "" : "; verdict disagreement");
  std::fflush(stdout);
  return pass;
}

Tally bias_robustness(const std::vector<Instance>& plain) {
  Tally t;
  const auto choices = table_methods();
  for (Bias bias : {Bias::Uniform, Bias::Constant}) {
    for (int k = 0; k < 250; ++k) {
      const Instance inst = corpus_instance(k, bias);
      for (const auto& c : choices) {
        const auto what = std::string(to_string(bias)) + " bias, " + describe(c, k);
        const bool avoids = avoids_sure_loss(inst.d, c).avoids;
        t.record(avoids == inst.oracle && avoids == avoids_sure_loss(plain[static_cast<std::size_t>(k)].d, c).avoids, what);
      }
    }
  }
  return t;
}

Tally property_suites(std::string& detail) {
  constexpr int kTrials = 200;
  Tally all;
  std::mt19937_64 rng(kSeed + 8);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_real_distribution<double> positive(0.01, 100.0);
  const auto choices = table_methods();
  auto random_set = [&](std::size_t n, std::size_t m) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    for (auto& r : rows) {
      for (double& v : r) v = value(rng);
    }
    return snap_to_grid(GambleSet::from_rows(std::move(rows)));
  };
  auto random_gamble = [&](std::size_t m) {
    std::vector<double> v(m);
    for (double& x : v) x = value(rng);
    return Gamble(v);
  };
  auto suite = [&](const std::string& name, const std::function<bool(int)>& trial) {
    int ok = 0;
    for (int k = 0; k < kTrials; ++k) {
      bool passed = false;
      try {
        passed = trial(k);
      } catch (const Error& e) {
        passed = false;
      }
      all.record(passed, name + " trial " + std::to_string(k));
      ok += passed ? 1 : 0;
    }
    detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(ok) + "/" + std::to_string(kTrials);
  };

  suite("monotonicity", [&](int k) {
    const auto d = corpus_instance(k % 250).d;  // avoids sure loss per the generator
    const auto& c = choices[static_cast<std::size_t>(k) % choices.size()];
    if (!avoids_sure_loss(d, c).avoids || d.num_gambles() < 2) return d.num_gambles() < 2;
    return avoids_sure_loss(d.without_gamble(static_cast<std::size_t>(k) % d.num_gambles()), c).avoids;
  });
  suite("scale invariance", [&](int k) {
    const auto d = random_set(1 + static_cast<std::size_t>(k) % 12, 2 + static_cast<std::size_t>(k) % 10);
    std::vector<Gamble> scaled;
    for (const auto& g : d.gambles()) scaled.push_back(g.scaled(positive(rng)));
    const auto& c = choices[static_cast<std::size_t>(k) % choices.size()];
    return avoids_sure_loss(d, c).avoids == avoids_sure_loss(GambleSet(d.space(), scaled), c).avoids;
  });
  suite("natural-extension sandwich", [&](int k) {
    const auto e = corpus_instance(k % 250).d;
    const Gamble g = random_gamble(e.num_outcomes());
    const double lo = lower_natural_extension(e, g);
    const double hi = upper_natural_extension(e, g);
    return g.min() <= lo + 1e-9 && lo <= hi + 1e-9 && hi <= g.max() + 1e-9;
  });
  suite("credal inclusion", [&](int k) {
    RngStream stream(kSeed + 9, static_cast<std::uint64_t>(k));
    const std::size_t m = 2 + static_cast<std::size_t>(k) % 15;
    const auto lower = gen_polyhedral(stream, m, 32);
    const auto d = gen_asl_set(stream, spec_for(1 + static_cast<std::size_t>(k) % 16, m), lower);
    for (const auto& p : std::get<Polyhedral>(lower.variant()).pmfs) {
      for (const auto& g : d.gambles()) {
        if (expectation(p, g) < -1e-12) return false;
      }
    }
    return true;
  });
  suite("constant additivity", [&](int k) {
    RngStream stream(kSeed + 10, static_cast<std::uint64_t>(k));
    const std::size_t m = 2 + static_cast<std::size_t>(k) % 15;
    const LowerPrevision lower = k % 3 == 0   ? gen_prevision(stream, m)
                                 : k % 3 == 1 ? gen_polyhedral(stream, m, 32)
                                              : gen_linear_vacuous(stream, m, 0.3);
    const Gamble f = random_gamble(m);
    const double c = 5.0 * value(rng);
    return std::abs(lower.evaluate(f.shifted(c)) - lower.evaluate(f) - c) <= 1e-12;
  });
  suite("pmf normalization", [&](int k) {
    RngStream stream(kSeed + 11, static_cast<std::uint64_t>(k));
    const Pmf p = gen_pmf(stream, 2 + static_cast<std::size_t>(k) % 255);
    double total = 0.0;
    for (double x : p.probs()) {
      if (!(x > 0.0)) return false;
      total += x;
    }
    return std::abs(total - 1.0) <= 1e-12;
  });
  return all;
}

template <class F>
auto timed(const char* what, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = f();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "[%s: %.1f s]\n", what, s);
  return result;
}

}  // namespace

int main() {
  bool ok = true;
  try {
    const auto corpus = timed("corpus", [] { return build_corpus(); });

    Tally agree, sound;
    int label_mismatch = 0;
    timed("criteria 1 and 4", [&] {
      oracle_and_certificates(corpus, agree, sound, label_mismatch);
      return 0;
    });
    ok &= report(1, "oracle agreement (500 instances x 6 method pairs)", agree,
                 std::to_string(label_mismatch) + " generator labels differ from the oracle after snapping");
    ok &= report(2, "optimal-or-unbounded dichotomy on P3", timed("criterion 2", [&] { return p3_dichotomy(corpus); }));
    ok &= report(3, "starting-point feasibility (1000 P3 + 1000 D4')", timed("criterion 3", starting_points));
    ok &= report(4, "certificate soundness", sound);
    ok &= report(5, "natural-extension boundary at +/-0.01", timed("criterion 5", boundary_cases));
    ok &= timed("criterion 6", relative_performance);
    ok &= report(7, "bias robustness (uniform and constant)", timed("criterion 7", [&] { return bias_robustness(corpus); }));
    std::string detail;
    const Tally props = timed("criterion 8", [&] { return property_suites(detail); });
    ok &= report(8, "property suites", props, detail);
  } catch (const std::exception& e) {
    std::printf("acceptance run aborted: %s\n", e.what());
    return 1;
  }
  return ok ? 0 : 1;
}
