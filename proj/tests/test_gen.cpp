#include <gtest/gtest.h>

#include <cmath>

#include "aslcheck/gen.hpp"
#include "aslcheck/oracle.hpp"

using namespace aslcheck;

TEST(RngStream, Reproducible) {
  RngStream a(7, 3);
  RngStream b(7, 3);
  RngStream c(7, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform_open();
    EXPECT_EQ(x, b.uniform_open());
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs = differs || x != c.uniform_open();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(RngStream(7, 3).split(1).uniform_open(), RngStream(7, 3).split(2).uniform_open());
}

TEST(GenPmf, LogRatioExamples) {
  const double r = 0.3;
  const std::vector<double> equal{r, r, r, r};
  const Pmf u = pmf_from_uniforms(equal);
  for (double p : u.probs()) EXPECT_DOUBLE_EQ(p, 0.25);
  const std::vector<double> two{std::exp(-1.0), std::exp(-3.0)};
  const Pmf p = pmf_from_uniforms(two);
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
  const std::vector<double> bad{0.0, 0.5};
  EXPECT_THROW(pmf_from_uniforms(bad), Error);
}

TEST(GenPmf, MonteCarloMeans) {
  RngStream rng(2024, 0);
  double sum[3] = {0, 0, 0};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const Pmf p = gen_pmf(rng, 3);
    for (int k = 0; k < 3; ++k) sum[k] += p[static_cast<std::size_t>(k)];
  }
  for (double s : sum) EXPECT_NEAR(s / draws, 1.0 / 3.0, 0.01);
}

TEST(GenPrevision, Linearity) {
  RngStream rng(1, 1);
  std::mt19937_64 std_rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 6);
    const auto lower = gen_prevision(rng, m);
    const Pmf& p = std::get<Prevision>(lower.variant()).pmf;
    std::vector<double> v(m);
    for (double& x : v) x = u(std_rng);
    const Gamble f(v);
    double manual = 0.0;
    for (std::size_t k = 0; k < m; ++k) manual += p[k] * v[k];
    EXPECT_NEAR(lower.evaluate(f), manual, 1e-14);
    EXPECT_NEAR(lower.evaluate(f) + lower.evaluate(f.scaled(-1.0)), 0.0, 1e-14);
    EXPECT_NEAR(lower.evaluate(Gamble(std::vector<double>(m, 2.5))), 2.5, 1e-14);
  }
}

TEST(GenPolyhedral, Envelope) {
  RngStream rng(3, 9);
  const auto single = gen_polyhedral(rng, 4, 1);
  const auto& poly1 = std::get<Polyhedral>(single.variant());
  ASSERT_EQ(poly1.pmfs.size(), 1u);
  const Gamble f{0.3, -1, 2, 0.5};
  EXPECT_DOUBLE_EQ(single.evaluate(f), expectation(poly1.pmfs[0], f));

  const auto many = gen_polyhedral(rng, 4, 32);
  for (const auto& p : std::get<Polyhedral>(many.variant()).pmfs) EXPECT_LE(many.evaluate(f), expectation(p, f));
  EXPECT_DOUBLE_EQ(evaluate(Polyhedral{{Pmf{1, 0}, Pmf{0, 1}}}, Gamble{3, 5}), 3.0);
  EXPECT_THROW(gen_polyhedral(rng, 4, 0), Error);
}

TEST(GenLinearVacuous, Boundaries) {
  RngStream rng(4, 0);
  const auto near_zero = gen_linear_vacuous(rng, 3, 1e-12);
  const auto& lv = std::get<LinearVacuous>(near_zero.variant());
  const Gamble f{1, -2, 0.5};
  EXPECT_NEAR(near_zero.evaluate(f), expectation(lv.pmf, f), 1e-9);
  const auto half = gen_linear_vacuous(rng, 3, 0.5);
  EXPECT_DOUBLE_EQ(half.evaluate(Gamble{1.5, 1.5, 1.5}), 1.5);
  EXPECT_THROW(gen_linear_vacuous(rng, 3, 1.0), Error);
  EXPECT_THROW(gen_linear_vacuous(rng, 3, 0.0), Error);
}

TEST(GenAslSet, ConstantAdditivityAndOracle) {
  for (Bias bias : {Bias::None, Bias::Uniform, Bias::Constant}) {
    for (std::uint64_t id = 0; id < 30; ++id) {
      RngStream rng(99, id);
      GenSpec spec;
      spec.n_outcomes = 2 + id % 7;
      spec.n_gambles = 1 + id % 9;
      spec.bias = bias;
      const auto lower = gen_polyhedral(rng, spec.n_outcomes, 32);
      const auto d = gen_asl_set(rng, spec, lower);
      ASSERT_EQ(d.num_gambles(), spec.n_gambles);
      for (const auto& g : d.gambles()) {
        const double eta = lower.evaluate(g);
        EXPECT_GE(eta, -1e-12);
        if (bias == Bias::None) {
          EXPECT_NEAR(eta, 0.0, 1e-12);
        }
        if (bias == Bias::Constant) {
          EXPECT_NEAR(eta, kConstantBias, 1e-12);
        }
        EXPECT_GE(g.max(), -1e-12);
      }
      EXPECT_TRUE(exact_oracle_asl(snap_to_grid(d)));
    }
  }
}

TEST(GenAslSet, CredalInclusion) {
  for (std::uint64_t id = 0; id < 200; ++id) {
    RngStream rng(123, id);
    GenSpec spec;
    spec.n_outcomes = 2 + id % 15;
    spec.n_gambles = 1 + id % 12;
    spec.k_previsions = 1 + id % 32;
    const auto lower = gen_polyhedral(rng, spec.n_outcomes, spec.k_previsions);
    const auto d = gen_asl_set(rng, spec, lower);
    for (const auto& p : std::get<Polyhedral>(lower.variant()).pmfs) {
      for (const auto& g : d.gambles()) EXPECT_GE(expectation(p, g), -1e-12);
    }
  }
}

TEST(GenNonAslSet, OracleAndRemoval) {
  for (std::uint64_t id = 0; id < 60; ++id) {
    RngStream rng(77, id);
    GenSpec spec;
    spec.n_outcomes = 2 + id % 10;
    spec.n_gambles = 1 + id % 8;
    const auto e = gen_asl_set(rng, spec, gen_polyhedral(rng, spec.n_outcomes, 32));
    const auto d = gen_non_asl_set(rng, e, 0.05);
    ASSERT_EQ(d.num_gambles(), e.num_gambles() + 1);
    EXPECT_FALSE(exact_oracle_asl(snap_to_grid(d)));
    EXPECT_TRUE(exact_oracle_asl(snap_to_grid(d.without_gamble(d.num_gambles() - 1))));
    // Flipping the margin sign keeps the set consistent.
    const Gamble added = d[d.num_gambles() - 1];
    EXPECT_TRUE(exact_oracle_asl(snap_to_grid(e.with_gamble(added.shifted(0.1)))));
  }
  RngStream rng(1, 1);
  EXPECT_THROW(gen_non_asl_set(rng, GambleSet::from_rows({{1, 1}}), 0.0), Error);
}

TEST(ExtendAslSet, StaysConsistent) {
  for (std::uint64_t id = 0; id < 60; ++id) {
    for (double delta : {0.0, 0.3, 0.9}) {
      RngStream rng(55, id);
      GenSpec spec;
      spec.n_outcomes = 2 + id % 10;
      spec.n_gambles = 1 + id % 8;
      const auto e = gen_asl_set(rng, spec, gen_linear_vacuous(rng, spec.n_outcomes, 0.2));
      const auto d = extend_asl_set(rng, e, delta);
      ASSERT_EQ(d.num_gambles(), e.num_gambles() + 1);
      EXPECT_TRUE(exact_oracle_asl(snap_to_grid(d)));
      // The price lies between the natural-extension bounds of the underlying g.
      RngStream g_rng = rng.split(stream_role::kExtraGamble);
      const Gamble g = gen_uniform_gamble(g_rng, spec.n_outcomes);
      const double price = g[0] - d[d.num_gambles() - 1][0];
      EXPECT_LE(lower_natural_extension(e, g), price + 1e-12);
      EXPECT_LE(price, upper_natural_extension(e, g) + 1e-12);
    }
  }
  RngStream rng(1, 1);
  EXPECT_THROW(extend_asl_set(rng, GambleSet::from_rows({{1, 1}}), 1.0), Error);
}

TEST(GenerateInstance, DeterministicWithExactSize) {
  GenSpec spec;
  spec.n_outcomes = 8;
  spec.n_gambles = 16;
  for (auto truth : {GroundTruth::Asl, GroundTruth::NotAsl}) {
    const auto a = generate_instance(RngStream(5, 17), spec, truth);
    const auto b = generate_instance(RngStream(5, 17), spec, truth);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.num_gambles(), 16u);
    EXPECT_EQ(exact_oracle_asl(snap_to_grid(a)), truth == GroundTruth::Asl);
  }
  spec.n_gambles = 1;
  EXPECT_THROW(generate_instance(RngStream(5, 17), spec, GroundTruth::NotAsl), Error);
}

TEST(GroundTruth, Strings) {
  EXPECT_EQ(ground_truth_from_string("asl"), GroundTruth::Asl);
  EXPECT_EQ(ground_truth_from_string(to_string(GroundTruth::NotAsl)), GroundTruth::NotAsl);
  EXPECT_THROW(ground_truth_from_string("maybe"), Error);
}
