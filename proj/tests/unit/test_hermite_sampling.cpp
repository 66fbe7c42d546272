// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qht/hermite_sampling.hpp"
#include "qht/spectral_core.hpp"

namespace qht {
namespace {

TEST(ProbabilistHermite, MatchesHighPrecisionReference) {
  EXPECT_NEAR(probabilist_hermite(3, 0.7)[3], -0.71729224634500729, 1e-14);
  EXPECT_NEAR(probabilist_hermite(6, -1.1)[6], 0.71778009411320971, 1e-14);
  EXPECT_NEAR(probabilist_hermite(9, 2.5)[9], 2.37568870110282, 1e-13);
}

TEST(ProbabilistHermite, OscillatorAdapter) {
  for (double x : {-2.0, -0.3, 0.0, 1.7}) {
    const RVec a = weighted_hermite_from_oscillator(8, x);
    const RVec h = probabilist_hermite(8, x);
    for (int k = 0; k <= 8; ++k)
      EXPECT_NEAR(a[k], h[k] * std::sqrt(gaussian_density(x)), 1e-14) << k << " " << x;
  }
}

TEST(Rng, DeterministicAndSplittable) {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
  Rng c = Rng(42).split(3), d = Rng(42).split(3), e = Rng(42).split(4);
  EXPECT_EQ(c.next(), d.next());
  EXPECT_NE(Rng(42).split(3).next(), e.next());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(CoefficientOracle, ExactOnPlantedPolynomial) {
  // f = 0.8 h_(1,0) + 0.6 h_(0,2), unscaled: coefficients are the planted weights
  const auto f = make_planted(parse_planted("hermite_sum n=2 terms=1.0:0.8;0.2:0.6 clip=0"));
  EXPECT_NEAR(coefficient_oracle(f, {1, 0}, 256).value, 0.8, 1e-12);
  EXPECT_NEAR(coefficient_oracle(f, {0, 2}, 256).value, 0.6, 1e-12);
  EXPECT_NEAR(coefficient_oracle(f, {1, 2}, 256).value, 0.0, 1e-12);
  const auto t = spectrum_table(f, 5, 256);
  EXPECT_NEAR(t.norm2, 1.0, 1e-12);
  EXPECT_NEAR(t.parseval_residual(), 0.0, 1e-12);
  EXPECT_NEAR(t.normalized_probability({0, 2}), 0.36, 1e-12);
  EXPECT_TRUE(std::isinf(f.bound));
}

TEST(CoefficientOracle, SignCoefficientsMatchQuadratureReference) {
  // mpmath adaptive quadrature, tests/oracles/generate.py
  const double ref[] = {0.79788456080286536, 0.0, -0.32573500793527995, 0.0,
                        0.21850968611841581, 0.0, -0.16858388283618386, 0.0,
                        0.1390746078775947};
  const auto c = sign_coefficients(9, 4096);
  for (int k = 1; k <= 9; ++k) {
    EXPECT_NEAR(sign_coefficient_closed_form(k), ref[k - 1], 1e-14) << k;
    EXPECT_NEAR(c[k], ref[k - 1], 2e-3) << k;
  }
}

TEST(SignSpectrum, EvenVanishAndFitPositive) {
  const auto c = sign_coefficients(15, 4096);
  for (int k = 0; k <= 15; k += 2) EXPECT_LE(std::abs(c[k]), 1e-12);
  EXPECT_GT(fit_exponential_decay(c), 0.0);
}

TEST(Planted, ParseAndDescribe) {
  const auto s = parse_planted("hermite_sum n=2 terms=1.0:0.8;0.2:0.6 D=7 clip=0");
  EXPECT_EQ(s.family, "hermite_sum");
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.D, 7);
  EXPECT_FALSE(s.clip);
  ASSERT_EQ(s.terms.size(), 2u);
  EXPECT_EQ(s.terms[1].first, (MultiIndex{0, 2}));
  EXPECT_EQ(parse_planted(describe(s)).terms.size(), 2u);
  EXPECT_THROW(parse_planted("nonsense n=1"), ConfigError);
  EXPECT_THROW(parse_planted("constant value=1"), ConfigError);
  EXPECT_THROW(parse_planted("product_sign n=1 kappa=2"), ConfigError);
  std::istringstream is("# corpus\nconstant n=1\n\nproduct_sign n=2 S=0,1\n");
  EXPECT_EQ(load_corpus(is).size(), 2u);
}

TEST(Planted, KappaParameterHitsTarget) {
  const auto bump = make_planted(parse_planted("gaussian_bump n=2 kappa=3"));
  EXPECT_NEAR(postselection_kappa(bump, 256), 3.0, 1e-9);
  const auto tail = make_planted(parse_planted("tail_indicator n=1 kappa=2"));
  EXPECT_NEAR(postselection_kappa(tail, 4096), 2.0, 0.05);
  EXPECT_NEAR(postselection_kappa(make_planted(parse_planted("constant n=2")), 256), 1.0, 1e-12);
}

TEST(Distortion, LiteralDefinitionDiffersFromPostselectionCost) {
  const auto f = make_planted(parse_planted("constant n=1"));
  // sup |sqrt(nu)| / ||sqrt(nu)||_2 on the real line is (2 pi)^{-1/4}
  EXPECT_NEAR(distortion(f, 1024), std::pow(2 * kPi, -0.25), 1e-6);
  EXPECT_NEAR(postselection_kappa(f, 1024), 1.0, 1e-12);
}

TEST(Hybrid, BoundDominatesProductDiscrepancy) {
  const std::vector<double> a{0.9, 0.8, -0.7}, b{0.91, 0.79, -0.69};
  EXPECT_LE(product_discrepancy(a, b), hybrid_bound(a, b));
  EXPECT_GT(suggest_sampler_dimension(4, 3.0, 2, 0.05, 9), 0.0);
}

TEST(Sampler, ConstantFunctionSamplesTheOrigin) {
  const auto f = make_planted(parse_planted("constant n=2"));
  SamplerConfig cfg;
  cfg.D = 5;
  HermiteSampler s(f, cfg);
  EXPECT_NEAR(s.probability({0, 0}), 1.0, 1e-12);
  EXPECT_NEAR(s.success_probability(), 1.0, 1e-12);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto h = s.sample_postselected(rng);
    ASSERT_FALSE(h.overflow);
    EXPECT_EQ(h.v, (MultiIndex{0, 0}));
    EXPECT_EQ(h.attempts, 1);
  }
}

TEST(Sampler, ProbabilitiesMatchCoefficientOracle) {
  for (const auto& spec : sampling_corpus()) {
    const auto f = make_planted(spec);
    const auto t = spectrum_table(f, spec.D, 2048);
    for (auto kind : {TransformKind::kReference, TransformKind::kPipeline}) {
      SamplerConfig cfg;
      cfg.transform = kind;
      HermiteSampler s(f, cfg);
      for (size_t i = 0; i < t.size(); ++i)
        EXPECT_NEAR(s.probabilities()[i], t.coeff[i] * t.coeff[i] / t.norm2, 0.05) << describe(spec);
      double total = 0.0;
      for (double p : s.probabilities()) total += p;
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Sampler, PostselectionAttemptsAreGeometric) {
  const auto f = make_planted(parse_planted("gaussian_bump n=2 kappa=2"));
  HermiteSampler s(f, SamplerConfig{});
  EXPECT_NEAR(s.kappa(), 2.0, 1e-9);
  Rng rng(9);
  double total = 0;
  const int runs = 4000;
  for (int i = 0; i < runs; ++i) total += s.sample_postselected(rng).attempts;
  EXPECT_NEAR(total / runs, 4.0, 0.25);
}

TEST(Sampler, UnboundedFunctionCannotPostselect) {
  const auto f = make_planted(parse_planted("hermite_monomial n=1 v=2 clip=0"));
  HermiteSampler s(f, SamplerConfig{});
  Rng rng(0);
  EXPECT_THROW(s.sample_postselected(rng), InvalidArgument);
  EXPECT_NEAR(s.probability({2}), 1.0, 1e-9);
}

TEST(Sampler, BooleanPathRejectsNonBoolean) {
  const auto f = make_planted(parse_planted("hermite_monomial n=1 v=2"));
  EXPECT_THROW(boolean_hermite_sample(f, SamplerConfig{}, 1), InvalidArgument);
  const auto g = make_planted(parse_planted("product_sign n=1 S=0"));
  const auto s = boolean_hermite_sample(g, SamplerConfig{}, 1);
  EXPECT_EQ(s.attempts, 1);
  // grid norm of sgn is below 1 (the node at 0), so the general path still flips coins
  const auto p = general_hermite_sample(g, SamplerConfig{}, 1);
  EXPECT_FALSE(p.failed);
  EXPECT_LE(p.attempts, 3);
}

TEST(Sampler, EmpiricalDistributionConverges) {
  // clipped to [-1, 1], so compare with the oracle table rather than the unclipped 0.64
  const auto spec = parse_planted("hermite_sum n=1 terms=1:0.8;3:0.6 D=9");
  const auto f = make_planted(spec);
  const auto t = spectrum_table(f, spec.D, 2048);
  HermiteSampler s(f, SamplerConfig{});
  Rng rng(17);
  Histogram h(1, spec.D);
  long capped = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto x = s.sample_postselected(rng);
    if (x.failed) ++capped;
    else h.add(x);
  }
  EXPECT_EQ(h.total + capped, 10000);
  EXPECT_LE(capped, 50);
  EXPECT_LT(tv_distance(h, t), 0.05);
  EXPECT_NEAR(h.frequency({1}), t.normalized_probability({1}), 0.03);
}

TEST(TvDistance, DistributionVersion) {
  EXPECT_DOUBLE_EQ(tv_distance(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}), 0.5);
  EXPECT_THROW(tv_distance(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}),
               DimensionMismatch);
}

TEST(Budget, FullGridRefusedForHighArity) {
  OracleFunction f;
  f.n = 4;
  f.eval = [](const RVec&) { return 1.0; };
  EXPECT_THROW(coefficient_oracle(f, {0, 0, 0, 0}, 256), BudgetExceeded);
}

}  // namespace
}  // namespace qht
