// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qht/fast_forward.hpp"

namespace qht {
namespace {

TEST(Decompose, ShortTimeUsesThreeFactors) {
  const auto fe = decompose(1.0);
  ASSERT_EQ(fe.factors.size(), 3u);
  EXPECT_EQ(fe.reps, 1);
  EXPECT_EQ(fe.factors[0].axis, Axis::kMomentum);
  EXPECT_EQ(fe.factors[1].axis, Axis::kPosition);
  EXPECT_NEAR(fe.factors[0].coefficient, std::tan(0.5) / 2, 1e-15);
  EXPECT_NEAR(fe.factors[1].coefficient, std::sin(1.0) / 2, 1e-15);
  EXPECT_DOUBLE_EQ(fe.phase, 1.0);
}

TEST(Decompose, LongTimeHalvesTheStep) {
  const auto fe = decompose(3.0);
  ASSERT_EQ(fe.factors.size(), 5u);
  EXPECT_EQ(fe.reps, 2);
  EXPECT_NEAR(fe.factors[0].coefficient, std::tan(0.75) / 2, 1e-15);
  EXPECT_NEAR(fe.factors[2].coefficient, std::tan(0.75), 1e-15);
  EXPECT_NEAR(fe.factors[1].coefficient, std::sin(1.5) / 2, 1e-15);
}

TEST(Decompose, ReducesModuloTwoPi) {
  const auto fe = decompose(2 * kPi + 0.3);
  EXPECT_NEAR(fe.t_effective, 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(fe.phase, -1.0);
  const auto fe2 = decompose(4 * kPi - 0.2);
  EXPECT_NEAR(fe2.t_effective, -0.2, 1e-12);
  EXPECT_DOUBLE_EQ(fe2.phase, 1.0);
  const auto z = decompose(0.0);
  for (const auto& f : z.factors) EXPECT_EQ(f.coefficient, 0.0);
}

// Dense numpy matrix exponentials (tests/oracles/generate.py).
TEST(LowEnergyError, MatchesIndependentDenseReference) {
  struct Ref {
    int M, N;
    double t, value;
  };
  const Ref refs[] = {
      {16, 4, 1.0, 4.9916289336890965e-06},
      {32, 8, 2.5, 1.9584820399754437e-07},
      {32, 8, -1.2, 5.325579816427013e-08},
      {16, 3, 7.0, 8.53208952392477e-07},
  };
  for (const auto& r : refs) {
    EXPECT_NEAR(low_energy_error(DiscreteQHO::build(r.M), r.N, r.t), r.value, 1e-4 * r.value)
        << r.M << " " << r.N << " " << r.t;
  }
}

TEST(LowEnergyError, ZeroTimeIsExact) {
  EXPECT_LT(low_energy_error(DiscreteQHO::build(64), 8, 0.0), 1e-14);
}

TEST(FastForward, AdjointInvertsAndPreservesNorm) {
  const auto q = DiscreteQHO::build(128);
  CVec v = CVec::Random(128).normalized();
  for (double t : {0.4, 2.2, -5.0}) {
    const auto fe = decompose(t);
    const CVec w = apply_factored(q, fe, v);
    EXPECT_NEAR(w.norm(), 1.0, 1e-12);
    EXPECT_LT((apply_factored_adjoint(q, fe, w) - v).norm(), 1e-12);
  }
}

TEST(FastForward, HermiteStatesPickUpEnergyPhase) {
  const auto q = DiscreteQHO::build(256);
  const auto b = hermite_basis(q.spec(), 10);
  for (int n : {0, 3, 10}) {
    const cplx e = hermite_eigenphase(q, b, n, 1.0);
    EXPECT_NEAR(std::abs(e - std::polar(1.0, -(n + 0.5))), 0.0, 1e-10) << n;
  }
}

TEST(FastForward, FullPeriodIsMinusIdentityOnLowStates) {
  const auto q = DiscreteQHO::build(256);
  const auto b = hermite_basis(q.spec(), 8);
  for (int n = 0; n < 8; ++n) {
    const CVec v = b.state(n);
    EXPECT_LT((fast_forward(q, 2 * kPi, v) + v).norm() / v.norm(), 1e-9) << n;
  }
}

TEST(FastForward, GroupLawOnLowEnergySubspace) {
  const auto q = DiscreteQHO::build(128);
  const auto eig = dense_diagonalize(q);
  EXPECT_LT(group_law_defect(q, eig, 8, 0.7, 1.9), 1e-9);
  EXPECT_LT(group_law_defect(q, eig, 8, -2.0, 3.5), 1e-9);
}

TEST(FastForward, ResidualGeneratorIsSmall) {
  const auto q = DiscreteQHO::build(128);
  EXPECT_LT(residual_generator_norm(q, 6, 0.5), 1e-5);
  EXPECT_THROW(residual_generator_norm(q, 6, 1.6), InvalidArgument);
}

TEST(FastForward, ExactEvolutionMatchesOnEigenvectors) {
  const auto q = DiscreteQHO::build(64);
  const auto eig = dense_diagonalize(q);
  const CVec v = eig.vectors.col(2).cast<cplx>();
  EXPECT_LT((exact_evolution(eig, 0.9, v) - std::polar(1.0, -0.9 * eig.energies[2]) * v).norm(), 1e-12);
}

TEST(ErrorAtlas, NonIncreasingInM) {
  const auto rows = error_atlas({64, 128, 256}, {8}, {1.0, 3.0});
  ASSERT_EQ(rows.size(), 6u);
  for (double t : {1.0, 3.0}) {
    double prev = 1e300;
    for (const auto& r : rows) {
      if (r.t != t) continue;
      EXPECT_LE(r.error, prev + 1e-12);
      prev = r.error;
    }
  }
  std::ostringstream os;
  write_error_atlas_csv(os, rows);
  EXPECT_EQ(os.str().rfind("M,N,t,reps,error,runtime_ms", 0), 0u);
}

}  // namespace
}  // namespace qht
