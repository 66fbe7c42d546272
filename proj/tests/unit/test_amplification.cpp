// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qht/amplification.hpp"

namespace qht {
namespace {

// mpmath values (tests/oracles/generate.py).
TEST(Schedule, MatchesReference) {
  auto s = make_fixed_point_schedule(0.3, 0.01);
  EXPECT_EQ(s.L, 19);
  EXPECT_NEAR(s.gamma, 0.96234039015867399, 1e-14);
  ASSERT_EQ(s.rounds(), 9);
  EXPECT_NEAR(s.alpha[0], 2.9554811083343971, 1e-13);
  s = make_fixed_point_schedule(0.5, 0.1);
  EXPECT_EQ(s.L, 7);
  EXPECT_NEAR(s.gamma, 0.91506059899453081, 1e-14);
  EXPECT_NEAR(s.alpha[0], 2.2051301730347677, 1e-13);
}

TEST(Schedule, BetaIsNegatedReverseOfAlpha) {
  const auto s = make_fixed_point_schedule(0.2, 0.05);
  const int l = s.rounds();
  for (int j = 0; j < l; ++j) EXPECT_DOUBLE_EQ(s.beta[j], -s.alpha[l - 1 - j]);
}

TEST(Schedule, RejectsBadParameters) {
  EXPECT_THROW(make_fixed_point_schedule(0.0, 0.1), InvalidArgument);
  EXPECT_THROW(make_fixed_point_schedule(0.3, 1.0), InvalidArgument);
}

TEST(TwoLevel, FixedPointGuaranteeAboveDelta) {
  for (double eps : {0.1, 0.01}) {
    const double delta = 0.3;
    const auto s = make_fixed_point_schedule(delta, eps);
    for (double a = delta; a <= 1.0; a += 0.01) {
      const auto r = amplify_two_level(a, s);
      EXPECT_NEAR(std::norm(r.good) + std::norm(r.bad), 1.0, 1e-12);
      EXPECT_GE(std::norm(r.good), 1 - eps * eps - 1e-12) << "a=" << a << " eps=" << eps;
    }
  }
}

TEST(TwoLevel, NoOvershootBelowDelta) {
  const auto s = make_fixed_point_schedule(0.3, 0.01);
  const auto r = amplify_two_level(0.05, s);
  EXPECT_LT(std::norm(r.good), 1.0);
  EXPECT_THROW(amplify_two_level(1.2, s), InvalidArgument);
}

TEST(Dense, AgreesWithTwoLevelModel) {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  const int d = 12;
  CVec s(d);
  for (int i = 0; i < d; ++i) s[i] = cplx(n(g), n(g));
  s.normalize();
  // good subspace = first three coordinates
  const LinearOp flag = [](const CVec& v) {
    CVec w = CVec::Zero(v.size());
    w.head(3) = v.head(3);
    return w;
  };
  const double a = flag(s).norm();
  const auto sched = make_fixed_point_schedule(0.3, 0.01);
  const CVec out = fixed_point_amplify(s, flag, sched);
  const auto ref = amplify_two_level(a, sched);
  const CVec good = flag(s), bad = s - flag(s);
  EXPECT_LT((flag(out) - ref.good * good / a).norm(), 1e-10);
  EXPECT_LT((out - flag(out) - ref.bad * bad / bad.norm()).norm(), 1e-10);
  EXPECT_NEAR(out.norm(), 1.0, 1e-12);
}

TEST(Dense, FullyFlaggedStateIsReturned) {
  CVec s = CVec::Ones(4);
  const auto sched = make_fixed_point_schedule(0.3, 0.1);
  EXPECT_LT((fixed_point_amplify(s, [](const CVec& v) { return v; }, sched) - s).norm(), 1e-15);
  EXPECT_THROW(fixed_point_amplify(CVec::Zero(4), [](const CVec& v) { return v; }, sched),
               InvalidArgument);
}

}  // namespace
}  // namespace qht
