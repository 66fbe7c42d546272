// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "qht/amplification.hpp"

#include <cmath>

namespace qht {

namespace {

// T_{1/L}(x) for x >= 1.
double chebyshev_fractional(double order, double x) {
  return std::cosh(order * std::acosh(x));
}

}  // namespace

FixedPointSchedule make_fixed_point_schedule(double delta, double eps) {
  if (!(delta > 0.0)) throw InvalidArgument("fixed-point amplification needs delta > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("fixed-point amplification needs 0 < eps < 1");
  FixedPointSchedule s;
  s.delta = delta;
  s.eps = eps;
  int L = static_cast<int>(std::ceil(std::log(2.0 / eps) / delta));
  if (L < 1) L = 1;
  if (L % 2 == 0) ++L;
  s.L = L;
  s.gamma = 1.0 / chebyshev_fractional(1.0 / L, 1.0 / eps);
  const int l = (L - 1) / 2;
  const double root = std::sqrt(1.0 - s.gamma * s.gamma);
  for (int j = 1; j <= l; ++j) {
    // arccot(y) = atan2(1, y) keeps the branch in (0, pi)
    s.alpha.push_back(2.0 * std::atan2(1.0, std::tan(2.0 * kPi * j / L) * root));
  }
  for (int j = 0; j < l; ++j) s.beta.push_back(-s.alpha[l - 1 - j]);
  return s;
}

TwoLevelResult amplify_two_level(double a, const FixedPointSchedule& schedule) {
  if (a < 0.0 || a > 1.0) throw InvalidArgument("amplitude must lie in [0, 1]");
  const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
  if (b == 0.0) return {cplx(1.0), cplx(0.0)};
  cplx g = a, r = b;
  for (int k = 0; k < schedule.rounds(); ++k) {
    g *= std::polar(1.0, schedule.beta[k]);
    const cplx proj = a * g + b * r;  // <s|v>, s real
    const cplx f = 1.0 - std::polar(1.0, -schedule.alpha[k]);
    g = -(g - f * a * proj);
    r = -(r - f * b * proj);
  }
  return {g, r};
}

CVec fixed_point_amplify(const CVec& s, const LinearOp& flag, const FixedPointSchedule& schedule) {
  const double norm = s.norm();
  if (norm == 0.0) throw InvalidArgument("cannot amplify the zero state");
  const CVec sn = s / norm;
  const double good = flag(sn).squaredNorm();
  if (good >= 1.0 - 1e-15) return s;
  CVec v = sn;
  for (int k = 0; k < schedule.rounds(); ++k) {
    v += (std::polar(1.0, schedule.beta[k]) - 1.0) * flag(v);
    v -= (1.0 - std::polar(1.0, -schedule.alpha[k])) * sn * sn.dot(v);
    v = -v;
  }
  return norm * v;
}

}  // namespace qht
