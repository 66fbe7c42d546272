// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "qht/common.hpp"

namespace qht {

/// Fixed-point (Chebyshev) amplification schedule of odd degree L.
/// alpha_j = 2 arccot(tan(2 pi j / L) sqrt(1 - gamma^2)), beta_j = -alpha_{l-j+1},
/// gamma^{-1} = T_{1/L}(1/eps), j = 1..(L-1)/2.
struct FixedPointSchedule {
  int L = 1;
  double delta = 1.0;
  double eps = 0.0;
  double gamma = 0.0;
  std::vector<double> alpha, beta;

  int rounds() const { return static_cast<int>(alpha.size()); }
};

/// L = smallest odd integer >= ln(2/eps)/delta. Success probability >= 1 - eps^2 whenever
/// the initial good amplitude is >= delta.
FixedPointSchedule make_fixed_point_schedule(double delta, double eps);

struct TwoLevelResult {
  cplx good;  // final amplitude on the normalized good state
  cplx bad;
};

/// Runs the schedule on s = a|good> + sqrt(1 - a^2)|bad>.
TwoLevelResult amplify_two_level(double a, const FixedPointSchedule& schedule);

using LinearOp = std::function<CVec(const CVec&)>;

/// Explicit-vector version: s is the prepared state and flag projects onto the good
/// subspace. Returns the amplified state; a fully flagged s is returned unchanged.
CVec fixed_point_amplify(const CVec& s, const LinearOp& flag, const FixedPointSchedule& schedule);

}  // namespace qht
