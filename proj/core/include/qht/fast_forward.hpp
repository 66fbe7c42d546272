// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <vector>

#include "qht/discrete_qho.hpp"

namespace qht {

enum class Axis { kPosition, kMomentum };

struct Factor {
  Axis axis;
  double coefficient;  // factor is exp(-i c xbar^2) or exp(-i c pbar^2)
};

/// exp(-i H t) ~= phase * prod(factors), factors listed left to right as operators.
struct FactoredEvolution {
  std::vector<Factor> factors;
  double t_effective = 0.0;  // t reduced into [-pi, pi)
  int reps = 1;
  double phase = 1.0;  // +-1 from the 2 pi reduction
};

/// |t| <= pi/2 (after reduction): p(a) x(b) p(a) with a = tan(t/2)/2, b = sin(t)/2.
/// Otherwise the halved step twice: p(al) x(be) p(2 al) x(be) p(al).
FactoredEvolution decompose(double t);

CVec apply_factored(const DiscreteQHO& qho, const FactoredEvolution& fe, const CVec& state);
CVec apply_factored_adjoint(const DiscreteQHO& qho, const FactoredEvolution& fe,
                            const CVec& state);

/// Shorthand for apply_factored(qho, decompose(t), state).
CVec fast_forward(const DiscreteQHO& qho, double t, const CVec& state);

/// sum_n exp(-i E_n t) <e_n|state> |e_n>.
CVec exact_evolution(const EigenDecomposition& eig, double t, const CVec& state);

/// ||Pi_N (U(t) - V(t)) Pi_N|| with eigenvector projectors (M <= 2048). The N pairs are
/// passed through refine_low_eigenpairs first so the float64 eigensolver floor does not
/// dominate.
double low_energy_error(const DiscreteQHO& qho, const EigenDecomposition& eig, int N, double t);
double low_energy_error(const DiscreteQHO& qho, int N, double t);

/// ||Pi_N (V(t1) V(t2) - V(t1 + t2)) Pi_N||.
double group_law_defect(const DiscreteQHO& qho, const EigenDecomposition& eig, int N, double t1,
                        double t2);

/// <psi_n| V(t) |psi_n> for the (unnormalized) discrete Hermite state.
cplx hermite_eigenphase(const DiscreteQHO& qho, const DiscreteHermiteBasis& basis, int n,
                        double t);

/// ||Pi_N (V^{-1} dV/dt + i H) Pi_N|| by central differences (step 1e-5, one Richardson
/// level). M <= 512, |t| < pi/2 - 0.1.
double residual_generator_norm(const DiscreteQHO& qho, const EigenDecomposition& eig, int N,
                               double t);
double residual_generator_norm(const DiscreteQHO& qho, int N, double t);

struct ErrorAtlasRow {
  int M = 0;
  int N = 0;
  double t = 0.0;
  int reps = 1;
  double error = 0.0;
  double runtime_ms = 0.0;
};

std::vector<ErrorAtlasRow> error_atlas(const std::vector<int>& Ms, const std::vector<int>& Ns,
                                       const std::vector<double>& ts);
void write_error_atlas_csv(std::ostream& os, const std::vector<ErrorAtlasRow>& rows);

}  // namespace qht
