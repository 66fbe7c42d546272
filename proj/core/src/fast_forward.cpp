// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "qht/fast_forward.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <Eigen/SVD>

namespace qht {

FactoredEvolution decompose(double t) {
  if (!std::isfinite(t)) throw InvalidArgument("decompose: t must be finite");
  const double k = std::floor((t + kPi) / (2.0 * kPi));
  double tr = t - 2.0 * kPi * k;
  // floor rounding can leave tr == pi for t just below an odd multiple of pi
  if (tr >= kPi) tr -= 2.0 * kPi;
  FactoredEvolution fe;
  fe.t_effective = tr;
  fe.phase = std::fmod(std::abs(k), 2.0) == 1.0 ? -1.0 : 1.0;
  if (std::abs(tr) <= kPi / 2) {
    const double a = std::tan(tr / 2) / 2;
    const double b = std::sin(tr) / 2;
    fe.reps = 1;
    fe.factors = {{Axis::kMomentum, a}, {Axis::kPosition, b}, {Axis::kMomentum, a}};
  } else {
    const double a = std::tan(tr / 4) / 2;
    const double b = std::sin(tr / 2) / 2;
    fe.reps = 2;
    fe.factors = {{Axis::kMomentum, a},
                  {Axis::kPosition, b},
                  {Axis::kMomentum, 2 * a},
                  {Axis::kPosition, b},
                  {Axis::kMomentum, a}};
  }
  return fe;
}

namespace {

CVec apply_factor(const DiscreteQHO& qho, Axis axis, double c, const CVec& v) {
  const RVec phases = c * qho.x2();
  if (axis == Axis::kPosition) return apply_diagonal_phase(v, phases);
  const auto& F = qho.dft();
  return F.inverse(apply_diagonal_phase(F.forward(v), phases));
}

}  // namespace

CVec apply_factored(const DiscreteQHO& qho, const FactoredEvolution& fe, const CVec& state) {
  require_dim(state.size(), qho.dim(), "apply_factored");
  CVec v = state;
  for (auto it = fe.factors.rbegin(); it != fe.factors.rend(); ++it)
    v = apply_factor(qho, it->axis, it->coefficient, v);
  return fe.phase * v;
}

CVec apply_factored_adjoint(const DiscreteQHO& qho, const FactoredEvolution& fe,
                            const CVec& state) {
  require_dim(state.size(), qho.dim(), "apply_factored_adjoint");
  CVec v = state;
  for (const auto& f : fe.factors) v = apply_factor(qho, f.axis, -f.coefficient, v);
  return fe.phase * v;
}

CVec fast_forward(const DiscreteQHO& qho, double t, const CVec& state) {
  return apply_factored(qho, decompose(t), state);
}

CVec exact_evolution(const EigenDecomposition& eig, double t, const CVec& state) {
  require_dim(state.size(), eig.vectors.rows(), "exact_evolution");
  CVec c = eig.vectors.transpose().cast<cplx>() * state;
  for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= std::polar(1.0, -eig.energies[n] * t);
  return eig.vectors.cast<cplx>() * c;
}

namespace {

double top_singular_value(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

void check_rank(const EigenDecomposition& eig, int N) {
  if (N < 1 || N > eig.vectors.cols()) throw InvalidArgument("N out of range");
}

}  // namespace

double low_energy_error(const DiscreteQHO& qho, const EigenDecomposition& eig, int N,
                        double t) {
  check_rank(eig, N);
  const auto fe = decompose(t);
  const auto ref = refine_low_eigenpairs(qho, eig, N);
  const CMat E = ref.vectors.leftCols(N).cast<cplx>();
  CMat D(N, N);
  for (int n = 0; n < N; ++n) {
    CVec w = apply_factored(qho, fe, E.col(n));
    D.col(n) = E.adjoint() * w;
    D(n, n) -= std::polar(1.0, -ref.energies[n] * t);
  }
  return top_singular_value(D);
}

double low_energy_error(const DiscreteQHO& qho, int N, double t) {
  if (qho.dim() > 2048) throw BudgetExceeded("low_energy_error limited to M <= 2048");
  return low_energy_error(qho, dense_diagonalize(qho), N, t);
}

double group_law_defect(const DiscreteQHO& qho, const EigenDecomposition& eig, int N, double t1,
                        double t2) {
  check_rank(eig, N);
  const auto f1 = decompose(t1), f2 = decompose(t2), f12 = decompose(t1 + t2);
  const CMat E = eig.vectors.leftCols(N).cast<cplx>();
  CMat D(N, N);
  for (int n = 0; n < N; ++n) {
    CVec a = apply_factored(qho, f1, apply_factored(qho, f2, E.col(n)));
    CVec b = apply_factored(qho, f12, E.col(n));
    D.col(n) = E.adjoint() * (a - b);
  }
  return top_singular_value(D);
}

cplx hermite_eigenphase(const DiscreteQHO& qho, const DiscreteHermiteBasis& basis, int n,
                        double t) {
  const CVec psi = basis.state(n);
  return psi.dot(fast_forward(qho, t, psi));
}

double residual_generator_norm(const DiscreteQHO& qho, const EigenDecomposition& eig, int N,
                               double t) {
  if (qho.dim() > 512) throw BudgetExceeded("residual_generator_norm limited to M <= 512");
  if (std::abs(t) >= kPi / 2 - 0.1) throw InvalidArgument("t too close to +-pi/2");
  check_rank(eig, N);
  constexpr double h = 1e-5;
  const CMat E = eig.vectors.leftCols(N).cast<cplx>();
  const auto f0 = decompose(t);
  auto central = [&](const CVec& v, double step) {
    return ((fast_forward(qho, t + step, v) - fast_forward(qho, t - step, v)) / (2 * step)).eval();
  };
  CMat R(N, N);
  for (int n = 0; n < N; ++n) {
    const CVec v = E.col(n);
    const CVec d = (4.0 * central(v, h / 2) - central(v, h)) / 3.0;
    CVec g = apply_factored_adjoint(qho, f0, d);
    g += cplx(0, eig.energies[n]) * v;
    R.col(n) = E.adjoint() * g;
  }
  return top_singular_value(R);
}

double residual_generator_norm(const DiscreteQHO& qho, int N, double t) {
  if (qho.dim() > 512) throw BudgetExceeded("residual_generator_norm limited to M <= 512");
  return residual_generator_norm(qho, dense_diagonalize(qho), N, t);
}

std::vector<ErrorAtlasRow> error_atlas(const std::vector<int>& Ms, const std::vector<int>& Ns,
                                       const std::vector<double>& ts) {
  std::vector<ErrorAtlasRow> rows;
  for (int M : Ms) {
    const auto qho = DiscreteQHO::build(M);
    const auto eig = dense_diagonalize(qho);
    for (int N : Ns) {
      if (N > M) continue;
      for (double t : ts) {
        const auto start = std::chrono::steady_clock::now();
        const double err = low_energy_error(qho, eig, N, t);
        const auto stop = std::chrono::steady_clock::now();
        rows.push_back({M, N, t, decompose(t).reps, err,
                        std::chrono::duration<double, std::milli>(stop - start).count()});
      }
    }
  }
  return rows;
}

void write_error_atlas_csv(std::ostream& os, const std::vector<ErrorAtlasRow>& rows) {
  os << "M,N,t,reps,error,runtime_ms\n";
  for (const auto& r : rows)
    os << r.M << ',' << r.N << ',' << r.t << ',' << r.reps << ',' << r.error << ','
       << r.runtime_ms << '\n';
}

}  // namespace qht
