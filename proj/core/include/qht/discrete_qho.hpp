// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "qht/common.hpp"
#include "qht/spectral_core.hpp"

namespace qht {

/// Discretized oscillator: diagonal xbar, pbar = F^{-1} xbar F, H = (xbar^2 + pbar^2) / 2.
/// pbar is only ever applied through DFT conjugation; dense forms exist for oracles.
class DiscreteQHO {
 public:
  explicit DiscreteQHO(const GridSpec& spec);
  static DiscreteQHO build(int M) { return DiscreteQHO(GridSpec::make(M)); }

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.M; }
  const RVec& x() const { return x_; }
  const RVec& x2() const { return x2_; }
  const CenteredDft& dft() const { return *dft_; }

  /// max |x_j| = sqrt(pi M / 2) = ||xbar|| = ||pbar||.
  double position_norm() const { return spec_.extent(); }

  CVec apply_x(const CVec& v) const;
  CVec apply_p(const CVec& v) const;
  CVec apply_x2(const CVec& v) const;
  CVec apply_p2(const CVec& v) const;
  CVec apply_hamiltonian(const CVec& v) const;

  // Dense oracle forms (M <= 4096).
  RMat dense_x2() const;
  CMat dense_p() const;
  RMat dense_p2() const;
  RMat dense_hamiltonian() const;

 private:
  GridSpec spec_;
  RVec x_, x2_;
  std::shared_ptr<const CenteredDft> dft_;
};

struct EigenDecomposition {
  RVec energies;  // ascending
  RMat vectors;   // orthonormal columns
};

/// Dense diagonalization of H (O(M^3), M <= 4096). Eigenvector n is signed to have
/// positive overlap with the discrete Hermite state n.
EigenDecomposition dense_diagonalize(const DiscreteQHO& qho);

/// Returns eig with pairs 0..count-1 refined: residuals H v - lambda v are formed in long
/// double (circulant p^2 kernel, O(M^2) per vector) and corrected through the remaining
/// double eigenpairs. Brings the low pairs from ~eps_64 ||H|| down to ~eps_64.
EigenDecomposition refine_low_eigenpairs(const DiscreteQHO& qho, const EigenDecomposition& eig,
                                         int count, int sweeps = 3);

/// |psi_n> = (2 pi / M)^{1/4} sum_j psi_n(x_j) |j>, n = 0..n_max. Not renormalized.
struct DiscreteHermiteBasis {
  GridSpec spec;
  int n_max = 0;
  RMat states;  // M x (n_max + 1)

  CVec state(int n) const { return states.col(n).cast<cplx>(); }
  /// max_{k,l <= kmax} |<psi_k|psi_l> - delta_kl|.
  double gram_defect(int kmax) const;
};

DiscreteHermiteBasis hermite_basis(const GridSpec& spec, int n_max);

/// Loewdin symmetric orthogonalization of the first n columns.
RMat loewdin_orthonormalize(const RMat& columns);

/// Rank-N projector onto the low-energy subspace, stored as an orthonormal M x N basis.
class EnergyProjector {
 public:
  static EnergyProjector from_eigen(const EigenDecomposition& eig, int N);
  static EnergyProjector from_hermite(const DiscreteHermiteBasis& basis, int N);

  int rank() const { return static_cast<int>(basis_.cols()); }
  const RMat& basis() const { return basis_; }
  CVec apply(const CVec& v) const;
  RMat dense() const { return basis_ * basis_.transpose(); }

 private:
  explicit EnergyProjector(RMat b) : basis_(std::move(b)) {}
  RMat basis_;
};

/// Discretization defect Delta = [x^2,[x^2,p^2]] - c x^2 on the dense grid (M <= 512).
struct DefectDelta {
  CMat delta;                 // built with the fitted coefficient
  cplx fitted_coefficient;    // least-squares c on the N'-dimensional low-energy block
  double norm_candidate_4i;   // ||Pi (C - 4i x^2) Pi||
  double norm_candidate_8i;   // ||Pi (C - 8i x^2) Pi||
  double norm_fitted;         // ||Pi (C - c x^2) Pi||
  double full_norm;           // ||Delta|| (spectral)
};

DefectDelta defect_delta(const DiscreteQHO& qho, int n_prime);

/// Continuum matrix elements <k| x^a p^b |l> from ladder operators, with the sign of p
/// matching pbar = F^{-1} xbar F (p = +i d/dx).
CMat continuum_xp_moments(int a, int b, int kmax);

/// ||(I - Pi_{N'}) x^a Pi_N|| with eigenvector projectors.
double leakage_norm(const DiscreteQHO& qho, const EigenDecomposition& eig, int a, int N,
                    int n_prime);

/// e^{-a} sum_{k >= ceil(3a)} a^k / k!, summed in log space.
double poisson_upper_tail(double a);

enum class TailFamily {
  kXXP,   // [x^2, p^2]_t
  kPPX,   // [p^2, x^2]_t
  kPAnti  // [p^2, {x, p}]_t
};

const char* tail_family_name(TailFamily f);

struct CommutatorTail {
  int M = 0;
  int N = 0;
  int t_start = 3;
  int t_max = 0;
  TailFamily family = TailFamily::kXXP;
  std::vector<double> term_norms;          // index t; zero for t < t_start
  std::vector<double> partial_tail_norms;  // norm of the sum from t_start through t
  double tail_norm = 0.0;
  void write_csv_rows(std::ostream& os) const;
};

/// ||Pi_N sum_{t=t_start}^{t_max} [A,B]_t / t! Pi_N|| with [A,B]_t = [A,[A,B]_{t-1}].
/// Terms are evaluated entrywise in high precision (see source); Pi_N is the
/// state-form projector.
CommutatorTail commutator_tail(const DiscreteQHO& qho, int N, int t_max, TailFamily family,
                               int t_start = 3);

double commutator_tail_norm(const DiscreteQHO& qho, int N, int t_max,
                            TailFamily family = TailFamily::kXXP);

/// Float64 dense nested products with 1/t rescaling and Kahan accumulation; accurate only
/// for small t. Kept as a cross-check of the high-precision path.
CommutatorTail commutator_tail_double(const DiscreteQHO& qho, int N, int t_max,
                                      TailFamily family, int t_start = 3);

}  // namespace qht
