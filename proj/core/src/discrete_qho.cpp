// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "qht/discrete_qho.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qht {

DiscreteQHO::DiscreteQHO(const GridSpec& spec)
    : spec_(GridSpec::make(spec.M)), x_(grid_points(spec_)), dft_(CenteredDft::get(spec_.M)) {
  if (spec_.M < 8) throw InvalidArgument("DiscreteQHO needs M >= 8");
  x2_ = x_.array().square();
}

CVec DiscreteQHO::apply_x(const CVec& v) const {
  require_dim(v.size(), dim(), "apply_x");
  return x_.cast<cplx>().cwiseProduct(v);
}

CVec DiscreteQHO::apply_x2(const CVec& v) const {
  require_dim(v.size(), dim(), "apply_x2");
  return x2_.cast<cplx>().cwiseProduct(v);
}

CVec DiscreteQHO::apply_p(const CVec& v) const {
  require_dim(v.size(), dim(), "apply_p");
  return dft_->inverse(apply_x(dft_->forward(v)));
}

CVec DiscreteQHO::apply_p2(const CVec& v) const {
  require_dim(v.size(), dim(), "apply_p2");
  return dft_->inverse(apply_x2(dft_->forward(v)));
}

CVec DiscreteQHO::apply_hamiltonian(const CVec& v) const {
  require_dim(v.size(), dim(), "apply_hamiltonian");
  return 0.5 * (apply_x2(v) + apply_p2(v));
}

namespace {

void check_dense_budget(int M, int limit, const char* what) {
  if (M > limit) {
    throw BudgetExceeded(std::string(what) + ": M=" + std::to_string(M) + " exceeds " +
                         std::to_string(limit));
  }
}

// (F^{-1} diag(d) F)_{jk} = (1/M) sum_l d_l exp(i 2 pi l (k - j) / M); depends only on
// (k - j) mod M.
std::vector<cplx> conjugated_diagonal_kernel(const RVec& d, int M) {
  std::vector<cplx> c(M, cplx(0.0));
  std::vector<cplx> roots(M);
  for (int r = 0; r < M; ++r) roots[r] = std::polar(1.0, 2.0 * kPi * r / M);
  for (int diff = 0; diff < M; ++diff) {
    cplx acc = 0.0;
    for (int s = 0; s < M; ++s) {
      const long l = s - M / 2;
      const long r = ((l * diff) % M + M) % M;
      acc += d[s] * roots[r];
    }
    c[diff] = acc / static_cast<double>(M);
  }
  return c;
}

}  // namespace

RMat DiscreteQHO::dense_x2() const {
  check_dense_budget(dim(), 4096, "dense_x2");
  return x2_.asDiagonal();
}

CMat DiscreteQHO::dense_p() const {
  check_dense_budget(dim(), 4096, "dense_p");
  const int M = dim();
  auto c = conjugated_diagonal_kernel(x_, M);
  CMat P(M, M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) P(a, b) = c[((b - a) % M + M) % M];
  return P;
}

RMat DiscreteQHO::dense_p2() const {
  check_dense_budget(dim(), 4096, "dense_p2");
  const int M = dim();
  auto c = conjugated_diagonal_kernel(x2_, M);
  RMat P(M, M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) P(a, b) = c[((b - a) % M + M) % M].real();
  return P;
}

RMat DiscreteQHO::dense_hamiltonian() const {
  RMat H = 0.5 * dense_p2();
  H.diagonal() += 0.5 * x2_;
  return H;
}

EigenDecomposition dense_diagonalize(const DiscreteQHO& qho) {
  check_dense_budget(qho.dim(), 4096, "dense_diagonalize");
  Eigen::SelfAdjointEigenSolver<RMat> es(qho.dense_hamiltonian());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  EigenDecomposition out{es.eigenvalues(), es.eigenvectors()};
  // Sign convention: positive overlap with the discrete Hermite state where that overlap
  // is meaningful, otherwise a positive largest component.
  const int M = qho.dim();
  const int n_align = std::min(M - 1, M / 4);
  auto basis = hermite_basis(qho.spec(), n_align);
  for (int n = 0; n < M; ++n) {
    double s = 0.0;
    if (n <= n_align) s = basis.states.col(n).dot(out.vectors.col(n));
    if (std::abs(s) < 1e-3) {
      Eigen::Index i;
      out.vectors.col(n).cwiseAbs().maxCoeff(&i);
      s = out.vectors(i, n);
    }
    if (s < 0) out.vectors.col(n) *= -1.0;
  }
  return out;
}

EigenDecomposition refine_low_eigenpairs(const DiscreteQHO& qho, const EigenDecomposition& eig,
                                         int count, int sweeps) {
  const int M = qho.dim();
  if (count < 0 || count > eig.vectors.cols()) throw InvalidArgument("refine count out of range");
  using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const long double two_pi = 6.283185307179586476925286766559005768L;
  const long double h2 = two_pi / M;
  LVec x2(M), cosine(M), kernel(M);
  for (int s = 0; s < M; ++s) {
    const long l = s - M / 2;
    x2[s] = static_cast<long double>(l * l) * h2;
    cosine[s] = std::cos(two_pi * s / M);
  }
  for (int diff = 0; diff < M; ++diff) {
    long double acc = 0.0L;
    for (int s = 0; s < M; ++s) {
      const long l = s - M / 2;
      acc += x2[s] * cosine[((l * diff) % M + M) % M];
    }
    kernel[diff] = acc / M;
  }
  auto apply_h = [&](const LVec& v) {
    LVec y(M);
    for (int a = 0; a < M; ++a) {
      long double acc = 0.0L;
      for (int b = 0; b < M; ++b) acc += kernel[(b - a + M) % M] * v[b];
      y[a] = 0.5L * (acc + x2[a] * v[a]);
    }
    return y;
  };

  EigenDecomposition out = eig;
  for (int n = 0; n < count; ++n) {
    LVec v = eig.vectors.col(n).cast<long double>();
    long double lambda = eig.energies[n];
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      v /= std::sqrt(v.squaredNorm());
      const LVec hv = apply_h(v);
      lambda = v.dot(hv);
      const RVec r = (hv - lambda * v).cast<double>();
      RVec coeff = eig.vectors.transpose() * r;
      for (int m = 0; m < M; ++m) {
        const double gap = eig.energies[m] - static_cast<double>(lambda);
        coeff[m] = (m == n || std::abs(gap) < 1e-8) ? 0.0 : coeff[m] / gap;
      }
      v -= (eig.vectors * coeff).cast<long double>();
    }
    v /= std::sqrt(v.squaredNorm());
    out.vectors.col(n) = v.cast<double>();
    out.energies[n] = static_cast<double>(apply_h(v).dot(v));
  }
  return out;
}

DiscreteHermiteBasis hermite_basis(const GridSpec& spec, int n_max) {
  if (n_max < 0 || n_max >= spec.M) throw InvalidArgument("hermite_basis needs 0 <= n_max < M");
  auto table = hermite_table(n_max, spec);
  const double scale = std::pow(2.0 * kPi / spec.M, 0.25);
  return DiscreteHermiteBasis{spec, n_max, scale * table.values.transpose()};
}

double DiscreteHermiteBasis::gram_defect(int kmax) const {
  kmax = std::min(kmax, n_max);
  const auto S = states.leftCols(kmax + 1);
  RMat G = S.transpose() * S;
  G -= RMat::Identity(kmax + 1, kmax + 1);
  return G.cwiseAbs().maxCoeff();
}

RMat loewdin_orthonormalize(const RMat& columns) {
  RMat G = columns.transpose() * columns;
  Eigen::SelfAdjointEigenSolver<RMat> es(G);
  RVec inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  RMat G_inv_half = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  return columns * G_inv_half;
}

EnergyProjector EnergyProjector::from_eigen(const EigenDecomposition& eig, int N) {
  if (N < 0 || N > eig.vectors.cols()) throw InvalidArgument("projector rank out of range");
  return EnergyProjector(eig.vectors.leftCols(N));
}

EnergyProjector EnergyProjector::from_hermite(const DiscreteHermiteBasis& basis, int N) {
  if (N < 0 || N > basis.n_max + 1) throw InvalidArgument("projector rank out of range");
  if (N == 0) return EnergyProjector(RMat(basis.spec.M, 0));
  return EnergyProjector(loewdin_orthonormalize(basis.states.leftCols(N)));
}

CVec EnergyProjector::apply(const CVec& v) const {
  require_dim(v.size(), basis_.rows(), "EnergyProjector::apply");
  CVec coeff = basis_.transpose().cast<cplx>() * v;
  return basis_.cast<cplx>() * coeff;
}

DefectDelta defect_delta(const DiscreteQHO& qho, int n_prime) {
  check_dense_budget(qho.dim(), 512, "defect_delta");
  const int M = qho.dim();
  const RVec& x2 = qho.x2();
  RMat P2 = qho.dense_p2();
  // [x^2,[x^2,p^2]]_{jk} = (x_j^2 - x_k^2)^2 (p^2)_{jk}
  RMat C(M, M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const double d = x2[a] - x2[b];
      C(a, b) = d * d * P2(a, b);
    }
  auto eig = dense_diagonalize(qho);
  const RMat E = eig.vectors.leftCols(n_prime);
  const CMat Cp = (E.transpose() * C * E).cast<cplx>();
  const CMat Xp = (E.transpose() * x2.asDiagonal() * E).cast<cplx>();
  auto proj_norm = [&](cplx c) {
    Eigen::JacobiSVD<CMat> svd(Cp - c * Xp);
    return svd.singularValues()(0);
  };
  const cplx fitted = (Xp.adjoint() * Cp).trace() / (Xp.adjoint() * Xp).trace();
  DefectDelta out;
  out.fitted_coefficient = fitted;
  out.norm_candidate_4i = proj_norm(cplx(0, 4));
  out.norm_candidate_8i = proj_norm(cplx(0, 8));
  out.norm_fitted = proj_norm(fitted);
  out.delta = C.cast<cplx>();
  out.delta.diagonal() -= fitted * x2.cast<cplx>();
  Eigen::JacobiSVD<CMat> full(out.delta);
  out.full_norm = full.singularValues()(0);
  return out;
}

CMat continuum_xp_moments(int a, int b, int kmax) {
  const int dim = kmax + a + b + 2;
  CMat A = CMat::Zero(dim, dim);  // annihilation
  for (int n = 1; n < dim; ++n) A(n - 1, n) = std::sqrt(static_cast<double>(n));
  const CMat Ad = A.adjoint();
  const CMat X = (A + Ad) / std::sqrt(2.0);
  const CMat P = cplx(0, 1) * (A - Ad) / std::sqrt(2.0);
  CMat R = CMat::Identity(dim, dim);
  for (int i = 0; i < a; ++i) R = R * X;
  for (int i = 0; i < b; ++i) R = R * P;
  return R.topLeftCorner(kmax + 1, kmax + 1);
}

double leakage_norm(const DiscreteQHO& qho, const EigenDecomposition& eig, int a, int N,
                    int n_prime) {
  RMat E = eig.vectors.leftCols(N);
  RMat Y = E;
  for (int i = 0; i < a; ++i) Y = qho.x().asDiagonal() * Y;
  const RMat Ep = eig.vectors.leftCols(n_prime);
  RMat L = Y - Ep * (Ep.transpose() * Y);
  Eigen::JacobiSVD<RMat> svd(L);
  return svd.singularValues()(0);
}

double poisson_upper_tail(double a) {
  if (a <= 0) throw InvalidArgument("poisson_upper_tail needs a > 0");
  const int k0 = static_cast<int>(std::ceil(3.0 * a));
  double total = 0.0;
  for (int k = k0;; ++k) {
    const double term = std::exp(k * std::log(a) - std::lgamma(k + 1.0) - a);
    total += term;
    if (term < 1e-30 * total || term == 0.0) break;
  }
  return total;
}

}  // namespace qht
