// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
//
// Nested-commutator tails projected onto the low-energy subspace.
//
// In float64 the projected terms Pi [A,B]_t Pi / t! are buried under cancellation for
// t beyond ~10, so the main path works entrywise in a frame where the nesting operator
// is diagonal:  for A = x^2, ([A,B]_t)_{jk} = (x_j^2 - x_k^2)^t B_{jk}.  Families nested
// in p^2 are moved to that frame by F-conjugation:
//   [p^2, B]_t = F^{-1} [x^2, F B F^{-1}]_t F,  F x^2 F^{-1} = p^2,  F x F^{-1} = R p R,
// with R the parity j -> -j (mod M).  Everything runs in cpp_bin_float with 100 or 200 digits.
#include <algorithm>
#include <cmath>
#include <ostream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <Eigen/SVD>

#include "qht/discrete_qho.hpp"

namespace qht {

namespace mpns = boost::multiprecision;
using mp100 = mpns::number<mpns::cpp_bin_float<100>, mpns::et_off>;
using mp200 = mpns::number<mpns::cpp_bin_float<200>, mpns::et_off>;

const char* tail_family_name(TailFamily f) {
  switch (f) {
    case TailFamily::kXXP: return "x2_p2";
    case TailFamily::kPPX: return "p2_x2";
    case TailFamily::kPAnti: return "p2_xp_anti";
  }
  return "?";
}

void CommutatorTail::write_csv_rows(std::ostream& os) const {
  // columns: M, N, t, term_norm, tail_norm (partial tail through t)
  for (int t = t_start; t <= t_max; ++t) {
    os << M << ',' << N << ',' << t << ',' << term_norms[t] << ','
       << (t < static_cast<int>(partial_tail_norms.size()) ? partial_tail_norms[t] : tail_norm)
       << '\n';
  }
}

namespace {

template <class mpf>
struct cx {
  mpf re, im;
};

template <class mpf>
inline cx<mpf> mul(const cx<mpf>& a, const cx<mpf>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class mpf>
inline cx<mpf> conj(const cx<mpf>& a) { return {a.re, -a.im}; }

void check_lab_budget(int M, int N, int t_max) {
  if (M > 256) throw BudgetExceeded("commutator lab limited to M <= 256");
  if (t_max > 40) throw BudgetExceeded("commutator lab limited to t_max <= 40");
  if (N < 0 || N > M / 2) throw InvalidArgument("commutator lab needs 0 <= N <= M/2");
}

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

// Lower-triangular Cholesky factor of a small symmetric positive definite mp matrix.
template <class mpf>
std::vector<std::vector<mpf>> cholesky(const std::vector<std::vector<mpf>>& G) {
  const int n = static_cast<int>(G.size());
  std::vector<std::vector<mpf>> L(n, std::vector<mpf>(n, mpf(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      mpf s = G[i][j];
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      if (i == j) {
        if (s <= 0) throw std::runtime_error("Gram matrix not positive definite");
        L[i][i] = sqrt(s);
      } else {
        L[i][j] = s / L[j][j];
      }
    }
  }
  return L;
}

// Returns L^{-1} T L^{-T} for complex T (L real lower triangular).
template <class mpf, class mpc = cx<mpf>>
std::vector<std::vector<mpc>> congruence(const std::vector<std::vector<mpf>>& L,
                                         const std::vector<std::vector<mpc>>& T) {
  const int n = static_cast<int>(L.size());
  // Y = L^{-1} T (forward substitution per column)
  std::vector<std::vector<mpc>> Y(n, std::vector<mpc>(n));
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) {
      mpc s = T[i][c];
      for (int k = 0; k < i; ++k) {
        s.re -= L[i][k] * Y[k][c].re;
        s.im -= L[i][k] * Y[k][c].im;
      }
      Y[i][c] = {s.re / L[i][i], s.im / L[i][i]};
    }
  }
  // Z = Y L^{-T}  <=>  Z L^T = Y  (forward substitution per row)
  std::vector<std::vector<mpc>> Z(n, std::vector<mpc>(n));
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n; ++j) {
      mpc s = Y[r][j];
      for (int k = 0; k < j; ++k) {
        s.re -= Z[r][k].re * L[j][k];
        s.im -= Z[r][k].im * L[j][k];
      }
      Z[r][j] = {s.re / L[j][j], s.im / L[j][j]};
    }
  }
  return Z;
}

template <class mpc>
CMat to_double(const std::vector<std::vector<mpc>>& A) {
  const int n = static_cast<int>(A.size());
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = cplx(static_cast<double>(A[i][j].re), static_cast<double>(A[i][j].im));
  return m;
}

template <class mpf>
CommutatorTail tail_impl(const DiscreteQHO& qho, int N, int t_max, TailFamily family,
                         int t_start, int digits) {
  using mpc = cx<mpf>;
  const int M = qho.dim();
  CommutatorTail out;
  out.M = M;
  out.N = N;
  out.t_start = t_start;
  out.t_max = t_max;
  out.family = family;
  out.term_norms.assign(std::max(t_max, 0) + 1, 0.0);
  out.partial_tail_norms.assign(std::max(t_max, 0) + 1, 0.0);
  if (N == 0 || t_max < t_start) return out;

  const mpf pi = boost::math::constants::pi<mpf>();
  const mpf h = sqrt(2 * pi / M);
  std::vector<mpf> x(M), x2(M);
  for (int s = 0; s < M; ++s) {
    x[s] = h * (s - M / 2);
    x2[s] = x[s] * x[s];
  }
  std::vector<mpf> cs(M), sn(M);
  for (int r = 0; r < M; ++r) {
    const mpf ang = 2 * pi * r / M;
    cs[r] = cos(ang);
    sn[r] = sin(ang);
  }
  auto root_index = [M](long a, long b) { return static_cast<int>(((a * b) % M + M) % M); };

  // Discrete Hermite states, high precision.
  std::vector<std::vector<mpf>> psi(N, std::vector<mpf>(M));
  const mpf norm0 = pow(pi, mpf(-0.25)) * pow(2 * pi / M, mpf(0.25));
  for (int s = 0; s < M; ++s) {
    mpf prev = 0, cur = norm0 * exp(-x2[s] / 2);
    psi[0][s] = cur;
    for (int n = 0; n + 1 < N; ++n) {
      mpf next = sqrt(mpf(2) / (n + 1)) * x[s] * cur - sqrt(mpf(n) / (n + 1)) * prev;
      prev = cur;
      cur = next;
      psi[n + 1][s] = cur;
    }
  }
  std::vector<std::vector<mpf>> G(N, std::vector<mpf>(N, mpf(0)));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b <= a; ++b) {
      mpf acc = 0;
      for (int s = 0; s < M; ++s) acc += psi[a][s] * psi[b][s];
      G[a][b] = G[b][a] = acc;
    }
  const auto L = cholesky(G);

  // Frame vectors u (psi or F psi) and the transformed operator B'.
  const bool p_nested = family != TailFamily::kXXP;
  std::vector<std::vector<mpc>> u(N, std::vector<mpc>(M));
  if (!p_nested) {
    for (int a = 0; a < N; ++a)
      for (int s = 0; s < M; ++s) u[a][s] = {psi[a][s], mpf(0)};
  } else {
    const mpf inv_sqrt_m = 1 / sqrt(mpf(M));
    for (int a = 0; a < N; ++a)
      for (int k = 0; k < M; ++k) {
        mpc acc{0, 0};
        for (int j = 0; j < M; ++j) {
          const int r = root_index(j - M / 2, k - M / 2);
          acc.re += psi[a][j] * cs[r];
          acc.im += psi[a][j] * sn[r];
        }
        u[a][k] = {acc.re * inv_sqrt_m, acc.im * inv_sqrt_m};
      }
  }
  // Kernels of F^{-1} diag(d) F indexed by (k - j) mod M.
  auto kernel = [&](const std::vector<mpf>& d) {
    std::vector<mpc> c(M);
    for (int diff = 0; diff < M; ++diff) {
      mpc acc{0, 0};
      for (int s = 0; s < M; ++s) {
        const int r = root_index(s - M / 2, diff);
        acc.re += d[s] * cs[r];
        acc.im += d[s] * sn[r];
      }
      c[diff] = {acc.re / M, acc.im / M};
    }
    return c;
  };
  std::vector<mpc> kern;
  if (family == TailFamily::kPAnti) {
    kern = kernel(x);   // pbar
  } else {
    kern = kernel(x2);  // pbar^2
  }
  auto bprime = [&](int j, int k) -> mpc {
    if (family == TailFamily::kPAnti) {
      // {R p R, x}_{jk} = (x_j + x_k) pbar_{-j,-k} = (x_j + x_k) kern[(j - k) mod M]
      const mpc& c = kern[((j - k) % M + M) % M];
      const mpf w = x[j] + x[k];
      return {w * c.re, w * c.im};
    }
    return kern[((k - j) % M + M) % M];
  };

  // Skip entries whose largest possible contribution sits far below the working precision
  // floor of every term we report.
  std::vector<double> umag(M, 0.0);
  for (int s = 0; s < M; ++s)
    for (int a = 0; a < N; ++a) {
      const double m = std::abs(static_cast<double>(u[a][s].re)) +
                       std::abs(static_cast<double>(u[a][s].im));
      const double lm = m > 0 ? std::log10(m) : -1e9;
      umag[s] = a == 0 ? lm : std::max(umag[s], lm);
    }
  std::vector<double> log10_fact(t_max + 1, 0.0);
  for (int t = 1; t <= t_max; ++t) log10_fact[t] = log10_fact[t - 1] + std::log10(t);

  const int nt = t_max + 1;
  std::vector<mpc> acc(static_cast<size_t>(N) * N * nt, mpc{0, 0});
  std::vector<mpf> st(nt);
  std::vector<mpf> inv_t(nt);
  for (int t = 1; t < nt; ++t) inv_t[t] = mpf(1) / t;
  std::vector<mpc> w(static_cast<size_t>(N) * N);

  for (int j = 0; j < M; ++j) {
    for (int k = 0; k < M; ++k) {
      const double dd = std::abs(static_cast<double>(x2[j] - x2[k]));
      double worst = -1e300;
      const double ld = dd > 0 ? std::log10(dd) : -1e9;
      for (int t = t_start; t <= t_max; ++t) worst = std::max(worst, t * ld - log10_fact[t]);
      if (umag[j] + umag[k] + worst + 4.0 < -(digits + 10.0)) continue;
      const mpc b = bprime(j, k);
      if (b.re == 0 && b.im == 0) continue;
      const mpf d = x2[j] - x2[k];
      mpf s = 1;
      for (int t = 1; t <= t_max; ++t) {
        s *= d * inv_t[t];
        st[t] = s;
      }
      for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c) w[a * N + c] = mul(mul(conj(u[a][j]), u[c][k]), b);
      for (int idx = 0; idx < N * N; ++idx) {
        mpc* row = &acc[static_cast<size_t>(idx) * nt];
        const mpc& wv = w[idx];
        for (int t = t_start; t <= t_max; ++t) {
          row[t].re += wv.re * st[t];
          row[t].im += wv.im * st[t];
        }
      }
    }
  }

  // Project each term, then accumulate the tail with compensated summation.
  std::vector<std::vector<mpc>> sum(N, std::vector<mpc>(N, mpc{0, 0}));
  std::vector<std::vector<mpc>> comp(N, std::vector<mpc>(N, mpc{0, 0}));
  for (int t = t_start; t <= t_max; ++t) {
    std::vector<std::vector<mpc>> T(N, std::vector<mpc>(N));
    for (int a = 0; a < N; ++a)
      for (int c = 0; c < N; ++c) T[a][c] = acc[static_cast<size_t>(a * N + c) * nt + t];
    const auto P = congruence(L, T);
    out.term_norms[t] = spectral_norm(to_double(P));
    for (int a = 0; a < N; ++a)
      for (int c = 0; c < N; ++c) {
        auto kahan = [](mpf& total, mpf& cmp, const mpf& v) {
          const mpf y = v - cmp;
          const mpf t2 = total + y;
          cmp = (t2 - total) - y;
          total = t2;
        };
        kahan(sum[a][c].re, comp[a][c].re, P[a][c].re);
        kahan(sum[a][c].im, comp[a][c].im, P[a][c].im);
      }
    out.partial_tail_norms[t] = spectral_norm(to_double(sum));
  }
  out.tail_norm = out.partial_tail_norms[t_max];
  return out;
}

}  // namespace

CommutatorTail commutator_tail(const DiscreteQHO& qho, int N, int t_max, TailFamily family,
                               int t_start) {
  check_lab_budget(qho.dim(), N, t_max);
  // At M = 256 the projected terms drop below 1e-100, so the wider type is needed there.
  if (qho.dim() > 128) return tail_impl<mp200>(qho, N, t_max, family, t_start, 200);
  return tail_impl<mp100>(qho, N, t_max, family, t_start, 100);
}

double commutator_tail_norm(const DiscreteQHO& qho, int N, int t_max, TailFamily family) {
  return commutator_tail(qho, N, t_max, family).tail_norm;
}

CommutatorTail commutator_tail_double(const DiscreteQHO& qho, int N, int t_max,
                                      TailFamily family, int t_start) {
  const int M = qho.dim();
  check_lab_budget(M, N, t_max);
  CommutatorTail out;
  out.M = M;
  out.N = N;
  out.t_start = t_start;
  out.t_max = t_max;
  out.family = family;
  out.term_norms.assign(std::max(t_max, 0) + 1, 0.0);
  out.partial_tail_norms.assign(std::max(t_max, 0) + 1, 0.0);
  if (N == 0 || t_max < t_start) return out;

  const CMat X2 = qho.dense_x2().cast<cplx>();
  const CMat P2 = qho.dense_p2().cast<cplx>();
  CMat A, C;
  switch (family) {
    case TailFamily::kXXP: A = X2; C = P2; break;
    case TailFamily::kPPX: A = P2; C = X2; break;
    case TailFamily::kPAnti: {
      A = P2;
      const CMat XP = qho.x().cast<cplx>().asDiagonal() * qho.dense_p();
      C = XP + XP.adjoint();
      break;
    }
  }
  auto basis = hermite_basis(qho.spec(), N - 1);
  const CMat Q = loewdin_orthonormalize(basis.states).cast<cplx>();
  CMat sum = CMat::Zero(N, N), comp = CMat::Zero(N, N);
  for (int t = 1; t <= t_max; ++t) {
    C = (A * C - C * A) / static_cast<double>(t);
    if (t < t_start) continue;
    const CMat P = Q.adjoint() * C * Q;
    out.term_norms[t] = spectral_norm(P);
    const CMat y = P - comp;
    const CMat s2 = sum + y;
    comp = (s2 - sum) - y;
    sum = s2;
    out.partial_tail_norms[t] = spectral_norm(sum);
  }
  out.tail_norm = out.partial_tail_norms[t_max];
  return out;
}

}  // namespace qht
