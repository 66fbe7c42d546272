// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qht/amplification.hpp"
#include "qht/discrete_qho.hpp"
#include "qht/fast_forward.hpp"

namespace qht {

/// Dimension-selection constants. Defaults are the uncalibrated values; the tuned ones
/// live in calibration/qht_calibration.cfg.
struct Calibration {
  static constexpr int kVersion = 1;
  double c0 = 1.0;
  double c1 = 4.0;
  int m_min = 16;
  long hard_cap = 1L << 20;
  double delta_lower = 0.3;
};

/// key = value lines, '#' comments. Requires "version = 1"; unknown keys are errors.
Calibration load_calibration(const std::string& path);
Calibration parse_calibration(std::istream& is);
void write_calibration(std::ostream& os, const Calibration& cal);

struct QHTConfig {
  int N = 1;
  double eps = 0.1;
  int M = 16;
  int N_high = 4;
  int r_bits = 0;  // 0: exact amp/phase oracles, else r-bit rounding
  int aa_rounds = 0;
  double delta_lower = 0.3;
  bool parity_sign = false;  // multiply block n by (-1)^n at output
  Calibration calibration;
};

/// Smallest power of two M >= max(m_min, c0 N^{9/4} / eps^{13/4}), N_high = ceil(c1 N / eps).
/// Throws ConfigError if M exceeds the hard cap or N_high >= M.
QHTConfig choose_dimensions(int N, double eps, const Calibration& cal = {});

/// Smooth indicator of |x| <= x_max = sqrt(3(2n+1)/4): the indicator of
/// [-x_max - d, x_max + d] convolved with a normalized bump of half-width
/// d = 1/(20 sqrt(2n+1)). Exactly 1 on |x| <= x_max and 0 beyond x_max + 2d.
struct WindowFunction {
  int n = 0;
  double x_max = 0.0;
  double delta = 0.0;

  explicit WindowFunction(int n);
  double operator()(double x) const;
};

double window_value(int n, double x);

/// J(n) = ceil(sqrt((3/4)(2n+1) M / (2 pi))).
int pr_support_half_width(int n, int M);

/// Plancherel-Rotach trial state on labels [-J, J-1], including the (2 pi/M)^{1/4} grid
/// factor. Unnormalized; norm is stored alongside.
struct PlancherelRotachState {
  int n = 0;
  int J = 0;
  CVec amplitudes;
  double norm = 0.0;

  CVec normalized() const { return amplitudes / norm; }
};

/// n = 0 uses the constant envelope 0.75 g_0(x). r_bits > 0 rounds the amplitude to r bits
/// of its maximum and the phase to r bits of a full turn.
PlancherelRotachState build_pr_state(int n, int M, int r_bits = 0);
PlancherelRotachState build_pr_state(int n, const QHTConfig& config);

/// Unnormalized <psi_n|phi_n> evaluated on the support only (works for M ~ 1e5).
double pr_overlap(int n, int M);

/// max_x |phi_n(x)| over the grid, without the grid factor.
double pr_max_amplitude(int n, int M);

struct OverlapPoint {
  int n;
  double overlap;
};
std::vector<OverlapPoint> overlap_curve(int n_min, int n_max, int M);
void write_overlap_csv(std::ostream& os, const std::vector<OverlapPoint>& curve);

/// W_{n,j} = V(2^j 2 pi / M) exp(i 2^j (2 pi / M)(n + 1/2)).
CVec apply_filter_unitary(const DiscreteQHO& qho, int n, int j, const CVec& v,
                          bool adjoint = false);

/// Number of filter ancillas, log2(M).
int filter_bits(int M);

struct FilterResult {
  CVec kept;    // component flagged |0...0> on the ancillas
  CVec leaked;  // input minus kept
};

/// prod_j (I + W_{n,j})/2 applied in m sequential passes.
FilterResult eigenstate_filter(const DiscreteQHO& qho, const CVec& state, int n);
CVec eigenstate_filter_adjoint(const DiscreteQHO& qho, const CVec& state, int n);

/// ||Pi_{> N_high} v||^2 with dense eigenvectors (M <= 4096).
double high_energy_leakage(const EigenDecomposition& eig, const CVec& v, int N_high);

struct BlockReport {
  int n = 0;
  double pr_overlap = 0.0;  // <psi_n|phi_n>/||phi_n||
  double retention = 0.0;   // ||filter(phi)||
  cplx good_amplitude;      // after amplification
  double block_fidelity = 0.0;
  double index_residual = 0.0;
};

/// Per-block outputs u_n; the transform is alpha -> sum alpha_n u_n.
struct QHTBlocks {
  QHTConfig config;
  FixedPointSchedule schedule;
  std::vector<CVec> outputs;
  std::vector<BlockReport> reports;
  long op_passes = 0;  // fast-forward applications plus state preparations

  CMat as_matrix() const;
  /// Min and max singular value of the M x N block matrix.
  std::pair<double, double> isometry_range() const;
};

QHTBlocks qht_blocks(const QHTConfig& config);

struct QHTResult {
  CVec output;
  double fidelity = 0.0;             // |<reference|output>|^2, reference normalized
  double residual_index_mass = 0.0;  // 1 - ||output||^2
};

QHTResult qht_apply(const CVec& alpha, const QHTBlocks& blocks);
QHTResult qht_apply(const CVec& alpha, const QHTConfig& config);

/// sum_n alpha_n |psi_n>; with loewdin the basis is symmetrically orthonormalized first.
CVec qht_reference(const CVec& alpha, const DiscreteHermiteBasis& basis, bool loewdin = false);

void write_block_report_csv(std::ostream& os, const QHTBlocks& blocks);

}  // namespace qht
