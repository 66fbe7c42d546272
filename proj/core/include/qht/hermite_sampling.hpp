// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qht/common.hpp"
#include "qht/rng.hpp"

namespace qht {

// Conventions: nu is the standard normal density and h_k = He_k / sqrt(k!) are the
// orthonormal probabilist Hermite polynomials, so E[h_k h_l] = delta_kl. They relate to the
// oscillator functions by h_k(x) sqrt(nu(x)) = 2^{-1/4} psi_k(x / sqrt 2).

double gaussian_density(double x);

/// h_0(x) .. h_{k_max}(x) by the three-term recurrence.
RVec probabilist_hermite(int k_max, double x);

/// h_k(x) sqrt(nu(x)) computed from the oscillator functions through the adapter.
RVec weighted_hermite_from_oscillator(int k_max, double x);

using MultiIndex = std::vector<int>;

/// prod_i h_{v_i}(x_i).
double hermite_multi(const MultiIndex& v, const RVec& x);

/// |v| = sum of entries.
int degree(const MultiIndex& v);

struct OracleFunction {
  std::string name;
  int n = 1;
  std::function<double(const RVec&)> eval;
  int input_bits = 0;   // P1; inputs snapped to multiples of 2^{-P1}, 0 = off
  int output_bits = 0;  // P2; outputs rounded to multiples of 2^{-P2}, 0 = off
  int degree_cutoff = 8;
  double bound = 1.0;   // B >= sup |f|; the rotation encodes f / B
  bool boolean = false; // range is {-1, +1} (0 allowed on a null set)
  double gamma2 = 0.0;  // declared E||grad f||^2, 0 = unknown
  /// Optional product structure f(x) = prod_i factors[i](x_i). Ignored when input or
  /// output rounding is on, since the factors are evaluated unrounded.
  std::vector<std::function<double(double)>> factors;

  double operator()(const RVec& x) const;
  bool is_product() const {
    return static_cast<int>(factors.size()) == n && input_bits == 0 && output_bits == 0;
  }
};

/// Tensor-grid Riemann sum on x_j = j sqrt(2 pi / M), j in [-M/2, M/2).
struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |I_M - I_{M/2}|
};

/// f_hat(v) = E[f(x) h_v(x)]. Full grids need n log2(M) <= 26 unless f is a product.
QuadratureResult coefficient_oracle(const OracleFunction& f, const MultiIndex& v, int M_quad);

/// All coefficients with v in [0, D]^n, row-major (last coordinate fastest).
struct SpectrumTable {
  int n = 1;
  int D = 0;
  std::vector<double> coeff;
  double norm2 = 0.0;  // quadrature E[f^2]

  std::size_t size() const { return coeff.size(); }
  std::size_t flat(const MultiIndex& v) const;
  MultiIndex unflat(std::size_t idx) const;
  double at(const MultiIndex& v) const { return coeff[flat(v)]; }
  double mass() const;
  double parseval_residual() const { return norm2 - mass(); }
  /// q_v = f_hat(v)^2 / norm2.
  double normalized_probability(const MultiIndex& v) const { return at(v) * at(v) / norm2; }
};

SpectrumTable spectrum_table(const OracleFunction& f, int D, int M_quad);

/// E[f^2] by quadrature.
double quadrature_norm2(const OracleFunction& f, int M_quad);

/// sup |f sqrt(nu)| / ||f sqrt(nu)||_2 over the quadrature grid (literal definition).
double distortion(const OracleFunction& f, int M_quad);

/// B / ||f||, the quantity that governs the postselection cost (per-attempt success
/// probability is exactly 1 / kappa^2).
double postselection_kappa(const OracleFunction& f, int M_quad);

/// int |f h_v nu| over points of the quadrature grid with some |x_i| > L.
double outside_box_mass(const OracleFunction& f, const MultiIndex& v, double L, int M_quad);

/// |prod a - prod b| and the hybrid bound n Q^{n-1} max|a_k - b_k|,
/// Q = max over |a_k|, |b_k|.
double product_discrepancy(const std::vector<double>& a, const std::vector<double>& b);
double hybrid_bound(const std::vector<double>& a, const std::vector<double>& b);

/// max{2 C^{-1} L 2^P P (n + log2 n + log2(8/eps)), 40 gamma D log2(2D)} with C = gamma = 1
/// by default.
double suggest_sampler_dimension(int P, double L, int n, double eps, int D, double C = 1.0,
                                 double gamma = 1.0);

/// Smallest power of two >= max(64, 40 D log2(2D)), the dimension rule above with P = 0
/// and gamma = 1.
int sampler_dimension(int D);

enum class TransformKind { kReference, kPipeline };

struct SamplerConfig {
  int M = 0;         // per-axis oscillator grid; 0 = sampler_dimension(D)
  int D = -1;        // per-coordinate cutoff; -1 uses f.degree_cutoff
  TransformKind transform = TransformKind::kReference;
  double pipeline_eps = 0.01;
  int attempt_cap_factor = 64;  // cap = factor * kappa attempts
};

struct HermiteSample {
  MultiIndex v;           // empty when overflow
  bool overflow = false;  // some coordinate above D
  int attempts = 1;       // postselection attempts used
  bool failed = false;    // attempt cap exceeded
};

/// Simulates the sampling circuits: per-axis ground states, pointwise oracle, per-axis
/// inverse transform, then exact inversion sampling from the squared amplitudes.
class HermiteSampler {
 public:
  HermiteSampler(const OracleFunction& f, const SamplerConfig& config);

  int n() const { return n_; }
  int D() const { return D_; }
  /// Normalized outcome distribution; the last entry is the lumped overflow bucket.
  const std::vector<double>& probabilities() const { return probs_; }
  double probability(const MultiIndex& v) const;
  double overflow_probability() const { return probs_.back(); }
  /// Per-attempt postselection success, ||f||^2 / B^2 on the grid.
  double success_probability() const { return success_; }
  double kappa() const { return 1.0 / std::sqrt(success_); }
  int attempt_cap() const;

  /// One draw from the accepted-branch distribution.
  HermiteSample draw(Rng& rng) const;
  /// Full loop: Bernoulli postselection attempts, then a draw. No coin is spent when the
  /// success probability is 1, so boolean f reproduces draw().
  HermiteSample sample_postselected(Rng& rng) const;

 private:
  int n_, D_;
  int cap_factor_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  double success_ = 1.0;
};

/// Boolean path (f must be boolean).
HermiteSample boolean_hermite_sample(const OracleFunction& f, const SamplerConfig& config,
                                     std::uint64_t seed);
/// General path with postselection.
HermiteSample general_hermite_sample(const OracleFunction& f, const SamplerConfig& config,
                                     std::uint64_t seed);

struct Histogram {
  int n = 1;
  int D = 0;
  std::vector<long> counts;
  long overflow = 0;
  long total = 0;

  Histogram(int n, int D);
  void add(const HermiteSample& s);
  double frequency(const MultiIndex& v) const;
};

/// 1/2 sum |p_v - q_v| over [0,D]^n plus 1/2 |p_over - q_over| for the lumped overflow
/// bucket, q from the table normalized by norm2.
double tv_distance(const Histogram& h, const SpectrumTable& table);

/// Distribution-level version for two probability vectors of equal length.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

/// Univariate sgn coefficients f_hat(0..k_max), sgn(0) = 0.
std::vector<double> sign_coefficients(int k_max, int M_quad);
/// Closed form: zero for even k, 2 nu(0) He_{k-1}(0) / sqrt(k!) for odd k.
double sign_coefficient_closed_form(int k);
/// min over odd k >= 1 of -ln|c_k| / k.
double fit_exponential_decay(const std::vector<double>& coeffs);

// Planted functions. One description per line:
//   <family> n=<arity> [key=value ...]
// families: constant value=; product_sign S=i,j,..; sign_threshold axis= a=;
// hermite_monomial v=; hermite_sum terms=v1:c1;v2:c2 (v as a.b.c); tail_indicator a=|kappa=;
// gaussian_bump a=|kappa= (f = exp(-a |x|^2)); noisy_product_sign S= eta=.
// Common keys: D= (sampler cutoff), clip=0 (leave polynomial families unscaled).
struct PlantedSpec {
  std::string family;
  int n = 1;
  std::vector<int> support;
  MultiIndex v;
  std::vector<std::pair<MultiIndex, double>> terms;
  double value = 1.0;
  double a = 0.0;
  int axis = 0;
  double eta = 0.0;
  double kappa = 0.0;  // > 0: choose a to hit this postselection kappa
  int D = 9;
  bool clip = true;  // clip polynomial families to [-1, 1] after scaling
};

PlantedSpec parse_planted(const std::string& line);
std::vector<PlantedSpec> load_corpus(std::istream& is);
OracleFunction make_planted(const PlantedSpec& spec);
std::string describe(const PlantedSpec& spec);

/// Default corpus used by the sampler acceptance run (n <= 2, D <= 9).
std::vector<PlantedSpec> sampling_corpus();

}  // namespace qht
