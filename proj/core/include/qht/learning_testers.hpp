// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qht/hermite_sampling.hpp"

namespace qht {

/// Entries >= 0 are fixed Hermite indices, kWildcard marks a free coordinate.
struct CoefficientPattern {
  static constexpr int kWildcard = -1;
  std::vector<int> entries;

  /// (a_1, .., a_k, *, .., *) of arity n.
  static CoefficientPattern prefix(const std::vector<int>& fixed, int n);
  int n() const { return static_cast<int>(entries.size()); }
  int fixed_count() const;
  /// Wildcards form a suffix.
  bool is_prefix() const;
  std::string str() const;  // "1,3,*"
};

struct WeightEstimate {
  CoefficientPattern pattern;
  double value = 0.0;       // estimate of W^S(f) = sum_T f_hat(S u T)^2
  double half_width = 0.0;  // empirical-Bernstein half-width at 1 - delta
  double confidence = 0.0;  // 1 - delta
  long samples = 0;         // paired draws
  long queries = 0;         // evaluations of f
};

/// Variance proxy for the paired estimator: B^4 for bounded f (the product
/// f f' h_S h_S' then has variance at most B^4), else max(1, E||grad f||^2).
double weight_variance_proxy(const OracleFunction& f);

/// ceil(proxy / eps^2 * ln(2 / delta)).
long weight_sample_count(double variance_proxy, double eps_est, double delta);

/// Monte-Carlo mean of f(y,z) f(y',z) h_S(y) h_S(y') over paired Gaussian draws, y, y' on
/// the fixed coordinates and z on the wildcards. Throws BudgetExceeded above max_samples.
WeightEstimate weight_estimate(const OracleFunction& f, const CoefficientPattern& pattern,
                               double eps_est, double delta, Rng& rng,
                               long max_samples = 50'000'000);

/// F_S f(z) = E_y[f(y, z) h_S(y)] by tensor-grid quadrature over the fixed coordinates;
/// z lists the wildcard coordinates in order. Needs fixed_count * log2(M_quad) <= 24.
double restriction_coefficient(const OracleFunction& f, const CoefficientPattern& pattern,
                               const RVec& z, int M_quad = 256);

/// E||grad f||^2 by central differences (step h) over `points` Gaussian draws. Heuristic:
/// a discontinuous f is reported as whatever the draws happen to straddle.
double estimate_gamma2(const OracleFunction& f, Rng& rng, int points = 1000, double step = 1e-4);

enum class GGLMode { kQuantum, kClassical };

const char* ggl_mode_name(GGLMode mode);

struct GGLConfig {
  double tau = 0.5;
  double delta = 0.1;
  GGLMode mode = GGLMode::kClassical;
  int degree_cap = -1;        // per-coordinate index cap m; -1 = ceil(4 gamma^2 / tau) + 4
  long node_budget = 20'000;  // weight estimates before giving up
  int sampler_M = 256;        // quantum mode
};

struct GGLResult {
  std::vector<MultiIndex> list;
  std::vector<double> estimates;  // estimated f_hat(v)^2, aligned with list
  bool failed = false;            // node budget exhausted; list is partial
  int degree_cap = 0;
  long nodes = 0;
  long queries = 0;  // f evaluations (classical) or sampler attempts plus norm draws
  long samples = 0;
};

/// Degree cap m = ceil(4 gamma^2 / tau) + 4 with gamma^2 declared or estimated.
int ggl_degree_cap(const OracleFunction& f, double tau, Rng& rng);

/// Prefix-tree search: extend each kept prefix by a_k in [0, m], estimate its weight to
/// +-tau^2/4 and keep it when the estimate is >= tau^2/2. |L| is capped at 4/tau^2 by
/// keeping the largest estimates.
GGLResult gaussian_goldreich_levin(const OracleFunction& f, const GGLConfig& config, Rng& rng);

struct GGLCheck {
  bool complete = false;  // every v with |f_hat(v)| >= tau is in L
  bool sound = false;     // every v in L has |f_hat(v)| >= tau/2
  bool size_ok = false;   // |L| <= 4/tau^2
};

/// Against a ground-truth table covering [0, m]^n.
GGLCheck check_ggl(const GGLResult& result, const SpectrumTable& truth, double tau);

struct TesterConfig {
  double eps1 = 0.1;
  double eps2 = 0.3;
  double delta = 0.1;
  double c = 3.0;  // low-degree sample constant
  int sampler_M = 256;
  int sampler_D = 31;
};

struct TesterVerdict {
  bool accept = false;
  std::string witness;  // candidate support or index when accepting
  double statistic = 0.0;
  double threshold = 0.0;
  long samples = 0;  // Hermite samples drawn
  long queries = 0;  // sampler attempts plus Monte-Carlo evaluations
};

/// m = ceil(c ln(1/delta) / eps^2), eps = eps2 - eps1.
long low_degree_sample_count(double eps, double delta, double c);

/// One sample fixes S = supp(v); reject unless |S| = k; then accept when the fraction of
/// further samples with supp(v) = S is >= 1 - (eps1 + eps2)/2. Overflow samples never
/// match. Any f = g(x_S) with g odd in every coordinate of S passes, so this only
/// separates far functions whose spectrum leaves supp = S.
TesterVerdict test_product_sign(const OracleFunction& f, int k, const TesterConfig& config,
                                Rng& rng);

/// X = fraction of m samples with |v| <= d (overflow counts as high degree, needs
/// sampler_D >= d); accept when X >= 1 - (eps1 + eps2)/2.
TesterVerdict test_low_degree(const OracleFunction& f, int d, const TesterConfig& config,
                              Rng& rng);

/// Draws candidates, keeps those with exactly k nonzero entries, and estimates the
/// normalized correlation f_hat(v) / ||f|| of each to +-eps/2 by Monte Carlo; accept when
/// some |correlation| >= 1 - (eps1 + eps2)/2.
TesterVerdict test_hermite_polynomial(const OracleFunction& f, int k,
                                      const TesterConfig& config, Rng& rng);

// Planted corpora.

struct GGLInstance {
  PlantedSpec spec;
  double tau = 0.5;
  int degree_cap = -1;
};

std::vector<GGLInstance> ggl_corpus();

enum class TesterKind { kProductSign, kLowDegree, kHermitePolynomial };

const char* tester_name(TesterKind kind);

struct TesterInstance {
  TesterKind kind;
  PlantedSpec spec;
  int k = 1;  // support size, degree bound, or nonzero-entry count
  bool expect_accept = true;
};

std::vector<TesterInstance> tester_corpus();

TesterVerdict run_tester(const TesterInstance& inst, const TesterConfig& config, Rng& rng);

struct VerdictRow {
  std::string instance;
  std::string mode;
  long queries = 0;
  bool accept = false;
  bool correct = false;
};

void write_verdict_csv(std::ostream& os, const std::vector<VerdictRow>& rows);

}  // namespace qht
