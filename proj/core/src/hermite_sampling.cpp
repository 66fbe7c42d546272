// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "qht/hermite_sampling.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "qht/qht_pipeline.hpp"
#include "qht/spectral_core.hpp"

namespace qht {

double gaussian_density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

RVec probabilist_hermite(int k_max, double x) {
  if (k_max < 0) throw InvalidArgument("k_max must be >= 0");
  RVec h(k_max + 1);
  h[0] = 1.0;
  if (k_max >= 1) h[1] = x;
  for (int k = 1; k < k_max; ++k)
    h[k + 1] = (x * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) / std::sqrt(k + 1.0);
  return h;
}

RVec weighted_hermite_from_oscillator(int k_max, double x) {
  return std::pow(2.0, -0.25) * hermite_functions(k_max, x / std::sqrt(2.0));
}

double hermite_multi(const MultiIndex& v, const RVec& x) {
  require_dim(x.size(), static_cast<long>(v.size()), "hermite_multi");
  double p = 1.0;
  for (size_t i = 0; i < v.size(); ++i) p *= probabilist_hermite(v[i], x[i])[v[i]];
  return p;
}

int degree(const MultiIndex& v) { return std::accumulate(v.begin(), v.end(), 0); }

double OracleFunction::operator()(const RVec& x) const {
  RVec y = x;
  if (input_bits > 0) {
    const double q = std::ldexp(1.0, input_bits);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = std::floor(y[i] * q) / q;
  }
  double v = eval(y);
  if (output_bits > 0) {
    const double q = std::ldexp(1.0, output_bits);
    v = std::round(v * q) / q;
  }
  return v;
}

// ---------------------------------------------------------------- tensor helpers

namespace {

constexpr double kFullGridBits = 26.0;

void check_grid_budget(const OracleFunction& f, int M) {
  if (M < 8 || M % 2 != 0) throw InvalidArgument("quadrature needs even M >= 8");
  if (!f.is_product() && f.n * std::log2(static_cast<double>(M)) > kFullGridBits + 1e-9)
    throw BudgetExceeded("full quadrature grid exceeds 2^26 points; declare product structure");
}

// Contracts axis `axis` of a row-major tensor with T (K x dims[axis]).
template <class Scalar, class Mat>
std::vector<Scalar> contract(const std::vector<Scalar>& data, std::vector<int>& dims, int axis,
                             const Mat& T) {
  long outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= dims[i];
  for (size_t i = axis + 1; i < dims.size(); ++i) inner *= dims[i];
  const int J = dims[axis];
  const int K = static_cast<int>(T.rows());
  std::vector<Scalar> out(static_cast<size_t>(outer) * K * inner, Scalar(0));
  for (long o = 0; o < outer; ++o)
    for (int j = 0; j < J; ++j) {
      const Scalar* src = &data[(static_cast<size_t>(o) * J + j) * inner];
      for (int k = 0; k < K; ++k) {
        const Scalar t = T(k, j);
        if (t == Scalar(0)) continue;
        Scalar* dst = &out[(static_cast<size_t>(o) * K + k) * inner];
        for (long i = 0; i < inner; ++i) dst[i] += t * src[i];
      }
    }
  dims[axis] = K;
  return out;
}

// Evaluates g(point) over the tensor grid nodes^n, last coordinate fastest.
template <class G>
std::vector<double> grid_values(int n, const RVec& nodes, G&& g) {
  const long M = nodes.size();
  long total = 1;
  for (int i = 0; i < n; ++i) total *= M;
  std::vector<double> out(total);
  RVec pt(n);
  std::vector<long> idx(n, 0);
  for (long f = 0; f < total; ++f) {
    long r = f;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = r % M;
      r /= M;
      pt[i] = nodes[idx[i]];
    }
    out[f] = g(pt);
  }
  return out;
}

struct ProbGrid {
  RVec nodes;
  double h;
};

ProbGrid prob_grid(int M) {
  const auto spec = GridSpec::make(M);
  return {grid_points(spec), spec.h};
}

// W(k, j) = h h_k(y_j) nu(y_j).
RMat coefficient_weights(const ProbGrid& g, int D) {
  RMat W(D + 1, g.nodes.size());
  for (Eigen::Index j = 0; j < g.nodes.size(); ++j)
    W.col(j) = g.h * gaussian_density(g.nodes[j]) * probabilist_hermite(D, g.nodes[j]);
  return W;
}

SpectrumTable table_at(const OracleFunction& f, int D, int M) {
  check_grid_budget(f, M);
  const auto g = prob_grid(M);
  const RMat W = coefficient_weights(g, D);
  SpectrumTable t;
  t.n = f.n;
  t.D = D;
  if (f.is_product()) {
    std::vector<RVec> per_axis;
    t.norm2 = 1.0;
    for (int i = 0; i < f.n; ++i) {
      RVec vals(g.nodes.size());
      double nrm = 0.0;
      for (Eigen::Index j = 0; j < g.nodes.size(); ++j) {
        vals[j] = f.factors[i](g.nodes[j]);
        nrm += g.h * gaussian_density(g.nodes[j]) * vals[j] * vals[j];
      }
      per_axis.push_back(W * vals);
      t.norm2 *= nrm;
    }
    t.coeff.assign(static_cast<size_t>(std::pow(D + 1, f.n)), 0.0);
    for (size_t idx = 0; idx < t.coeff.size(); ++idx) {
      auto v = t.unflat(idx);
      double p = 1.0;
      for (int i = 0; i < f.n; ++i) p *= per_axis[i][v[i]];
      t.coeff[idx] = p;
    }
    return t;
  }
  auto vals = grid_values(f.n, g.nodes, [&](const RVec& x) { return f(x); });
  // norm2 from the same grid
  RVec w1(g.nodes.size());
  for (Eigen::Index j = 0; j < g.nodes.size(); ++j) w1[j] = g.h * gaussian_density(g.nodes[j]);
  std::vector<double> sq(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) sq[i] = vals[i] * vals[i];
  std::vector<int> dims(f.n, static_cast<int>(g.nodes.size()));
  std::vector<int> dims2 = dims;
  const RMat w1m = w1.transpose();
  for (int a = 0; a < f.n; ++a) sq = contract(sq, dims2, a, w1m);
  t.norm2 = sq[0];
  for (int a = 0; a < f.n; ++a) vals = contract(vals, dims, a, W);
  t.coeff = std::move(vals);
  return t;
}

}  // namespace

std::size_t SpectrumTable::flat(const MultiIndex& v) const {
  if (static_cast<int>(v.size()) != n) throw DimensionMismatch("multi-index arity");
  std::size_t idx = 0;
  for (int c : v) {
    if (c < 0 || c > D) throw InvalidArgument("multi-index outside [0, D]");
    idx = idx * (D + 1) + c;
  }
  return idx;
}

MultiIndex SpectrumTable::unflat(std::size_t idx) const {
  MultiIndex v(n);
  for (int i = n - 1; i >= 0; --i) {
    v[i] = static_cast<int>(idx % (D + 1));
    idx /= (D + 1);
  }
  return v;
}

double SpectrumTable::mass() const {
  double m = 0.0;
  for (double c : coeff) m += c * c;
  return m;
}

SpectrumTable spectrum_table(const OracleFunction& f, int D, int M_quad) {
  if (D < 0) throw InvalidArgument("D must be >= 0");
  return table_at(f, D, M_quad);
}

QuadratureResult coefficient_oracle(const OracleFunction& f, const MultiIndex& v, int M_quad) {
  if (static_cast<int>(v.size()) != f.n) throw DimensionMismatch("multi-index arity");
  const int D = *std::max_element(v.begin(), v.end());
  const auto fine = table_at(f, D, M_quad);
  const auto coarse = table_at(f, D, M_quad / 2);
  return {fine.at(v), std::abs(fine.at(v) - coarse.at(v))};
}

double quadrature_norm2(const OracleFunction& f, int M_quad) {
  return table_at(f, 0, M_quad).norm2;
}

namespace {

double sup_abs(const OracleFunction& f, int M, bool weighted) {
  check_grid_budget(f, M);
  const auto g = prob_grid(M);
  if (f.is_product()) {
    double s = 1.0;
    for (int i = 0; i < f.n; ++i) {
      double m = 0.0;
      for (Eigen::Index j = 0; j < g.nodes.size(); ++j) {
        double v = std::abs(f.factors[i](g.nodes[j]));
        if (weighted) v *= std::sqrt(gaussian_density(g.nodes[j]));
        m = std::max(m, v);
      }
      s *= m;
    }
    return s;
  }
  auto vals = grid_values(f.n, g.nodes, [&](const RVec& x) {
    double v = std::abs(f(x));
    if (weighted)
      for (Eigen::Index i = 0; i < x.size(); ++i) v *= std::sqrt(gaussian_density(x[i]));
    return v;
  });
  return *std::max_element(vals.begin(), vals.end());
}

}  // namespace

double distortion(const OracleFunction& f, int M_quad) {
  const double n2 = quadrature_norm2(f, M_quad);
  if (n2 <= 0.0) throw InvalidArgument("distortion of the zero function");
  return sup_abs(f, M_quad, true) / std::sqrt(n2);
}

double postselection_kappa(const OracleFunction& f, int M_quad) {
  const double n2 = quadrature_norm2(f, M_quad);
  if (n2 <= 0.0) throw InvalidArgument("kappa of the zero function");
  return f.bound / std::sqrt(n2);
}

double outside_box_mass(const OracleFunction& f, const MultiIndex& v, double L, int M_quad) {
  check_grid_budget(f, M_quad);
  const auto g = prob_grid(M_quad);
  auto vals = grid_values(f.n, g.nodes, [&](const RVec& x) {
    bool outside = false;
    double w = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) > L) outside = true;
      w *= g.h * gaussian_density(x[i]);
    }
    return outside ? std::abs(f(x) * hermite_multi(v, x)) * w : 0.0;
  });
  return std::accumulate(vals.begin(), vals.end(), 0.0);
}

double product_discrepancy(const std::vector<double>& a, const std::vector<double>& b) {
  require_dim(a.size(), b.size(), "product_discrepancy");
  double pa = 1.0, pb = 1.0;
  for (size_t i = 0; i < a.size(); ++i) {
    pa *= a[i];
    pb *= b[i];
  }
  return std::abs(pa - pb);
}

double hybrid_bound(const std::vector<double>& a, const std::vector<double>& b) {
  require_dim(a.size(), b.size(), "hybrid_bound");
  double Q = 0.0, e = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    Q = std::max({Q, std::abs(a[i]), std::abs(b[i])});
    e = std::max(e, std::abs(a[i] - b[i]));
  }
  const int n = static_cast<int>(a.size());
  return n * std::pow(Q, n - 1) * e;
}

double suggest_sampler_dimension(int P, double L, int n, double eps, int D, double C,
                                 double gamma) {
  const double first = 2.0 / C * L * std::ldexp(1.0, P) * P *
                       (n + std::log2(static_cast<double>(n)) + std::log2(8.0 / eps));
  const double second = 40.0 * gamma * D * std::log2(2.0 * D);
  return std::max(first, second);
}

int sampler_dimension(int D) {
  const double want = D >= 1 ? suggest_sampler_dimension(0, 0.0, 1, 0.05, D) : 0.0;
  int M = 64;
  while (M < want) M *= 2;
  return M;
}

// ---------------------------------------------------------------- sampler

HermiteSampler::HermiteSampler(const OracleFunction& f, const SamplerConfig& config)
    : n_(f.n), D_(config.D >= 0 ? config.D : f.degree_cutoff),
      cap_factor_(config.attempt_cap_factor) {
  const int M = config.M > 0 ? config.M : sampler_dimension(D_);
  if (D_ + 1 >= M) throw InvalidArgument("sampler cutoff D must be below M - 1");
  check_grid_budget(f, M);
  const auto spec = GridSpec::make(M);
  // Rows of the inverse transform and the prepared per-axis ground state.
  CMat T(D_ + 1, M);
  CVec ground(M);
  if (config.transform == TransformKind::kReference) {
    const auto basis = hermite_basis(spec, D_);
    T = basis.states.transpose().cast<cplx>();
    ground = basis.state(0);
  } else {
    QHTConfig qc;
    qc.N = D_ + 1;
    qc.M = M;
    qc.eps = config.pipeline_eps;
    qc.N_high = std::min(M - 1, 4 * (D_ + 1));
    const auto blocks = qht_blocks(qc);
    const CMat U = blocks.as_matrix();
    T = U.adjoint();
    ground = U.col(0);
  }
  const RVec xs = std::sqrt(2.0) * grid_points(spec);  // oscillator grid -> Gaussian variable
  const double ground_norm2 = ground.squaredNorm();

  std::vector<cplx> amps;
  double norm2 = 0.0;
  if (f.is_product()) {
    std::vector<CVec> per_axis;
    norm2 = 1.0;
    for (int i = 0; i < n_; ++i) {
      CVec a(M);
      for (int j = 0; j < M; ++j) a[j] = f.factors[i](xs[j]) * ground[j];
      norm2 *= a.squaredNorm() / ground_norm2;
      per_axis.push_back(T * a);
    }
    const size_t K = static_cast<size_t>(std::pow(D_ + 1, n_));
    amps.assign(K, cplx(1.0));
    for (size_t idx = 0; idx < K; ++idx) {
      size_t r = idx;
      for (int i = n_ - 1; i >= 0; --i) {
        amps[idx] *= per_axis[i][r % (D_ + 1)];
        r /= (D_ + 1);
      }
    }
  } else {
    std::vector<double> vals = grid_values(n_, xs, [&](const RVec& x) { return f(x); });
    std::vector<cplx> state(vals.size());
    long total = 1;
    for (int i = 0; i < n_; ++i) total *= M;
    double nrm = 0.0;
    for (long flat = 0; flat < total; ++flat) {
      long r = flat;
      cplx g = 1.0;
      for (int i = n_ - 1; i >= 0; --i) {
        g *= ground[r % M];
        r /= M;
      }
      state[flat] = vals[flat] * g;
      nrm += std::norm(state[flat]);
    }
    norm2 = nrm / std::pow(ground_norm2, n_);
    std::vector<int> dims(n_, M);
    for (int a = 0; a < n_; ++a) state = contract(state, dims, a, T);
    amps = std::move(state);
  }
  if (norm2 <= 0.0) throw InvalidArgument("sampler: f vanishes on the grid");
  // an unbounded f has no rotation encoding; success_ = 0 marks it
  success_ = std::isfinite(f.bound) ? std::min(1.0, norm2 / (f.bound * f.bound)) : 0.0;
  const double total_mass = norm2 * std::pow(ground_norm2, n_);
  probs_.resize(amps.size() + 1);
  double acc = 0.0;
  for (size_t i = 0; i < amps.size(); ++i) {
    probs_[i] = std::norm(amps[i]) / total_mass;
    acc += probs_[i];
  }
  probs_.back() = std::max(0.0, 1.0 - acc);
  cdf_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
  const double last = cdf_.back();
  for (auto& c : cdf_) c /= last;
}

double HermiteSampler::probability(const MultiIndex& v) const {
  if (static_cast<int>(v.size()) != n_) throw DimensionMismatch("multi-index arity");
  size_t idx = 0;
  for (int c : v) {
    if (c < 0 || c > D_) return 0.0;
    idx = idx * (D_ + 1) + c;
  }
  return probs_[idx];
}

int HermiteSampler::attempt_cap() const {
  return static_cast<int>(std::ceil(cap_factor_ * kappa()));
}

HermiteSample HermiteSampler::draw(Rng& rng) const {
  const double u = rng.uniform();
  const size_t idx = std::min<size_t>(
      std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin(), cdf_.size() - 1);
  HermiteSample s;
  if (idx == cdf_.size() - 1) {
    s.overflow = true;
    return s;
  }
  s.v.resize(n_);
  size_t r = idx;
  for (int i = n_ - 1; i >= 0; --i) {
    s.v[i] = static_cast<int>(r % (D_ + 1));
    r /= (D_ + 1);
  }
  return s;
}

HermiteSample HermiteSampler::sample_postselected(Rng& rng) const {
  if (success_ <= 0.0) throw InvalidArgument("postselection needs a finite bound on f");
  const int cap = attempt_cap();
  for (int attempt = 1; attempt <= cap; ++attempt) {
    if (success_ >= 1.0 || rng.bernoulli(success_)) {
      auto s = draw(rng);
      s.attempts = attempt;
      return s;
    }
  }
  HermiteSample s;
  s.failed = true;
  s.attempts = cap;
  return s;
}

HermiteSample boolean_hermite_sample(const OracleFunction& f, const SamplerConfig& config,
                                     std::uint64_t seed) {
  if (!f.boolean) throw InvalidArgument("boolean sampler needs a {-1,+1}-valued function");
  Rng rng(seed);
  return HermiteSampler(f, config).draw(rng);
}

HermiteSample general_hermite_sample(const OracleFunction& f, const SamplerConfig& config,
                                     std::uint64_t seed) {
  Rng rng(seed);
  return HermiteSampler(f, config).sample_postselected(rng);
}

Histogram::Histogram(int n_, int D_) : n(n_), D(D_) {
  counts.assign(static_cast<size_t>(std::pow(D + 1, n)), 0);
}

void Histogram::add(const HermiteSample& s) {
  if (s.failed) return;
  ++total;
  if (s.overflow) {
    ++overflow;
    return;
  }
  size_t idx = 0;
  for (int c : s.v) idx = idx * (D + 1) + c;
  ++counts[idx];
}

double Histogram::frequency(const MultiIndex& v) const {
  if (total == 0) return 0.0;
  size_t idx = 0;
  for (int c : v) idx = idx * (D + 1) + c;
  return static_cast<double>(counts[idx]) / total;
}

double tv_distance(const Histogram& h, const SpectrumTable& table) {
  if (h.n != table.n || h.D != table.D) throw DimensionMismatch("histogram/table shape");
  if (h.total == 0) throw InvalidArgument("empty histogram");
  double tv = 0.0, qsum = 0.0;
  for (size_t i = 0; i < table.size(); ++i) {
    const double q = table.coeff[i] * table.coeff[i] / table.norm2;
    qsum += q;
    tv += std::abs(static_cast<double>(h.counts[i]) / h.total - q);
  }
  tv += std::abs(static_cast<double>(h.overflow) / h.total - std::max(0.0, 1.0 - qsum));
  return 0.5 * tv;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  require_dim(p.size(), q.size(), "tv_distance");
  double tv = 0.0;
  for (size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

// ---------------------------------------------------------------- sign spectrum

namespace {
double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
}  // namespace

std::vector<double> sign_coefficients(int k_max, int M_quad) {
  OracleFunction f;
  f.name = "sgn";
  f.n = 1;
  f.boolean = true;
  f.eval = [](const RVec& x) { return sgn(x[0]); };
  f.factors = {sgn};
  const auto t = spectrum_table(f, k_max, M_quad);
  return t.coeff;
}

double sign_coefficient_closed_form(int k) {
  if (k < 0) throw InvalidArgument("k must be >= 0");
  if (k % 2 == 0) return 0.0;
  // He_{2m}(0) = (-1)^m (2m)! / (2^m m!)
  const int m = (k - 1) / 2;
  const double log_abs = std::lgamma(2.0 * m + 1) - m * std::log(2.0) - std::lgamma(m + 1.0);
  const double he0 = (m % 2 ? -1.0 : 1.0) * std::exp(log_abs);
  return 2.0 * gaussian_density(0.0) * he0 / std::exp(0.5 * std::lgamma(k + 1.0));
}

double fit_exponential_decay(const std::vector<double>& coeffs) {
  double c = std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < coeffs.size(); k += 2) {
    const double a = std::abs(coeffs[k]);
    if (a == 0.0) continue;
    c = std::min(c, -std::log(a) / static_cast<double>(k));
  }
  if (!std::isfinite(c)) throw InvalidArgument("no nonzero odd coefficients to fit");
  return c;
}

// ---------------------------------------------------------------- planted corpus

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

MultiIndex parse_index(const std::string& s, char sep) {
  MultiIndex v;
  for (const auto& p : split(s, sep)) v.push_back(std::stoi(p));
  return v;
}

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

// max_{|x| <= 3} |h_k(x)|
double box_max_1d(int k) {
  double m = 0.0;
  for (int i = -600; i <= 600; ++i) m = std::max(m, std::abs(probabilist_hermite(k, i * 0.005)[k]));
  return m;
}

double box_max_sum(int n, const std::vector<std::pair<MultiIndex, double>>& terms) {
  const int steps = n == 1 ? 1201 : (n == 2 ? 241 : 61);
  RVec nodes(steps);
  for (int i = 0; i < steps; ++i) nodes[i] = -3.0 + 6.0 * i / (steps - 1);
  auto vals = grid_values(n, nodes, [&](const RVec& x) {
    double s = 0.0;
    for (const auto& [v, c] : terms) s += c * hermite_multi(v, x);
    return std::abs(s);
  });
  return *std::max_element(vals.begin(), vals.end());
}

}  // namespace

PlantedSpec parse_planted(const std::string& line) {
  const auto toks = split(line, ' ');
  if (toks.empty()) throw ConfigError("empty planted description");
  static const char* const kFamilies[] = {"constant",         "product_sign",
                                          "noisy_product_sign", "sign_threshold",
                                          "tail_indicator",   "gaussian_bump",
                                          "hermite_monomial", "hermite_sum"};
  PlantedSpec s;
  s.family = toks[0];
  if (std::none_of(std::begin(kFamilies), std::end(kFamilies),
                   [&](const char* f) { return s.family == f; }))
    throw ConfigError("unknown planted family '" + s.family + "'");
  bool have_n = false;
  for (size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in '" + toks[i] + "'");
    const std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
    try {
      if (k == "n") {
        s.n = std::stoi(v);
        have_n = true;
      } else if (k == "S") {
        s.support = parse_index(v, ',');
      } else if (k == "v") {
        s.v = parse_index(v, '.');
      } else if (k == "terms") {
        for (const auto& term : split(v, ';')) {
          const auto colon = term.find(':');
          if (colon == std::string::npos) throw ConfigError("term needs v:c");
          s.terms.emplace_back(parse_index(term.substr(0, colon), '.'),
                               std::stod(term.substr(colon + 1)));
        }
      } else if (k == "value") {
        s.value = std::stod(v);
      } else if (k == "a") {
        s.a = std::stod(v);
      } else if (k == "kappa") {
        const double kap = std::stod(v);
        if (kap < 1.0) throw ConfigError("kappa must be >= 1");
        s.kappa = kap;
      } else if (k == "axis") {
        s.axis = std::stoi(v);
      } else if (k == "eta") {
        s.eta = std::stod(v);
      } else if (k == "D") {
        s.D = std::stoi(v);
      } else if (k == "clip") {
        s.clip = v != "0";
      } else {
        throw ConfigError("unknown planted key '" + k + "'");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad value in '" + toks[i] + "'");
    }
  }
  if (!have_n || s.n < 1) throw ConfigError("planted description needs n >= 1");
  if (s.kappa > 0.0) {
    if (s.family == "tail_indicator") {
      // P(|x| >= a) = 1/kappa^2
      s.a = std::sqrt(2.0) * boost::math::erfc_inv(1.0 / (s.kappa * s.kappa));
    } else if (s.family == "gaussian_bump") {
      // E[exp(-2 a |x|^2)] = (1 + 4a)^{-n/2} = 1/kappa^2
      s.a = (std::pow(s.kappa, 4.0 / s.n) - 1.0) / 4.0;
    } else {
      throw ConfigError("kappa= applies to tail_indicator and gaussian_bump only");
    }
  }
  return s;
}

std::vector<PlantedSpec> load_corpus(std::istream& is) {
  std::vector<PlantedSpec> out;
  std::string line;
  while (std::getline(is, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_planted(line));
  }
  return out;
}

std::string describe(const PlantedSpec& s) {
  std::ostringstream os;
  os << s.family << " n=" << s.n;
  if (!s.support.empty()) os << " S=" << join(s.support, ',');
  if (!s.v.empty()) os << " v=" << join(s.v, '.');
  if (!s.terms.empty()) {
    os << " terms=";
    for (size_t i = 0; i < s.terms.size(); ++i)
      os << (i ? ";" : "") << join(s.terms[i].first, '.') << ':' << s.terms[i].second;
  }
  if (s.family == "constant") os << " value=" << s.value;
  if (s.family == "sign_threshold") os << " axis=" << s.axis << " a=" << s.a;
  if (s.family == "tail_indicator" || s.family == "gaussian_bump") os << " a=" << s.a;
  if (s.family == "noisy_product_sign") os << " eta=" << s.eta;
  return os.str();
}

OracleFunction make_planted(const PlantedSpec& s) {
  OracleFunction f;
  f.name = describe(s);
  f.n = s.n;
  f.degree_cutoff = s.D;
  auto one = [](double) { return 1.0; };
  auto check_coord = [&](int i) {
    if (i < 0 || i >= s.n) throw ConfigError("coordinate out of range in " + f.name);
  };
  std::vector<std::function<double(double)>> factors(s.n, one);
  if (s.family == "constant") {
    if (std::abs(s.value) > 1.0) throw ConfigError("constant must lie in [-1, 1]");
    const double c = s.value;
    factors[0] = [c](double) { return c; };
    f.boolean = std::abs(c) == 1.0;
  } else if (s.family == "product_sign" || s.family == "noisy_product_sign") {
    for (int i : s.support) {
      check_coord(i);
      factors[i] = sgn;
    }
    f.boolean = true;
    if (s.family == "noisy_product_sign") {
      if (s.support.empty()) throw ConfigError("noisy product sign needs a support");
      if (s.eta < 0.0 || s.eta >= 1.0) throw ConfigError("eta must lie in [0, 1)");
      // flip inside a symmetric band of Gaussian measure eta so the factor stays odd
      const double a = std::sqrt(2.0) * boost::math::erf_inv(s.eta);
      factors[s.support[0]] = [a](double x) { return std::abs(x) < a ? -sgn(x) : sgn(x); };
    }
  } else if (s.family == "sign_threshold") {
    check_coord(s.axis);
    const double a = s.a;
    factors[s.axis] = [a](double x) { return x >= a ? 1.0 : -1.0; };
    f.boolean = true;
  } else if (s.family == "tail_indicator") {
    const double a = s.a;
    factors[0] = [a](double x) { return std::abs(x) >= a ? 1.0 : 0.0; };
  } else if (s.family == "gaussian_bump") {
    if (s.a < 0.0) throw ConfigError("bump rate must be >= 0");
    const double a = s.a;
    for (int i = 0; i < s.n; ++i) factors[i] = [a](double x) { return std::exp(-a * x * x); };
    f.gamma2 = s.n * 4.0 * a * a * std::pow(1.0 + 4.0 * a, -0.5 * (s.n + 2));
  } else if (s.family == "hermite_monomial") {
    if (static_cast<int>(s.v.size()) != s.n) throw ConfigError("monomial index arity");
    double g2 = 0.0;
    for (int i = 0; i < s.n; ++i) {
      const int k = s.v[i];
      const double c = s.clip ? box_max_1d(k) : 1.0;
      const bool clip = s.clip;
      factors[i] = [k, c, clip](double x) {
        const double v = probabilist_hermite(k, x)[k] / c;
        return clip ? std::clamp(v, -1.0, 1.0) : v;
      };
      g2 += k;
    }
    f.gamma2 = g2;
    if (!s.clip) f.bound = std::numeric_limits<double>::infinity();
  } else if (s.family == "hermite_sum") {
    if (s.terms.empty()) throw ConfigError("hermite_sum needs terms");
    double g2 = 0.0, w = 0.0;
    for (const auto& [v, c] : s.terms) {
      if (static_cast<int>(v.size()) != s.n) throw ConfigError("term index arity");
      g2 += degree(v) * c * c;
      w += c * c;
    }
    const double C = s.clip ? box_max_sum(s.n, s.terms) : 1.0;
    const auto terms = s.terms;
    const bool clip = s.clip;
    f.eval = [terms, C, clip](const RVec& x) {
      double v = 0.0;
      for (const auto& [idx, c] : terms) v += c * hermite_multi(idx, x);
      v /= C;
      return clip ? std::clamp(v, -1.0, 1.0) : v;
    };
    f.gamma2 = g2 / w;
    if (!s.clip) f.bound = std::numeric_limits<double>::infinity();
    return f;
  } else {
    throw ConfigError("unknown planted family '" + s.family + "'");
  }
  f.factors = factors;
  f.eval = [factors](const RVec& x) {
    double p = 1.0;
    for (size_t i = 0; i < factors.size(); ++i) p *= factors[i](x[i]);
    return p;
  };
  return f;
}

std::vector<PlantedSpec> sampling_corpus() {
  const char* lines[] = {
      "constant n=1 value=1 D=9",
      "constant n=2 value=1 D=9",
      "product_sign n=1 S=0 D=9",
      "product_sign n=2 S=0,1 D=9",
      "hermite_monomial n=1 v=2 D=9",
      "hermite_monomial n=2 v=1.2 D=9",
      "hermite_sum n=1 terms=1:0.8;3:0.6 D=9",
      "hermite_sum n=2 terms=1.0:0.8;0.2:0.6 D=9",
  };
  std::vector<PlantedSpec> out;
  for (const char* l : lines) out.push_back(parse_planted(l));
  return out;
}

}  // namespace qht
