// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "qht/learning_testers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qht/spectral_core.hpp"

namespace qht {

CoefficientPattern CoefficientPattern::prefix(const std::vector<int>& fixed, int n) {
  if (static_cast<int>(fixed.size()) > n) throw DimensionMismatch("prefix longer than arity");
  CoefficientPattern p;
  p.entries.assign(n, kWildcard);
  std::copy(fixed.begin(), fixed.end(), p.entries.begin());
  return p;
}

int CoefficientPattern::fixed_count() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](int e) { return e >= 0; }));
}

bool CoefficientPattern::is_prefix() const {
  bool wild = false;
  for (int e : entries) {
    if (e < 0) wild = true;
    else if (wild) return false;
  }
  return true;
}

std::string CoefficientPattern::str() const {
  std::ostringstream os;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i) os << ',';
    if (entries[i] < 0) os << '*';
    else os << entries[i];
  }
  return os.str();
}

double weight_variance_proxy(const OracleFunction& f) {
  if (std::isfinite(f.bound)) return std::pow(f.bound, 4);
  return std::max(1.0, f.gamma2);
}

long weight_sample_count(double variance_proxy, double eps_est, double delta) {
  if (!(eps_est > 0.0)) throw InvalidArgument("weight estimate needs eps > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("weight estimate needs 0 < delta < 1");
  const double m = std::ceil(variance_proxy / (eps_est * eps_est) * std::log(2.0 / delta));
  return std::max(2L, static_cast<long>(m));
}

namespace {

void check_pattern(const OracleFunction& f, const CoefficientPattern& p) {
  if (p.n() != f.n) throw DimensionMismatch("pattern arity does not match f");
}

// Empirical Bernstein (Maurer-Pontil) with the observed range standing in for the a-priori one.
double bernstein_half_width(double var, double range, long m, double delta) {
  const double l = std::log(3.0 / delta);
  return std::sqrt(2.0 * var * l / m) + 3.0 * range * l / std::max(1L, m - 1);
}

}  // namespace

WeightEstimate weight_estimate(const OracleFunction& f, const CoefficientPattern& pattern,
                               double eps_est, double delta, Rng& rng, long max_samples) {
  check_pattern(f, pattern);
  const long m = weight_sample_count(weight_variance_proxy(f), eps_est, delta);
  if (m > max_samples) throw BudgetExceeded("weight estimate needs " + std::to_string(m) + " samples");
  const int n = f.n;
  RVec x(n), xp(n);
  double sum = 0.0, sum2 = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (long s = 0; s < m; ++s) {
    for (int i = 0; i < n; ++i) {
      if (pattern.entries[i] < 0) {
        x[i] = xp[i] = rng.normal();
      } else {
        x[i] = rng.normal();
        xp[i] = rng.normal();
      }
    }
    double hy = 1.0, hyp = 1.0;
    for (int i = 0; i < n; ++i) {
      const int a = pattern.entries[i];
      if (a <= 0) continue;
      hy *= probabilist_hermite(a, x[i])[a];
      hyp *= probabilist_hermite(a, xp[i])[a];
    }
    const double val = f(x) * f(xp) * hy * hyp;
    sum += val;
    sum2 += val * val;
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  WeightEstimate w;
  w.pattern = pattern;
  w.samples = m;
  w.queries = 2 * m;
  w.confidence = 1.0 - delta;
  w.value = sum / m;
  const double var = std::max(0.0, (sum2 - m * w.value * w.value) / (m - 1));
  w.half_width = bernstein_half_width(var, hi - lo, m, delta);
  return w;
}

double restriction_coefficient(const OracleFunction& f, const CoefficientPattern& pattern,
                               const RVec& z, int M_quad) {
  check_pattern(f, pattern);
  std::vector<int> fixed_axes, free_axes;
  for (int i = 0; i < f.n; ++i) (pattern.entries[i] >= 0 ? fixed_axes : free_axes).push_back(i);
  if (z.size() != static_cast<Eigen::Index>(free_axes.size()))
    throw DimensionMismatch("z must list the wildcard coordinates");
  const int k = static_cast<int>(fixed_axes.size());
  const int bits = static_cast<int>(std::lround(std::log2(M_quad)));
  if (k * bits > 24) throw BudgetExceeded("restriction quadrature grid too large");
  const auto spec = GridSpec::make(M_quad);
  const RVec nodes = grid_points(spec);
  // per-axis weights h nu(y) h_a(y)
  std::vector<RVec> w(k, RVec(M_quad));
  for (int a = 0; a < k; ++a) {
    const int idx = pattern.entries[fixed_axes[a]];
    for (int j = 0; j < M_quad; ++j)
      w[a][j] = spec.h * gaussian_density(nodes[j]) * probabilist_hermite(idx, nodes[j])[idx];
  }
  RVec x(f.n);
  for (size_t i = 0; i < free_axes.size(); ++i) x[free_axes[i]] = z[i];
  long total = 1;
  for (int a = 0; a < k; ++a) total *= M_quad;
  double acc = 0.0;
  for (long flat = 0; flat < total; ++flat) {
    long r = flat;
    double weight = 1.0;
    for (int a = k - 1; a >= 0; --a) {
      const int j = static_cast<int>(r % M_quad);
      r /= M_quad;
      x[fixed_axes[a]] = nodes[j];
      weight *= w[a][j];
    }
    if (weight != 0.0) acc += weight * f(x);
  }
  return acc;
}

double estimate_gamma2(const OracleFunction& f, Rng& rng, int points, double step) {
  if (points < 1 || !(step > 0.0)) throw InvalidArgument("gradient estimate needs points >= 1, step > 0");
  RVec x(f.n);
  double acc = 0.0;
  for (int p = 0; p < points; ++p) {
    for (int i = 0; i < f.n; ++i) x[i] = rng.normal();
    double g2 = 0.0;
    for (int i = 0; i < f.n; ++i) {
      RVec xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double d = (f(xp) - f(xm)) / (2.0 * step);
      g2 += d * d;
    }
    acc += g2;
  }
  return acc / points;
}

const char* ggl_mode_name(GGLMode mode) {
  return mode == GGLMode::kQuantum ? "quantum" : "classical";
}

int ggl_degree_cap(const OracleFunction& f, double tau, Rng& rng) {
  const double g2 = f.gamma2 > 0.0 ? f.gamma2 : estimate_gamma2(f, rng);
  const double m = std::ceil(4.0 * g2 / tau) + 4.0;
  if (!(m < 1e6)) throw BudgetExceeded("GGL degree cap is not finite");
  return static_cast<int>(m);
}

namespace {

struct Node {
  std::vector<int> prefix;
  double estimate;
};

// Prefix weights from one batch of Hermite samples: W = ||f||^2 * fraction with that prefix.
class SampleWeights {
 public:
  SampleWeights(const OracleFunction& f, const GGLConfig& cfg, int m, long max_nodes, Rng& rng,
                GGLResult& out) {
    SamplerConfig sc;
    sc.M = cfg.sampler_M;
    sc.D = m;
    HermiteSampler sampler(f, sc);
    const double tau2 = cfg.tau * cfg.tau;
    // fraction to +-tau^2/(8 B^2) uniformly over the nodes, ||f||^2 to +-tau^2/8
    const double B2 = std::isfinite(f.bound) ? f.bound * f.bound : 1.0;
    const double eta = tau2 / (8.0 * B2);
    const long count = static_cast<long>(
        std::ceil(std::log(4.0 * max_nodes / cfg.delta) / (2.0 * eta * eta)));
    Rng srng = rng.split(1);
    for (long s = 0; s < count; ++s) {
      HermiteSample hs;
      if (sampler.success_probability() > 0.0) {
        hs = sampler.sample_postselected(srng);
      } else {
        hs = sampler.draw(srng);
      }
      out.queries += hs.attempts;
      ++out.samples;
      if (hs.failed) continue;
      ++total_;
      if (!hs.overflow) samples_.push_back(hs.v);
    }
    if (total_ == 0) throw BudgetExceeded("every postselection attempt hit the cap");
    // Hoeffding on f^2 in [0, B^2]
    const long norm_count = static_cast<long>(
        std::ceil(std::log(4.0 / cfg.delta) / (2.0 * std::pow(tau2 / (8.0 * B2), 2))));
    Rng nrng = rng.split(2);
    RVec x(f.n);
    double acc = 0.0;
    for (long s = 0; s < norm_count; ++s) {
      for (int i = 0; i < f.n; ++i) x[i] = nrng.normal();
      const double v = f(x);
      acc += v * v;
    }
    out.queries += norm_count;
    norm2_ = acc / norm_count;
    std::sort(samples_.begin(), samples_.end());
  }

  double weight(const std::vector<int>& prefix) const {
    auto lo = std::lower_bound(samples_.begin(), samples_.end(), prefix);
    long hits = 0;
    for (auto it = lo; it != samples_.end(); ++it) {
      if (!std::equal(prefix.begin(), prefix.end(), it->begin())) break;
      ++hits;
    }
    return norm2_ * static_cast<double>(hits) / static_cast<double>(total_);
  }

 private:
  std::vector<MultiIndex> samples_;
  long total_ = 0;
  double norm2_ = 0.0;
};

}  // namespace

GGLResult gaussian_goldreich_levin(const OracleFunction& f, const GGLConfig& config, Rng& rng) {
  if (!(config.tau > 0.0 && config.tau < 1.0)) throw InvalidArgument("GGL needs 0 < tau < 1");
  GGLResult out;
  const int n = f.n;
  Rng cap_rng = rng.split(0);
  const int m = config.degree_cap >= 0 ? config.degree_cap : ggl_degree_cap(f, config.tau, cap_rng);
  out.degree_cap = m;
  const double tau2 = config.tau * config.tau;
  const auto list_cap = static_cast<size_t>(std::floor(4.0 / tau2));
  // each level extends at most list_cap prefixes by m + 1 indices
  const long max_nodes = static_cast<long>(n) * (m + 1) * std::max<size_t>(list_cap, 1);
  const double delta_node = config.delta / max_nodes;

  std::unique_ptr<SampleWeights> sw;
  if (config.mode == GGLMode::kQuantum) sw = std::make_unique<SampleWeights>(f, config, m, max_nodes, rng, out);

  std::vector<Node> frontier{{{}, 0.0}};
  for (int level = 0; level < n; ++level) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (int a = 0; a <= m; ++a) {
        if (out.nodes >= config.node_budget) {
          out.failed = true;
          break;
        }
        auto prefix = node.prefix;
        prefix.push_back(a);
        double est;
        if (sw) {
          est = sw->weight(prefix);
        } else {
          Rng node_rng = rng.split(1000 + out.nodes);
          const auto w = weight_estimate(f, CoefficientPattern::prefix(prefix, n), tau2 / 4.0,
                                         delta_node, node_rng);
          out.queries += w.queries;
          out.samples += w.samples;
          est = w.value;
        }
        ++out.nodes;
        if (est >= tau2 / 2.0) next.push_back({prefix, est});
      }
      if (out.failed) break;
    }
    // Parseval bounds the true survivors by 4/tau^2; trim estimation noise beyond that
    std::stable_sort(next.begin(), next.end(),
                     [](const Node& a, const Node& b) { return a.estimate > b.estimate; });
    if (next.size() > list_cap) next.resize(list_cap);
    frontier = std::move(next);
    if (out.failed) break;
  }
  if (!out.failed) {
    std::sort(frontier.begin(), frontier.end(),
              [](const Node& a, const Node& b) { return a.prefix < b.prefix; });
    for (const auto& node : frontier) {
      out.list.push_back(node.prefix);
      out.estimates.push_back(node.estimate);
    }
  }
  return out;
}

GGLCheck check_ggl(const GGLResult& result, const SpectrumTable& truth, double tau) {
  GGLCheck c;
  c.size_ok = result.list.size() <= static_cast<size_t>(std::floor(4.0 / (tau * tau)));
  c.sound = true;
  for (const auto& v : result.list) {
    bool inside = std::all_of(v.begin(), v.end(), [&](int e) { return e <= truth.D; });
    const double a = inside ? std::abs(truth.at(v)) : 0.0;
    if (a < tau / 2.0) c.sound = false;
  }
  c.complete = !result.failed;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (std::abs(truth.coeff[i]) < tau) continue;
    const auto v = truth.unflat(i);
    if (std::find(result.list.begin(), result.list.end(), v) == result.list.end()) c.complete = false;
  }
  return c;
}

long low_degree_sample_count(double eps, double delta, double c) {
  if (!(eps > 0.0)) throw InvalidArgument("tester needs eps2 > eps1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("tester needs 0 < delta < 1");
  return static_cast<long>(std::ceil(c * std::log(1.0 / delta) / (eps * eps)));
}

namespace {

void check_promise(const TesterConfig& cfg) {
  if (!(cfg.eps1 >= 0.0 && cfg.eps2 > cfg.eps1 && cfg.eps2 <= 1.0))
    throw InvalidArgument("tester needs 0 <= eps1 < eps2 <= 1");
}

HermiteSampler make_sampler(const OracleFunction& f, const TesterConfig& cfg) {
  SamplerConfig sc;
  sc.M = cfg.sampler_M;
  sc.D = cfg.sampler_D;
  return HermiteSampler(f, sc);
}

// Postselected sample when f carries a finite bound, else a draw from the accepted branch.
HermiteSample one_sample(const HermiteSampler& s, Rng& rng, TesterVerdict& v) {
  HermiteSample hs = s.success_probability() > 0.0 ? s.sample_postselected(rng) : s.draw(rng);
  v.queries += hs.attempts;
  ++v.samples;
  return hs;
}

std::vector<int> support_of(const MultiIndex& v) {
  std::vector<int> s;
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) s.push_back(static_cast<int>(i));
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "." : "") << v[i];
  return os.str();
}

}  // namespace

TesterVerdict test_product_sign(const OracleFunction& f, int k, const TesterConfig& cfg, Rng& rng) {
  check_promise(cfg);
  const auto sampler = make_sampler(f, cfg);
  TesterVerdict v;
  v.threshold = 1.0 - 0.5 * (cfg.eps1 + cfg.eps2);
  const auto first = one_sample(sampler, rng, v);
  if (first.failed || first.overflow) return v;
  const auto S = support_of(first.v);
  if (static_cast<int>(S.size()) != k) return v;
  const long m = low_degree_sample_count(cfg.eps2 - cfg.eps1, cfg.delta, cfg.c);
  long hits = 0;
  for (long i = 0; i < m; ++i) {
    const auto s = one_sample(sampler, rng, v);
    if (!s.failed && !s.overflow && support_of(s.v) == S) ++hits;
  }
  v.statistic = static_cast<double>(hits) / m;
  v.accept = v.statistic >= v.threshold;
  if (v.accept) v.witness = "S=" + join_ints(S);
  return v;
}

TesterVerdict test_low_degree(const OracleFunction& f, int d, const TesterConfig& cfg, Rng& rng) {
  check_promise(cfg);
  if (cfg.sampler_D < d) throw InvalidArgument("low-degree tester needs sampler_D >= d");
  const auto sampler = make_sampler(f, cfg);
  TesterVerdict v;
  v.threshold = 1.0 - 0.5 * (cfg.eps1 + cfg.eps2);
  const long m = low_degree_sample_count(cfg.eps2 - cfg.eps1, cfg.delta, cfg.c);
  long low = 0;
  for (long i = 0; i < m; ++i) {
    const auto s = one_sample(sampler, rng, v);
    if (!s.failed && !s.overflow && degree(s.v) <= d) ++low;
  }
  v.statistic = static_cast<double>(low) / m;
  v.accept = v.statistic >= v.threshold;
  if (v.accept) v.witness = "X=" + std::to_string(v.statistic);
  return v;
}

TesterVerdict test_hermite_polynomial(const OracleFunction& f, int k, const TesterConfig& cfg,
                                      Rng& rng) {
  check_promise(cfg);
  const auto sampler = make_sampler(f, cfg);
  TesterVerdict v;
  v.threshold = 1.0 - 0.5 * (cfg.eps1 + cfg.eps2);
  const double eps = cfg.eps2 - cfg.eps1;
  const int rounds = static_cast<int>(std::ceil(std::log2(1.0 / eps)) + std::ceil(std::log2(1.0 / cfg.delta)));
  std::vector<MultiIndex> candidates;
  for (int r = 0; r < rounds; ++r) {
    const auto s = one_sample(sampler, rng, v);
    if (s.failed || s.overflow) continue;
    if (static_cast<int>(support_of(s.v).size()) != k) continue;
    if (std::find(candidates.begin(), candidates.end(), s.v) == candidates.end()) candidates.push_back(s.v);
  }
  if (candidates.empty()) return v;
  const double delta_c = cfg.delta / (2.0 * candidates.size());
  // pilot ||f||^2 sets the sample count for +-eps/2 on the normalized correlation
  Rng prng = rng.split(1);
  RVec x(f.n);
  const long pilot = 2000;
  double p2 = 0.0;
  for (long i = 0; i < pilot; ++i) {
    for (int j = 0; j < f.n; ++j) x[j] = prng.normal();
    const double y = f(x);
    p2 += y * y;
  }
  v.queries += pilot;
  p2 = std::max(p2 / pilot, 1e-12);
  const double B2 = std::isfinite(f.bound) ? f.bound * f.bound : 1.0;
  const long count = static_cast<long>(
      std::ceil(8.0 * B2 / (p2 * eps * eps) * std::log(4.0 / delta_c)));
  double best = -1.0;
  MultiIndex best_v;
  for (size_t c = 0; c < candidates.size(); ++c) {
    Rng crng = rng.split(2 + c);
    double fh = 0.0, ff = 0.0;
    for (long i = 0; i < count; ++i) {
      for (int j = 0; j < f.n; ++j) x[j] = crng.normal();
      const double y = f(x);
      fh += y * hermite_multi(candidates[c], x);
      ff += y * y;
    }
    v.queries += count;
    const double corr = std::abs(fh / count) / std::sqrt(std::max(ff / count, 1e-300));
    if (corr > best) {
      best = corr;
      best_v = candidates[c];
    }
  }
  v.statistic = best;
  v.accept = best >= v.threshold;
  if (v.accept) v.witness = "v=" + join_ints(best_v);
  return v;
}

std::vector<GGLInstance> ggl_corpus() {
  // sign families have no finite gradient bound, so their cap is set explicitly
  return {
      {parse_planted("product_sign n=2 S=0"), 0.5, 8},
      {parse_planted("product_sign n=2 S=0,1"), 0.5, 8},
      {parse_planted("sign_threshold n=2 axis=1 a=0.3"), 0.3, 8},
      {parse_planted("gaussian_bump n=2 a=0.5"), 0.3, -1},
      {parse_planted("product_sign n=3 S=1"), 0.3, 8},
  };
}

const char* tester_name(TesterKind kind) {
  switch (kind) {
    case TesterKind::kProductSign: return "product_sign";
    case TesterKind::kLowDegree: return "low_degree";
    case TesterKind::kHermitePolynomial: return "hermite_polynomial";
  }
  return "?";
}

std::vector<TesterInstance> tester_corpus() {
  using K = TesterKind;
  auto p = [](const char* s) { return parse_planted(s); };
  return {
      {K::kProductSign, p("product_sign n=2 S=0"), 1, true},
      {K::kProductSign, p("noisy_product_sign n=2 S=1 eta=0.05"), 1, true},
      {K::kProductSign, p("product_sign n=3 S=0,2"), 2, true},
      {K::kProductSign, p("product_sign n=3 S=0,1,2"), 1, false},
      {K::kProductSign, p("product_sign n=3 S=1"), 2, false},
      {K::kLowDegree, p("hermite_sum n=2 terms=1.0:0.8;0.1:0.6"), 2, true},
      {K::kLowDegree, p("hermite_sum n=2 terms=1.1:0.975;3.0:0.2225"), 2, true},
      {K::kLowDegree, p("hermite_monomial n=2 v=2.1"), 2, false},
      {K::kLowDegree, p("hermite_sum n=2 terms=1.0:0.775;2.1:0.632"), 2, false},
      {K::kHermitePolynomial, p("hermite_monomial n=2 v=1.2"), 2, true},
      {K::kHermitePolynomial, p("hermite_sum n=2 terms=1.2:0.95;3.0:0.312"), 2, true},
      {K::kHermitePolynomial, p("hermite_sum n=2 terms=1.2:0.577;2.1:0.577;3.0:0.577"), 2, false},
      {K::kHermitePolynomial, p("hermite_monomial n=2 v=0.2"), 2, false},
  };
}

TesterVerdict run_tester(const TesterInstance& inst, const TesterConfig& config, Rng& rng) {
  const auto f = make_planted(inst.spec);
  switch (inst.kind) {
    case TesterKind::kProductSign: return test_product_sign(f, inst.k, config, rng);
    case TesterKind::kLowDegree: return test_low_degree(f, inst.k, config, rng);
    case TesterKind::kHermitePolynomial: return test_hermite_polynomial(f, inst.k, config, rng);
  }
  throw InvalidArgument("unknown tester");
}

void write_verdict_csv(std::ostream& os, const std::vector<VerdictRow>& rows) {
  os << "instance,mode,queries,verdict,correct\n";
  for (const auto& r : rows)
    os << '"' << r.instance << "\"," << r.mode << ',' << r.queries << ','
       << (r.accept ? "accept" : "reject") << ',' << (r.correct ? 1 : 0) << '\n';
}

}  // namespace qht
