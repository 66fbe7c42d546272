// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "qht/qht_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/SVD>

namespace qht {

// ---------------------------------------------------------------- calibration

Calibration parse_calibration(std::istream& is) {
  Calibration cal;
  bool have_version = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw ConfigError("calibration line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "version") {
        if (std::stoi(value) != Calibration::kVersion)
          throw ConfigError("unsupported calibration version " + value);
        have_version = true;
      } else if (key == "c0") {
        cal.c0 = std::stod(value);
      } else if (key == "c1") {
        cal.c1 = std::stod(value);
      } else if (key == "m_min") {
        cal.m_min = std::stoi(value);
      } else if (key == "hard_cap") {
        cal.hard_cap = std::stol(value);
      } else if (key == "delta_lower") {
        cal.delta_lower = std::stod(value);
      } else {
        throw ConfigError("unknown calibration key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("calibration line " + std::to_string(lineno) + ": bad value '" + value +
                        "'");
    }
  }
  if (!have_version) throw ConfigError("calibration file has no version line");
  if (!(cal.c0 > 0 && cal.c1 > 0 && cal.m_min >= 4 && cal.hard_cap >= cal.m_min &&
        cal.delta_lower > 0))
    throw ConfigError("calibration values out of range");
  return cal;
}

Calibration load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibration file " + path);
  return parse_calibration(in);
}

void write_calibration(std::ostream& os, const Calibration& cal) {
  os << "# qht dimension calibration\n"
     << "version = " << Calibration::kVersion << '\n';
  os.precision(6);
  os << "c0 = " << cal.c0 << '\n'
     << "c1 = " << cal.c1 << '\n'
     << "m_min = " << cal.m_min << '\n'
     << "hard_cap = " << cal.hard_cap << '\n'
     << "delta_lower = " << cal.delta_lower << '\n';
}

QHTConfig choose_dimensions(int N, double eps, const Calibration& cal) {
  if (N < 1) throw InvalidArgument("choose_dimensions needs N >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("choose_dimensions needs 0 < eps < 1");
  const double target =
      std::max<double>(cal.m_min, cal.c0 * std::pow(N, 2.25) / std::pow(eps, 3.25));
  long M = 4;
  while (M < target) {
    M *= 2;
    if (M > cal.hard_cap)
      throw ConfigError("required M exceeds hard cap " + std::to_string(cal.hard_cap));
  }
  QHTConfig c;
  c.N = N;
  c.eps = eps;
  c.M = static_cast<int>(M);
  c.N_high = static_cast<int>(std::ceil(cal.c1 * N / eps));
  if (c.N_high >= c.M || c.N_high <= N)
    throw ConfigError("N_high = " + std::to_string(c.N_high) + " incompatible with N = " +
                      std::to_string(N) + ", M = " + std::to_string(c.M));
  c.delta_lower = cal.delta_lower;
  c.aa_rounds = make_fixed_point_schedule(c.delta_lower, eps).L;
  c.calibration = cal;
  return c;
}

// ---------------------------------------------------------------- window and PR states

WindowFunction::WindowFunction(int n_) : n(n_) {
  if (n < 0) throw InvalidArgument("window degree must be >= 0");
  x_max = std::sqrt(0.75 * (2 * n + 1));
  delta = 1.0 / (20.0 * std::sqrt(2.0 * n + 1));
}

namespace {

double bump(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

// Double-exponential rule: the bump is flat to all orders at +-1, which caps fixed Gauss
// rules near 1e-8 and makes adaptive ones slow; tanh-sinh reaches ~3e-16.
double bump_mass(double lo, double hi) {
  if (hi <= lo) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(bump, lo, hi, 1e-14);
}

}  // namespace

double WindowFunction::operator()(double x) const {
  const double ax = std::abs(x);
  if (ax <= x_max) return 1.0;
  if (ax >= x_max + 2 * delta) return 0.0;
  // fraction of the bump (in units of delta) that stays inside [.., x_max + delta]
  static const double total = bump_mass(-1.0, 1.0);
  const double hi = std::min(1.0, (x_max + delta - ax) / delta);
  return std::clamp(bump_mass(-1.0, hi) / total, 0.0, 1.0);
}

double window_value(int n, double x) { return WindowFunction(n)(x); }

int pr_support_half_width(int n, int M) {
  return static_cast<int>(std::ceil(std::sqrt(0.75 * (2 * n + 1) * M / (2 * kPi))));
}

namespace {

struct PrParts {
  double amplitude;
  double phase;  // Theta, value is amplitude * sin(phase)
};

PrParts pr_parts(int n, const WindowFunction& g, double x) {
  if (n == 0) return {0.75 * g(x), kPi / 2};
  const double s = std::sqrt(2.0 * n + 1);
  const double phi = std::acos(std::clamp(x / s, -1.0, 1.0));
  const double gv = g(x);
  const double amp =
      gv == 0.0 ? 0.0
                : gv / std::sqrt(std::sin(phi)) * std::pow(2.0, 0.25) /
                      (std::sqrt(kPi) * std::pow(static_cast<double>(n), 0.25));
  const double theta = (n / 2.0 + 0.25) * (std::sin(2 * phi) - 2 * phi) + 0.75 * kPi;
  return {amp, theta};
}

double round_bits(double v, double unit, int r) {
  const double q = std::ldexp(1.0, r);
  return std::round(v / unit * q) / q * unit;
}

}  // namespace

PlancherelRotachState build_pr_state(int n, int M, int r_bits) {
  if (n < 0) throw InvalidArgument("PR state degree must be >= 0");
  const auto spec = GridSpec::make(M);
  const int J = pr_support_half_width(n, M);
  if (J >= M / 2)
    throw ConfigError("M = " + std::to_string(M) + " too small for PR state n = " +
                      std::to_string(n));
  const WindowFunction g(n);
  std::vector<PrParts> parts;
  parts.reserve(2 * J);
  double amax = 0.0;
  for (int j = -J; j < J; ++j) {
    parts.push_back(pr_parts(n, g, spec.x(j)));
    amax = std::max(amax, parts.back().amplitude);
  }
  const double scale = std::pow(2.0 * kPi / M, 0.25);
  PlancherelRotachState st;
  st.n = n;
  st.J = J;
  st.amplitudes = CVec::Zero(M);
  for (int j = -J; j < J; ++j) {
    PrParts p = parts[j + J];
    if (r_bits > 0) {
      p.amplitude = round_bits(p.amplitude, amax, r_bits);
      p.phase = round_bits(p.phase, 2 * kPi, r_bits);
    }
    st.amplitudes[spec.index_of(j)] = scale * p.amplitude * std::sin(p.phase);
  }
  st.norm = st.amplitudes.norm();
  if (st.norm == 0.0) throw ConfigError("PR state vanished on the grid");
  return st;
}

PlancherelRotachState build_pr_state(int n, const QHTConfig& config) {
  if (n >= config.N) throw InvalidArgument("PR state index must be < N");
  return build_pr_state(n, config.M, config.r_bits);
}

double pr_overlap(int n, int M) {
  const auto spec = GridSpec::make(M);
  const int J = pr_support_half_width(n, M);
  if (J >= M / 2) throw ConfigError("M too small for PR state");
  const WindowFunction g(n);
  double acc = 0.0;
  for (int j = -J; j < J; ++j) {
    const double x = spec.x(j);
    const auto p = pr_parts(n, g, x);
    if (p.amplitude == 0.0) continue;
    acc += hermite_functions(n, x)[n] * p.amplitude * std::sin(p.phase);
  }
  return acc * std::sqrt(2.0 * kPi / M);
}

double pr_max_amplitude(int n, int M) {
  const auto spec = GridSpec::make(M);
  const int J = pr_support_half_width(n, M);
  const WindowFunction g(n);
  double m = 0.0;
  for (int j = -J; j < J; ++j) {
    const auto p = pr_parts(n, g, spec.x(j));
    m = std::max(m, std::abs(p.amplitude * std::sin(p.phase)));
  }
  return m;
}

std::vector<OverlapPoint> overlap_curve(int n_min, int n_max, int M) {
  std::vector<OverlapPoint> out;
  for (int n = n_min; n <= n_max; ++n) out.push_back({n, pr_overlap(n, M)});
  return out;
}

void write_overlap_csv(std::ostream& os, const std::vector<OverlapPoint>& curve) {
  os << "n,overlap\n";
  for (const auto& p : curve) os << p.n << ',' << p.overlap << '\n';
}

// ---------------------------------------------------------------- filtering

int filter_bits(int M) {
  int m = 0;
  while ((1 << m) < M) ++m;
  if ((1 << m) != M) throw InvalidArgument("eigenstate filter needs M a power of two");
  return m;
}

CVec apply_filter_unitary(const DiscreteQHO& qho, int n, int j, const CVec& v, bool adjoint) {
  const double tau = std::ldexp(2.0 * kPi / qho.dim(), j);
  const cplx shift = std::polar(1.0, tau * (n + 0.5));
  if (!adjoint) return shift * fast_forward(qho, tau, v);
  return std::conj(shift) * apply_factored_adjoint(qho, decompose(tau), v);
}

FilterResult eigenstate_filter(const DiscreteQHO& qho, const CVec& state, int n) {
  require_dim(state.size(), qho.dim(), "eigenstate_filter");
  const int m = filter_bits(qho.dim());
  CVec v = state;
  for (int j = 0; j < m; ++j) v = 0.5 * (v + apply_filter_unitary(qho, n, j, v));
  return {v, state - v};
}

CVec eigenstate_filter_adjoint(const DiscreteQHO& qho, const CVec& state, int n) {
  require_dim(state.size(), qho.dim(), "eigenstate_filter_adjoint");
  const int m = filter_bits(qho.dim());
  CVec v = state;
  for (int j = m - 1; j >= 0; --j) v = 0.5 * (v + apply_filter_unitary(qho, n, j, v, true));
  return v;
}

double high_energy_leakage(const EigenDecomposition& eig, const CVec& v, int N_high) {
  require_dim(v.size(), eig.vectors.rows(), "high_energy_leakage");
  const int k = std::min<int>(N_high + 1, eig.vectors.cols());
  const CVec c = eig.vectors.leftCols(k).transpose().cast<cplx>() * v;
  return std::max(0.0, v.squaredNorm() - c.squaredNorm());
}

// ---------------------------------------------------------------- pipeline

CMat QHTBlocks::as_matrix() const {
  CMat U(config.M, static_cast<Eigen::Index>(outputs.size()));
  for (size_t n = 0; n < outputs.size(); ++n) U.col(n) = outputs[n];
  return U;
}

std::pair<double, double> QHTBlocks::isometry_range() const {
  Eigen::JacobiSVD<CMat> svd(as_matrix());
  const auto& s = svd.singularValues();
  return {s.minCoeff(), s.maxCoeff()};
}

QHTBlocks qht_blocks(const QHTConfig& config) {
  if (config.N < 1 || config.N >= config.M) throw InvalidArgument("need 1 <= N < M");
  const auto qho = DiscreteQHO::build(config.M);
  const int m = filter_bits(config.M);
  QHTBlocks out;
  out.config = config;
  out.schedule = make_fixed_point_schedule(config.delta_lower, config.eps);
  const auto basis = hermite_basis(qho.spec(), config.N - 1);
  const RMat ref = loewdin_orthonormalize(basis.states);
  for (int n = 0; n < config.N; ++n) {
    BlockReport rep;
    rep.n = n;
    const auto pr = build_pr_state(n, config);
    const CVec phi = pr.normalized();
    const CVec psi = ref.col(n).cast<cplx>();
    rep.pr_overlap = psi.dot(phi).real();
    // Block n: prepare phi, flag the filter's |0..0> branch, amplify in the
    // two-dimensional span of the flagged and unflagged parts, then uncompute the index.
    const CVec kept = eigenstate_filter(qho, phi, n).kept;
    rep.retention = kept.norm();
    const auto amp = amplify_two_level(std::min(1.0, rep.retention), out.schedule);
    rep.good_amplitude = amp.good;
    CVec w = amp.good * kept / rep.retention;
    CVec u = eigenstate_filter_adjoint(qho, w, n);
    if (config.parity_sign && n % 2 == 1) u = -u;
    rep.block_fidelity = std::norm(psi.dot(u));  // sign-blind
    rep.index_residual = std::max(0.0, 1.0 - u.squaredNorm());
    // filter + adjoint once, each amplification round uses the filter forward and back
    // plus one re-preparation
    out.op_passes += 2L * m + out.schedule.rounds() * (2L * m + 2) + 1;
    out.outputs.push_back(std::move(u));
    out.reports.push_back(rep);
  }
  return out;
}

CVec qht_reference(const CVec& alpha, const DiscreteHermiteBasis& basis, bool loewdin) {
  if (alpha.size() > basis.n_max + 1) throw InvalidArgument("alpha longer than the basis");
  const Eigen::Index N = alpha.size();
  const RMat B = loewdin ? loewdin_orthonormalize(basis.states.leftCols(N))
                         : RMat(basis.states.leftCols(N));
  return B.cast<cplx>() * alpha;
}

QHTResult qht_apply(const CVec& alpha, const QHTBlocks& blocks) {
  require_dim(alpha.size(), blocks.config.N, "qht_apply");
  if (std::abs(alpha.norm() - 1.0) > 1e-9) throw InvalidArgument("alpha must be normalized");
  QHTResult r;
  r.output = blocks.as_matrix() * alpha;
  const auto basis = hermite_basis(GridSpec::make(blocks.config.M), blocks.config.N - 1);
  CVec signed_alpha = alpha;
  if (blocks.config.parity_sign)
    for (Eigen::Index n = 1; n < alpha.size(); n += 2) signed_alpha[n] = -alpha[n];
  CVec ref = qht_reference(signed_alpha, basis, true);
  ref.normalize();
  r.fidelity = std::norm(ref.dot(r.output));
  r.residual_index_mass = std::max(0.0, 1.0 - r.output.squaredNorm());
  return r;
}

QHTResult qht_apply(const CVec& alpha, const QHTConfig& config) {
  return qht_apply(alpha, qht_blocks(config));
}

void write_block_report_csv(std::ostream& os, const QHTBlocks& blocks) {
  os << "n,pr_overlap,retention,good_re,good_im,block_fidelity,index_residual\n";
  for (const auto& r : blocks.reports)
    os << r.n << ',' << r.pr_overlap << ',' << r.retention << ',' << r.good_amplitude.real() << ','
       << r.good_amplitude.imag() << ',' << r.block_fidelity << ',' << r.index_residual << '\n';
}

}  // namespace qht
