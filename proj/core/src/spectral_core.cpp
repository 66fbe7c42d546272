// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "qht/spectral_core.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <vector>

namespace qht {

GridSpec GridSpec::make(int M) {
  if (M < 4 || M % 2 != 0) {
    throw InvalidArgument("grid dimension M must be even and >= 4, got " + std::to_string(M));
  }
  return GridSpec{M, std::sqrt(2.0 * kPi / M)};
}

double GridSpec::extent() const { return std::sqrt(kPi * M / 2.0); }

RVec grid_points(const GridSpec& spec) {
  RVec x(spec.M);
  for (int s = 0; s < spec.M; ++s) x[s] = spec.x(spec.label_of(s));
  return x;
}

namespace {

// Runs the normalized recurrence at one point, writing psi_0..psi_{n_max} into out.
// The Gaussian factor is carried as a log scale so that psi_n survives where psi_0
// alone would underflow.
template <typename Out>
void hermite_column(int n_max, double x, Out&& out) {
  constexpr double kBig = 1e150;
  const double log_base = -0.5 * x * x;
  double log_scale = 0.0;  // current values are true_value * exp(-(log_base + log_scale))
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25);
  auto emit = [&](int n, double v) {
    if (log_scale == 0.0 || v == 0.0) {
      out(n, v * std::exp(log_base));
    } else {
      out(n, std::copysign(std::exp(log_base + log_scale + std::log(std::abs(v))), v));
    }
  };
  emit(0, cur);
  for (int n = 0; n < n_max; ++n) {
    const double next =
        std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += std::log(kBig);
    }
    emit(n + 1, cur);
  }
}

}  // namespace

RVec hermite_functions(int n_max, double x) {
  if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
  RVec v(n_max + 1);
  hermite_column(n_max, x, [&](int n, double val) { v[n] = val; });
  return v;
}

HermiteTable hermite_table(int n_max, const GridSpec& spec) {
  if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
  HermiteTable t{spec, n_max, RMat(n_max + 1, spec.M)};
  for (int s = 0; s < spec.M; ++s) {
    const double x = spec.x(spec.label_of(s));
    hermite_column(n_max, x, [&](int n, double val) { t.values(n, s) = val; });
  }
  return t;
}

void HermiteTable::write_csv(std::ostream& os) const {
  os << "n,j,value\n";
  os.precision(17);
  for (int n = 0; n <= n_max; ++n) {
    for (int s = 0; s < spec.M; ++s) os << n << ',' << spec.label_of(s) << ',' << values(n, s) << '\n';
  }
}

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct CenteredDft::Plans {
  fftw_plan fwd = nullptr;  // FFTW_BACKWARD kernel: exp(+i...)
  fftw_plan bwd = nullptr;  // FFTW_FORWARD kernel: exp(-i...)
};

CenteredDft::CenteredDft(int M) : M_(M), plans_(std::make_unique<Plans>()) {
  if (M < 2 || M % 2 != 0) throw InvalidArgument("centered DFT needs even M");
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* a = fftw_alloc_complex(M);
  fftw_complex* b = fftw_alloc_complex(M);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->fwd = fftw_plan_dft_1d(M, a, b, FFTW_BACKWARD, flags);
  plans_->bwd = fftw_plan_dft_1d(M, a, b, FFTW_FORWARD, flags);
  fftw_free(a);
  fftw_free(b);
}

CenteredDft::~CenteredDft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
}

CVec CenteredDft::apply(const CVec& v, bool inverse_transform) const {
  require_dim(v.size(), M_, "centered DFT");
  const int half = M_ / 2;
  // Label j sits at storage s = j + M/2; the standard transform wants it at j mod M,
  // which for even M is the rotation s -> (s + M/2) mod M in both directions.
  std::vector<cplx> in(M_), out(M_);
  for (int s = 0; s < M_; ++s) in[(s + half) % M_] = v[s];
  fftw_execute_dft(inverse_transform ? plans_->bwd : plans_->fwd,
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(M_));
  CVec r(M_);
  for (int s = 0; s < M_; ++s) r[s] = out[(s + half) % M_] * scale;
  return r;
}

CVec CenteredDft::forward(const CVec& v) const { return apply(v, false); }
CVec CenteredDft::inverse(const CVec& v) const { return apply(v, true); }

std::shared_ptr<const CenteredDft> CenteredDft::get(int M) {
  static std::mutex m;
  static std::map<int, std::shared_ptr<const CenteredDft>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(M);
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<const CenteredDft>(M);
  cache.emplace(M, p);
  return p;
}

CVec centered_dft(const CVec& state, const GridSpec& spec, bool inverse) {
  require_dim(state.size(), spec.M, "centered_dft");
  return CenteredDft::get(spec.M)->apply(state, inverse);
}

CMat dense_centered_dft(int M) {
  if (M > 4096) throw BudgetExceeded("dense DFT limited to M <= 4096");
  CMat F(M, M);
  const double norm = 1.0 / std::sqrt(static_cast<double>(M));
  for (int a = 0; a < M; ++a) {
    for (int b = 0; b < M; ++b) {
      const long j = a - M / 2, k = b - M / 2;
      // reduce j*k mod M before forming the angle to keep the argument small
      const long r = ((j * k) % M + M) % M;
      F(a, b) = std::polar(norm, 2.0 * kPi * static_cast<double>(r) / M);
    }
  }
  return F;
}

CVec apply_diagonal_phase(const CVec& state, const RVec& phases) {
  require_dim(phases.size(), state.size(), "apply_diagonal_phase");
  CVec r(state.size());
  for (Eigen::Index s = 0; s < state.size(); ++s) r[s] = std::polar(1.0, -phases[s]) * state[s];
  return r;
}

}  // namespace qht
