// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <memory>

#include "qht/common.hpp"

namespace qht {

/// Position grid x_j = j * sqrt(2 pi / M) over signed labels j in [-M/2, M/2 - 1].
/// Storage index s = j + M/2.
struct GridSpec {
  int M = 0;
  double h = 0.0;

  static GridSpec make(int M);

  int label_min() const { return -M / 2; }
  int label_max() const { return M / 2 - 1; }
  int index_of(int label) const { return label + M / 2; }
  int label_of(int index) const { return index - M / 2; }
  double x(int label) const { return label * h; }
  /// Half-width of the grid, sqrt(pi M / 2) = max |x_j|.
  double extent() const;
};

RVec grid_points(const GridSpec& spec);

/// Table of Hermite functions psi_n(x_j), rows n = 0..n_max, columns = storage index.
struct HermiteTable {
  GridSpec spec;
  int n_max = 0;
  RMat values;

  double operator()(int n, int label) const { return values(n, spec.index_of(label)); }
  void write_csv(std::ostream& os) const;
};

/// Normalized three-term recurrence; entries below the double range flush to 0.
HermiteTable hermite_table(int n_max, const GridSpec& spec);

/// psi_0..psi_{n_max} at a single point.
RVec hermite_functions(int n_max, double x);

/// Centered unitary DFT F_{jk} = exp(i 2 pi j k / M) / sqrt(M) with centered labels,
/// backed by FFTW. Instances are immutable and safe to share between threads.
class CenteredDft {
 public:
  explicit CenteredDft(int M);
  ~CenteredDft();
  CenteredDft(const CenteredDft&) = delete;
  CenteredDft& operator=(const CenteredDft&) = delete;

  int size() const { return M_; }
  CVec forward(const CVec& v) const;
  CVec inverse(const CVec& v) const;
  CVec apply(const CVec& v, bool inverse_transform) const;

  /// Shared instance per dimension.
  static std::shared_ptr<const CenteredDft> get(int M);

 private:
  struct Plans;
  int M_;
  std::unique_ptr<Plans> plans_;
};

CVec centered_dft(const CVec& state, const GridSpec& spec, bool inverse);

/// Dense O(M^2) reference matrix of the centered DFT.
CMat dense_centered_dft(int M);

/// amp_j <- exp(-i phase_j) amp_j.
CVec apply_diagonal_phase(const CVec& state, const RVec& phases);

}  // namespace qht
