// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
//
// Finds, for each (N, eps), the smallest power-of-two M at which the simulated transform
// meets its targets (block fidelity, isometry band, residual index mass), and writes a
// calibration file whose c0 lands every pair on that M.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "qht/qht_pipeline.hpp"

#ifndef QHT_CALIBRATION_FILE
#define QHT_CALIBRATION_FILE "calibration/qht_calibration.cfg"
#endif

namespace {

struct Trial {
  double fidelity = 0.0;
  double smin = 0.0, smax = 0.0;
  double residual = 1.0;
  bool pass = false;
};

Trial evaluate(int N, double eps, int M, const qht::Calibration& cal) {
  qht::QHTConfig cfg;
  cfg.N = N;
  cfg.eps = eps;
  cfg.M = M;
  cfg.N_high = static_cast<int>(std::ceil(cal.c1 * N / eps));
  cfg.delta_lower = cal.delta_lower;
  cfg.aa_rounds = qht::make_fixed_point_schedule(cal.delta_lower, eps).L;
  cfg.calibration = cal;
  const auto blocks = qht::qht_blocks(cfg);
  Trial t;
  t.fidelity = 1.0;
  t.residual = 0.0;
  for (const auto& r : blocks.reports) {
    t.fidelity = std::min(t.fidelity, r.block_fidelity);
    t.residual = std::max(t.residual, r.index_residual);
  }
  std::tie(t.smin, t.smax) = blocks.isometry_range();
  t.pass = t.fidelity >= 1 - eps && t.smin >= 1 - eps && t.smax <= 1 + eps && t.residual <= eps;
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qht dimension calibration"};
  std::vector<int> Ns = {2, 4, 8};
  std::vector<double> epss = {0.1, 0.05};
  std::string base = QHT_CALIBRATION_FILE;
  std::string out;
  int max_M = 4096;
  app.add_option("--N", Ns, "transform dimensions")->delimiter(',');
  app.add_option("--eps", epss, "target errors")->delimiter(',');
  app.add_option("--calibration", base, "starting calibration (c1, m_min, delta_lower)");
  app.add_option("--max-M", max_M, "largest M tried");
  app.add_option("--out", out, "write the new calibration here (default stdout)");
  CLI11_PARSE(app, argc, argv);

  qht::Calibration cal;
  try {
    cal = qht::load_calibration(base);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  double c0 = 0.0;
  bool all_found = true;
  std::cerr << "N,eps,M,N_high,min_fidelity,sv_min,sv_max,max_residual,pass\n";
  for (int N : Ns) {
    for (double eps : epss) {
      int found = 0;
      int first = 0;
      for (int M = std::max(cal.m_min, 16); M <= max_M; M *= 2) {
        if (std::ceil(cal.c1 * N / eps) >= M) continue;
        if (!first) first = M;
        Trial t;
        try {
          t = evaluate(N, eps, M, cal);
        } catch (const std::exception& e) {
          std::cerr << N << ',' << eps << ',' << M << ",error: " << e.what() << '\n';
          continue;
        }
        std::cerr << N << ',' << eps << ',' << M << ',' << std::ceil(cal.c1 * N / eps) << ','
                  << t.fidelity << ',' << t.smin << ',' << t.smax << ',' << t.residual << ','
                  << t.pass << '\n';
        if (t.pass) {
          found = M;
          break;
        }
      }
      if (!found) {
        all_found = false;
        continue;
      }
      // Met at the floor: m_min already covers this pair and it says nothing about c0.
      if (found == first) continue;
      c0 = std::max(c0, found * std::pow(eps, 3.25) / std::pow(N, 2.25));
    }
  }
  if (c0 > 0.0) cal.c0 = c0;
  if (out.empty()) {
    qht::write_calibration(std::cout, cal);
  } else {
    std::ofstream f(out);
    qht::write_calibration(f, cal);
  }
  return all_found ? 0 : 2;
}
