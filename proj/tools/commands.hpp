// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "experiment_io.hpp"

namespace qht::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

/// Parameters shared by all subcommands. Only the ones a command reads are serialized
/// into its header.
struct ExperimentConfig {
  std::string command;
  std::vector<int> M;
  std::vector<int> N;
  std::vector<double> t;
  int D = -1;
  int n_max = 100;
  double eps = 0.01;
  double tau = -1.0;  // -1: per-instance corpus value
  double delta = 0.1;
  std::uint64_t seed = 1;
  long samples = 1000;
  int trials = 10;
  std::string function;
  std::string mode = "quantum";
  std::string family = "x2_p2";
  std::string calibration;
  std::string out;
  Format format = Format::kCsv;
};

Table cmd_ff_error(const ExperimentConfig& c);
Table cmd_overlap(const ExperimentConfig& c);
Table cmd_qht(const ExperimentConfig& c);
Table cmd_sample(const ExperimentConfig& c);
Table cmd_ggl(const ExperimentConfig& c);
Table cmd_test(const ExperimentConfig& c);
Table cmd_tails(const ExperimentConfig& c);

/// Rows whose status column is not "ok".
long infeasible_rows(const Table& t);

/// Parses argv, runs one subcommand and writes to --out or `out`. Returns an exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qht::cli
