// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <optional>

#include "CLI11.hpp"
#include "qht/discrete_qho.hpp"
#include "qht/fast_forward.hpp"
#include "qht/hermite_sampling.hpp"
#include "qht/learning_testers.hpp"
#include "qht/qht_pipeline.hpp"

#ifndef QHT_CALIBRATION_FILE
#define QHT_CALIBRATION_FILE "calibration/qht_calibration.cfg"
#endif

namespace qht::cli {

namespace {

std::string join_index(const MultiIndex& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "." : "") + std::to_string(v[i]);
  return s;
}

Json base_config(const ExperimentConfig& c) {
  Json j;
  j["command"] = c.command;
  j["format"] = c.format == Format::kJson ? "json" : "csv";
  return j;
}

std::vector<int> or_default(const std::vector<int>& v, std::vector<int> d) {
  return v.empty() ? d : v;
}

Calibration calibration_for(const ExperimentConfig& c) {
  return load_calibration(c.calibration.empty() ? QHT_CALIBRATION_FILE : c.calibration);
}

}  // namespace

long infeasible_rows(const Table& t) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), "status");
  if (it == t.columns.end()) return 0;
  const auto col = static_cast<std::size_t>(it - t.columns.begin());
  return std::count_if(t.rows.begin(), t.rows.end(),
                       [&](const auto& r) { return r[col] != "ok"; });
}

Table cmd_ff_error(const ExperimentConfig& c) {
  const auto Ms = or_default(c.M, {128, 256, 512});
  const auto Ns = or_default(c.N, {4, 8, 16});
  const auto ts = c.t.empty() ? std::vector<double>{0.25, 1.0, 3.0} : c.t;
  Table out;
  out.config = base_config(c);
  out.config["M"] = Ms;
  out.config["N"] = Ns;
  out.config["t"] = ts;
  out.columns = {"M", "N", "t", "reps", "projected_error", "status"};
  double worst = 0.0;
  for (int M : Ms) {
    std::optional<DiscreteQHO> qho;
    std::optional<EigenDecomposition> eig;
    std::string why;
    try {
      if (M > 2048) throw BudgetExceeded("dense eigenvectors limited to M <= 2048");
      qho.emplace(DiscreteQHO::build(M));
      eig.emplace(dense_diagonalize(*qho));
    } catch (const std::exception& e) {
      why = e.what();
    }
    for (int N : Ns) {
      for (double t : ts) {
        const int reps = decompose(t).reps;
        if (!eig) {
          out.add_row({fmt(M), fmt(N), fmt(t), fmt(reps), "", "infeasible: " + why});
          continue;
        }
        if (N < 1 || N > M / 8) {
          out.add_row({fmt(M), fmt(N), fmt(t), fmt(reps), "", "infeasible: needs 1 <= N <= M/8"});
          continue;
        }
        const double e = low_energy_error(*qho, *eig, N, t);
        worst = std::max(worst, e);
        out.add_row({fmt(M), fmt(N), fmt(t), fmt(reps), fmt(e), "ok"});
      }
    }
  }
  out.summary["rows"] = out.rows.size();
  out.summary["max_error"] = worst;
  out.summary["infeasible"] = infeasible_rows(out);
  return out;
}

Table cmd_overlap(const ExperimentConfig& c) {
  const int M = c.M.empty() ? 100000 : c.M.front();
  if (c.n_max < 0) throw InvalidArgument("n_max must be >= 0");
  Table out;
  out.config = base_config(c);
  out.config["M"] = M;
  out.config["n_max"] = c.n_max;
  out.columns = {"n", "overlap"};
  double lo = 1e300, hi = -1e300;
  for (const auto& p : overlap_curve(0, c.n_max, M)) {
    out.add_row({fmt(p.n), fmt(p.overlap)});
    if (p.n >= 1) {
      lo = std::min(lo, p.overlap);
      hi = std::max(hi, p.overlap);
    }
  }
  if (c.n_max >= 1) {
    out.summary["min_overlap_n_ge_1"] = lo;
    out.summary["max_overlap_n_ge_1"] = hi;
  }
  out.summary["overlap_n0"] = pr_overlap(0, M);
  return out;
}

Table cmd_qht(const ExperimentConfig& c) {
  const int N = c.N.empty() ? 8 : c.N.front();
  const auto cal = calibration_for(c);
  QHTConfig cfg = choose_dimensions(N, c.eps, cal);
  Table out;
  out.config = base_config(c);
  out.config["N"] = N;
  out.config["eps"] = c.eps;
  out.config["calibration"] = {{"c0", cal.c0}, {"c1", cal.c1}, {"m_min", cal.m_min},
                               {"hard_cap", cal.hard_cap}, {"delta_lower", cal.delta_lower}};
  const auto blocks = qht_blocks(cfg);
  out.columns = {"n", "pr_overlap", "retention", "fidelity", "index_residual", "status"};
  double fmin = 1.0;
  for (const auto& r : blocks.reports) {
    fmin = std::min(fmin, r.block_fidelity);
    out.add_row({fmt(r.n), fmt(r.pr_overlap), fmt(r.retention), fmt(r.block_fidelity),
                 fmt(r.index_residual), "ok"});
  }
  const auto [smin, smax] = blocks.isometry_range();
  out.summary["M"] = cfg.M;
  out.summary["N_high"] = cfg.N_high;
  out.summary["L"] = blocks.schedule.L;
  out.summary["min_fidelity"] = fmin;
  out.summary["singular_value_min"] = smin;
  out.summary["singular_value_max"] = smax;
  out.summary["op_passes"] = blocks.op_passes;
  return out;
}

Table cmd_sample(const ExperimentConfig& c) {
  const std::string line = c.function.empty() ? "constant n=1" : c.function;
  const auto spec = parse_planted(line);
  const auto f = make_planted(spec);
  SamplerConfig sc;
  if (!c.M.empty()) sc.M = c.M.front();
  sc.D = c.D >= 0 ? c.D : spec.D;
  Table out;
  out.config = base_config(c);
  out.config["function"] = describe(spec);
  out.config["M"] = sc.M > 0 ? sc.M : sampler_dimension(sc.D);
  out.config["D"] = sc.D;
  out.config["samples"] = c.samples;
  out.config["seed"] = c.seed;
  const HermiteSampler s(f, sc);
  Rng rng = Rng(c.seed).split(0);
  Histogram h(f.n, s.D());
  long attempts = 0, capped = 0;
  for (long i = 0; i < c.samples; ++i) {
    const auto x = f.boolean ? s.draw(rng) : s.sample_postselected(rng);
    attempts += x.attempts;
    capped += x.failed;
    if (!x.failed) h.add(x);
  }
  out.columns = {"index", "count", "frequency", "probability"};
  const auto& probs = s.probabilities();
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    if (h.counts[i] == 0) continue;
    // Row-major flat index, last coordinate fastest.
    MultiIndex v(f.n);
    std::size_t r = i;
    for (int k = f.n - 1; k >= 0; --k) {
      v[k] = static_cast<int>(r % (s.D() + 1));
      r /= s.D() + 1;
    }
    out.add_row({join_index(v), fmt(h.counts[i]),
                 fmt(static_cast<double>(h.counts[i]) / std::max(1L, h.total)), fmt(probs[i])});
  }
  if (h.overflow > 0)
    out.add_row({"overflow", fmt(h.overflow),
                 fmt(static_cast<double>(h.overflow) / std::max(1L, h.total)),
                 fmt(s.overflow_probability())});
  double tv = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const long cnt = i + 1 < probs.size() ? h.counts[i] : h.overflow;
    tv += std::abs(static_cast<double>(cnt) / std::max(1L, h.total) - probs[i]);
  }
  out.summary["kappa"] = s.kappa();
  out.summary["mean_attempts"] = static_cast<double>(attempts) / std::max(1L, c.samples);
  out.summary["capped"] = capped;
  out.summary["tv_to_sampler"] = tv / 2;
  return out;
}

Table cmd_ggl(const ExperimentConfig& c) {
  GGLMode mode;
  if (c.mode == "quantum") mode = GGLMode::kQuantum;
  else if (c.mode == "classical") mode = GGLMode::kClassical;
  else throw InvalidArgument("mode must be quantum or classical");
  std::vector<GGLInstance> corpus;
  if (c.function.empty()) {
    corpus = ggl_corpus();
  } else {
    GGLInstance inst;
    inst.spec = parse_planted(c.function);
    inst.tau = c.tau > 0 ? c.tau : 0.5;
    corpus.push_back(inst);
  }
  if (c.tau > 0)
    for (auto& inst : corpus) inst.tau = c.tau;
  Table out;
  out.config = base_config(c);
  out.config["mode"] = c.mode;
  out.config["trials"] = c.trials;
  out.config["delta"] = c.delta;
  out.config["seed"] = c.seed;
  Json inst_json = Json::array();
  for (const auto& inst : corpus)
    inst_json.push_back({{"function", describe(inst.spec)}, {"tau", inst.tau},
                         {"degree_cap", inst.degree_cap}});
  out.config["instances"] = inst_json;
  out.columns = {"instance", "trial", "list_size", "complete", "sound", "size_ok",
                 "failed", "nodes", "queries", "status"};
  long ok = 0, runs = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    const auto f = make_planted(inst.spec);
    std::optional<SpectrumTable> truth;
    for (int trial = 0; trial < c.trials; ++trial) {
      GGLConfig cfg;
      cfg.tau = inst.tau;
      cfg.delta = c.delta;
      cfg.mode = mode;
      cfg.degree_cap = inst.degree_cap;
      Rng rng = Rng(c.seed).split(i * 1000003ULL + trial);
      const auto r = gaussian_goldreich_levin(f, cfg, rng);
      if (!truth) truth = spectrum_table(f, r.degree_cap, 2048);
      const auto chk = check_ggl(r, *truth, inst.tau);
      const bool success = chk.complete && chk.sound && chk.size_ok && !r.failed;
      ok += success;
      ++runs;
      out.add_row({describe(inst.spec), fmt(trial), fmt(static_cast<long>(r.list.size())),
                   fmt(int(chk.complete)), fmt(int(chk.sound)), fmt(int(chk.size_ok)),
                   fmt(int(r.failed)), fmt(r.nodes), fmt(r.queries), "ok"});
    }
  }
  out.summary["runs"] = runs;
  out.summary["success_rate"] = runs ? static_cast<double>(ok) / runs : 0.0;
  return out;
}

Table cmd_test(const ExperimentConfig& c) {
  TesterConfig tc;
  tc.delta = c.delta;
  Table out;
  out.config = base_config(c);
  out.config["trials"] = c.trials;
  out.config["delta"] = c.delta;
  out.config["seed"] = c.seed;
  out.config["eps1"] = tc.eps1;
  out.config["eps2"] = tc.eps2;
  out.columns = {"instance", "mode", "k", "trial", "queries", "verdict", "correct"};
  const auto corpus = tester_corpus();
  long correct = 0, runs = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    for (int trial = 0; trial < c.trials; ++trial) {
      Rng rng = Rng(c.seed).split(i * 1000003ULL + trial);
      const auto v = run_tester(inst, tc, rng);
      const bool good = v.accept == inst.expect_accept;
      correct += good;
      ++runs;
      out.add_row({describe(inst.spec), tester_name(inst.kind), fmt(inst.k), fmt(trial),
                   fmt(v.queries), v.accept ? "accept" : "reject", fmt(int(good))});
    }
  }
  out.summary["runs"] = runs;
  out.summary["accuracy"] = runs ? static_cast<double>(correct) / runs : 0.0;
  return out;
}

Table cmd_tails(const ExperimentConfig& c) {
  const auto Ms = or_default(c.M, {64, 128, 256});
  const int N = c.N.empty() ? 1 : c.N.front();
  const int t_max = c.t.empty() ? 30 : static_cast<int>(c.t.front());
  TailFamily fam;
  if (c.family == "x2_p2") fam = TailFamily::kXXP;
  else if (c.family == "p2_x2") fam = TailFamily::kPPX;
  else if (c.family == "p2_xp_anti") fam = TailFamily::kPAnti;
  else throw InvalidArgument("family must be x2_p2, p2_x2 or p2_xp_anti");
  Table out;
  out.config = base_config(c);
  out.config["M"] = Ms;
  out.config["N"] = N;
  out.config["t_max"] = t_max;
  out.config["family"] = c.family;
  out.columns = {"M", "N", "family", "tail_norm", "status"};
  for (int M : Ms) {
    try {
      const auto tail = commutator_tail(DiscreteQHO::build(M), N, t_max, fam);
      out.add_row({fmt(M), fmt(N), c.family, fmt(tail.tail_norm), "ok"});
    } catch (const BudgetExceeded& e) {
      out.add_row({fmt(M), fmt(N), c.family, "", std::string("infeasible: ") + e.what()});
    }
  }
  out.summary["infeasible"] = infeasible_rows(out);
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qht experiment runner"};
  app.require_subcommand(1);
  ExperimentConfig c;
  std::string format = "csv";

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", c.seed, "64-bit seed");
    s->add_option("--out", c.out, "output file (default stdout)");
    s->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* ff = app.add_subcommand("ff-error", "projected fast-forwarding error sweep");
  ff->add_option("--M", c.M, "grid sizes")->delimiter(',');
  ff->add_option("--N", c.N, "projector ranks")->delimiter(',');
  ff->add_option("--t", c.t, "evolution times")->delimiter(',');
  auto* ov = app.add_subcommand("overlap", "Plancherel-Rotach overlap curve");
  ov->add_option("--M", c.M, "grid size")->expected(1);
  ov->add_option("--n-max,--n", c.n_max, "largest index");
  auto* qh = app.add_subcommand("qht", "per-block fidelity of the transform");
  qh->add_option("--N", c.N, "transform dimension")->expected(1);
  qh->add_option("--eps", c.eps, "target error");
  qh->add_option("--calibration", c.calibration, "calibration file");
  auto* sa = app.add_subcommand("sample", "Hermite sampling histogram");
  sa->add_option("--function", c.function, "planted function line");
  sa->add_option("--samples", c.samples, "number of samples");
  sa->add_option("--M", c.M, "per-axis grid")->expected(1);
  sa->add_option("--D", c.D, "per-coordinate cutoff");
  auto* gg = app.add_subcommand("ggl", "Goldreich-Levin runs over planted instances");
  gg->add_option("--mode", c.mode, "quantum or classical");
  gg->add_option("--trials", c.trials, "trials per instance");
  gg->add_option("--tau", c.tau, "threshold (overrides corpus)");
  gg->add_option("--delta", c.delta, "failure probability");
  gg->add_option("--function", c.function, "single planted function instead of the corpus");
  auto* te = app.add_subcommand("test", "tolerant tester verdicts");
  te->add_option("--trials", c.trials, "trials per instance");
  te->add_option("--delta", c.delta, "failure probability");
  auto* ta = app.add_subcommand("tails", "commutator tail norms");
  ta->add_option("--M", c.M, "grid sizes")->delimiter(',');
  ta->add_option("--N", c.N, "projector rank")->expected(1);
  ta->add_option("--t", c.t, "largest nesting depth")->expected(1);
  ta->add_option("--family", c.family, "x2_p2, p2_x2 or p2_xp_anti");
  for (auto* s : {ff, ov, qh, sa, gg, te, ta}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  c.format = format == "json" ? Format::kJson : Format::kCsv;
  c.command = app.get_subcommands().front()->get_name();

  Table table;
  try {
    if (c.command == "ff-error") table = cmd_ff_error(c);
    else if (c.command == "overlap") table = cmd_overlap(c);
    else if (c.command == "qht") table = cmd_qht(c);
    else if (c.command == "sample") table = cmd_sample(c);
    else if (c.command == "ggl") table = cmd_ggl(c);
    else if (c.command == "test") table = cmd_test(c);
    else table = cmd_tails(c);
  } catch (const std::exception& e) {
    err << "qht " << c.command << ": " << e.what() << '\n';
    return kExitUsage;
  }

  if (c.out.empty()) {
    write_table(out, table, c.format);
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      err << "cannot write " << c.out << '\n';
      return kExitUsage;
    }
    write_table(f, table, c.format);
  }
  return infeasible_rows(table) > 0 ? kExitInfeasible : kExitOk;
}

}  // namespace qht::cli
