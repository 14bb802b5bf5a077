// Copyright 2026 the sscuc authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: case generation, solving (deterministic / two-point
// estimate / Monte-Carlo with scenario reduction), benchmarking, and post-hoc
// schedule evaluation. All file outputs are byte-reproducible from
// (case, seed, config); wall-clock timing is only written on request.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sscuc/cases.hpp"
#include "sscuc/driver.hpp"
#include "sscuc/eval.hpp"
#include "sscuc/model.hpp"
#include "sscuc/stochastic.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

// A case argument is either a path to a JSON case file or the name of a
// bundled fixture (six_bus, tiny2, triangle3).
sscuc::SystemCase resolve_case(const std::string& arg) {
  if (std::filesystem::exists(arg)) return sscuc::load_case(arg);
  return sscuc::cases::builtin(arg);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out)
    throw sscuc::ValidationError("cannot open '" + path.string() +
                                 "' for writing");
  out << text;
}

struct SolveArgs {
  std::string case_arg = "six_bus";
  std::string mode = "det";
  std::string out_dir = ".";
  std::string dump_master_lp;
  sscuc::SolveOptions opt;
  bool emit_timing = false;
};

int run_solve(const SolveArgs& a) {
  auto sys = resolve_case(a.case_arg);
  sscuc::SolveReport rep;
  if (a.mode == "det")
    rep = sscuc::solve_deterministic(sys, a.opt);
  else if (a.mode == "tpe")
    rep = sscuc::solve_stochastic_tpe(sys, a.opt);
  else
    rep = sscuc::solve_stochastic_mcs(sys, a.opt);

  std::filesystem::create_directories(a.out_dir);
  std::filesystem::path dir(a.out_dir);
  write_text(dir / "report.json",
             sscuc::report_to_json(rep, a.emit_timing).dump(2) + "\n");
  std::ostringstream csv;
  sscuc::write_schedule_csv(rep.schedule, csv);
  write_text(dir / "schedule.csv", csv.str());
  if (!a.dump_master_lp.empty()) {
    std::ofstream lpf(a.dump_master_lp);
    sscuc::opt::write_lp_file(sscuc::build_master(sys, rep.cuts).lp, lpf);
  }

  std::cout << sscuc::mode_name(rep.mode) << ": converged in " << rep.iterations
            << " iteration(s), master cost " << rep.master_cost
            << ", expected cost " << rep.expected_cost << ", "
            << rep.network_cuts << " network + " << rep.scenario_cuts
            << " scenario cuts";
  if (a.emit_timing) std::cout << ", " << rep.wall_seconds << " s";
  std::cout << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string case_arg;
  std::string schedule_path;
  std::string base_path;
  std::string out_dir = ".";
  int samples = 10000;
  std::uint64_t seed = 1;
  double epsilon = 1e-3;
  bool aggregate_only = false;
};

int run_evaluate(const EvaluateArgs& a) {
  auto sys = resolve_case(a.case_arg);
  auto net = sscuc::compute_shift_factors(sys);

  std::ifstream in(a.schedule_path);
  if (!in)
    throw sscuc::ValidationError("cannot open schedule '" + a.schedule_path + "'");
  json sj;
  in >> sj;
  // Accept either a bare schedule or a full solve report.
  sscuc::Schedule sched =
      sscuc::schedule_from_json(sj.contains("schedule") ? sj.at("schedule") : sj);

  auto set = sscuc::stochastic::sample(sys, a.samples, a.seed);
  sscuc::eval::CaiOptions copt;
  copt.epsilon = a.epsilon;
  copt.aggregate_only = a.aggregate_only;
  auto rep = sscuc::eval::cai(sys, net, sched, set, copt);

  json out = sscuc::eval::evaluation_to_json(rep);
  if (!a.base_path.empty()) {
    std::ifstream bin(a.base_path);
    if (!bin)
      throw sscuc::ValidationError("cannot open base schedule '" + a.base_path + "'");
    json bj;
    bin >> bj;
    sscuc::Schedule base =
        sscuc::schedule_from_json(bj.contains("schedule") ? bj.at("schedule") : bj);
    out["esc"] = sscuc::eval::esc(sys, sched, base);
  }

  std::filesystem::create_directories(a.out_dir);
  std::filesystem::path dir(a.out_dir);
  write_text(dir / "evaluation.json", out.dump(2) + "\n");
  std::ostringstream csv;
  sscuc::eval::write_violation_csv(rep, csv);
  write_text(dir / "violations.csv", csv.str());

  std::cout << "cai " << rep.cai;
  if (out.contains("esc")) std::cout << ", esc " << out["esc"].get<double>();
  std::cout << " (" << rep.samples << " samples, seed " << rep.seed << ")\n";
  return kExitOk;
}

struct BenchmarkArgs {
  std::string case_arg = "six_bus";
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int samples = 10000;
  std::vector<int> reduced = {100, 200};
  bool emit_timing = false;
};

int run_benchmark(const BenchmarkArgs& a) {
  auto sys = resolve_case(a.case_arg);
  if (a.reduced.empty())
    throw sscuc::ValidationError("benchmark: need at least one --reduced size");

  struct Row {
    std::string label;
    sscuc::SolveReport rep;
  };
  std::vector<Row> rows;

  sscuc::SolveOptions base;
  base.seed = a.seed;
  base.mcs_samples = a.samples;
  rows.push_back({"det", sscuc::solve_deterministic(sys, base)});
  rows.push_back({"tpe", sscuc::solve_stochastic_tpe(sys, base)});
  for (int s : a.reduced) {
    sscuc::SolveOptions o = base;
    o.mcs_reduced = s;
    rows.push_back({"mcs(S=" + std::to_string(s) + ")",
                    sscuc::solve_stochastic_mcs(sys, o)});
  }
  // Relative errors are measured against the largest-S Monte-Carlo run.
  double benchmark_cost = rows.back().rep.expected_cost;

  json jrows = json::array();
  std::ostringstream csv;
  csv.precision(10);
  csv << "method,points,master_cost,expected_cost,relative_error_pct,iterations"
      << (a.emit_timing ? ",wall_seconds" : "") << "\n";
  std::cout << "method        points  expected_cost  rel_err_%  iters"
            << (a.emit_timing ? "  wall_s" : "") << "\n";
  for (const auto& r : rows) {
    double rel = 100.0 * (r.rep.expected_cost - benchmark_cost) /
                 std::fabs(benchmark_cost);
    json jr = {{"method", r.label},
               {"points", r.rep.n_points},
               {"master_cost", r.rep.master_cost},
               {"expected_cost", r.rep.expected_cost},
               {"relative_error_pct", rel},
               {"iterations", r.rep.iterations}};
    if (a.emit_timing) jr["wall_seconds"] = r.rep.wall_seconds;
    jrows.push_back(jr);
    csv << r.label << ',' << r.rep.n_points << ',' << r.rep.master_cost << ','
        << r.rep.expected_cost << ',' << rel << ',' << r.rep.iterations;
    if (a.emit_timing) csv << ',' << r.rep.wall_seconds;
    csv << "\n";
    std::printf("%-13s %6d  %13.2f  %9.4f  %5d", r.label.c_str(),
                r.rep.n_points, r.rep.expected_cost, rel, r.rep.iterations);
    if (a.emit_timing) std::printf("  %6.2f", r.rep.wall_seconds);
    std::printf("\n");
  }

  std::filesystem::create_directories(a.out_dir);
  std::filesystem::path dir(a.out_dir);
  json out = {{"case", a.case_arg},
              {"seed", a.seed},
              {"raw_samples", a.samples},
              {"benchmark_method", rows.back().label},
              {"rows", jrows}};
  write_text(dir / "benchmark.json", out.dump(2) + "\n");
  write_text(dir / "benchmark.csv", csv.str());
  return kExitOk;
}

struct GenCaseArgs {
  std::string name = "all";
  std::string out_dir = ".";
};

int run_gen_case(const GenCaseArgs& a) {
  std::vector<std::string> names;
  if (a.name == "all")
    names = {"six_bus", "tiny2", "triangle3"};
  else
    names = {a.name};
  std::filesystem::create_directories(a.out_dir);
  for (const auto& n : names) {
    auto sys = sscuc::cases::builtin(n);  // validates the name
    auto path = std::filesystem::path(a.out_dir) / (n + ".case.json");
    sscuc::save_case(sys, path.string());
    std::cout << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic security-constrained unit commitment solver"};
  app.require_subcommand(1);
  bool error_json = false;
  app.add_flag("--error-json", error_json,
               "On failure, print a machine-readable error object to stdout");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a case and write report + schedule");
  solve->add_option("--case", sa.case_arg,
                    "Case file path or builtin name (six_bus, tiny2, triangle3)");
  solve->add_option("--mode", sa.mode, "Solution mode")
      ->check(CLI::IsMember({"det", "tpe", "mcs"}))
      ->capture_default_str();
  solve->add_option("--seed", sa.opt.seed, "Sampling seed")->capture_default_str();
  solve->add_option("--samples", sa.opt.mcs_samples, "Raw Monte-Carlo samples")
      ->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--reduced", sa.opt.mcs_reduced, "Scenarios kept after reduction")
      ->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--epsilon", sa.opt.epsilon, "Feasibility tolerance (MW)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--max-iterations", sa.opt.max_iterations, "Iteration budget")
      ->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--out", sa.out_dir, "Output directory")->capture_default_str();
  solve->add_option("--dump-master-lp", sa.dump_master_lp,
                    "Write the final master problem in LP text format");
  solve->add_flag("--emit-timing", sa.emit_timing,
                  "Include wall-clock time in report.json (breaks reproducibility)");

  EvaluateArgs ea;
  auto* evaluate =
      app.add_subcommand("evaluate", "Monte-Carlo CAI/ESC evaluation of a schedule");
  evaluate->add_option("--case", ea.case_arg, "Case file path or builtin name")
      ->required();
  evaluate->add_option("--schedule", ea.schedule_path,
                       "Schedule JSON (bare schedule or solve report)")
      ->required();
  evaluate->add_option("--base", ea.base_path,
                       "Baseline schedule JSON for the ESC ratio");
  evaluate->add_option("--samples", ea.samples, "Evaluation sample count")
      ->check(CLI::PositiveNumber)->capture_default_str();
  evaluate->add_option("--seed", ea.seed, "Sampling seed")->capture_default_str();
  evaluate->add_option("--epsilon", ea.epsilon, "Corrective LP tolerance (MW)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  evaluate->add_flag("--aggregate-only", ea.aggregate_only,
                     "Skip the network-feasibility LP; aggregate band test only");
  evaluate->add_option("--out", ea.out_dir, "Output directory")->capture_default_str();

  BenchmarkArgs ba;
  auto* benchmark =
      app.add_subcommand("benchmark", "Compare det/tpe/mcs on one case");
  benchmark->add_option("--case", ba.case_arg, "Case file path or builtin name");
  benchmark->add_option("--seed", ba.seed, "Sampling seed")->capture_default_str();
  benchmark->add_option("--samples", ba.samples, "Raw Monte-Carlo samples")
      ->check(CLI::PositiveNumber)->capture_default_str();
  benchmark->add_option("--reduced", ba.reduced,
                        "Reduction sizes to benchmark (last = error baseline)")
      ->check(CLI::PositiveNumber);
  benchmark->add_flag("--emit-timing", ba.emit_timing,
                      "Include wall-clock columns (breaks reproducibility)");
  benchmark->add_option("--out", ba.out_dir, "Output directory")->capture_default_str();

  GenCaseArgs ga;
  auto* gen = app.add_subcommand("gen-case", "Write bundled case fixtures as JSON");
  gen->add_option("--name", ga.name, "six_bus, tiny2, triangle3, or all")
      ->check(CLI::IsMember({"six_bus", "tiny2", "triangle3", "all"}))
      ->capture_default_str();
  gen->add_option("--out", ga.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the error and usage hint
    return kExitValidation;
  }

  auto fail = [&](int code, const char* kind, const std::string& what) {
    if (error_json)
      std::cout << json{{"error", what}, {"kind", kind}, {"exit_code", code}}.dump()
                << "\n";
    std::cerr << "error: " << what << "\n";
    return code;
  };

  try {
    if (*solve) return run_solve(sa);
    if (*evaluate) return run_evaluate(ea);
    if (*benchmark) return run_benchmark(ba);
    return run_gen_case(ga);
  } catch (const sscuc::SolveError& e) {
    return fail(kExitSolver, "solver", e.what());
  } catch (const sscuc::ValidationError& e) {
    return fail(kExitValidation, "validation", e.what());
  } catch (const std::exception& e) {
    return fail(kExitValidation, "validation", e.what());
  }
}
