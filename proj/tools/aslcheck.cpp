// Command-line front end: check, gen, bench, solve.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "aslcheck/bench.hpp"
#include "aslcheck/checker.hpp"
#include "aslcheck/gen.hpp"
#include "aslcheck/lp.hpp"
#include "aslcheck/solvers/affine.hpp"
#include "aslcheck/solvers/primal_dual.hpp"
#include "aslcheck/solvers/simplex.hpp"

namespace {

using namespace aslcheck;

constexpr int kExitError = 2;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

Bias bias_from_string(const std::string& s) {
  if (s == "none") return Bias::None;
  if (s == "uniform") return Bias::Uniform;
  if (s == "constant") return Bias::Constant;
  throw Error(ErrorKind::InvalidArgument, "unknown bias '" + s + "'");
}

void dump_formulation(const GambleSet& d, Formulation f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  const std::size_t w0 = select_omega0(d);
  switch (f) {
    case Formulation::P3: {
      const auto lp = build_p3(d, w0);
      const auto start = start_point_p3(lp);
      dump_lp(out, lp, &start);
      break;
    }
    case Formulation::D3: dump_lp(out, build_d3(d, w0)); break;
    case Formulation::D4Prime: {
      const auto [lp, start] = build_d4_phase1(d, w0);
      dump_lp(out, lp, &start);
      break;
    }
  }
}

int run_check(const std::string& file, const std::string& method, const std::string& formulation, const std::string& dump) {
  const GambleSet d = gamble_set_from_json(read_json(file));
  const auto choice = MethodChoice::make(method_from_string(method), formulation_from_string(formulation));
  choice.validate();
  if (!dump.empty()) dump_formulation(d, choice.formulation, dump);
  const AslVerdict v = avoids_sure_loss(d, choice);
  std::cout << to_json(v, d, choice).dump(2) << '\n';
  return v.avoids ? 0 : 1;
}

int run_gen(const GenSpec& spec, const std::string& truth_name, std::uint64_t seed, const std::string& out_path) {
  const GroundTruth truth = ground_truth_from_string(truth_name);
  const GambleSet d = generate_instance(RngStream(seed, 0), spec, truth);
  nlohmann::json j = to_json(d);
  j["header"] = {{"seed", seed},
                 {"spec",
                  {{"outcomes", spec.n_outcomes},
                   {"gambles", spec.n_gambles},
                   {"k_previsions", spec.k_previsions},
                   {"delta", spec.delta},
                   {"bias", to_string(spec.bias)}}},
                 {"ground_truth", to_string(truth)}};
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + out_path);
    out << j.dump(2) << '\n';
  }
  return 0;
}

int run_bench(const std::string& preset, const std::string& out_dir, std::uint64_t seed, int reps, bool plots) {
  BenchPlan plan = preset_plan(preset, seed);
  if (reps > 0) plan.reps = reps;
  try {
    const auto summary = run_grid(plan, out_dir, &std::cerr);
    std::cerr << summary.records.size() << " records written to " << summary.records_csv.string() << '\n';
    if (plots) {
      const auto files = emit_plots(summary.records_csv, std::filesystem::path(out_dir) / "plots");
      std::cerr << files.size() << " plots written to " << (std::filesystem::path(out_dir) / "plots").string() << '\n';
    }
  } catch (const BenchAbort& e) {
    std::cerr << "bench aborted: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}

int run_solve(const std::string& file, const std::string& method) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Parse, "cannot read " + file);
  const LpListing listing = parse_lp(in);
  const StandardLp& lp = listing.lp;
  SolverOptions opts;
  opts.early_negative = lp.meta.fully_degenerate;
  SolveOutcome out;
  const Method m = method_from_string(method);
  if (m == Method::Simplex) {
    out = revised_simplex(lp, lp.meta.initial_basis, opts);
  } else {
    if (!listing.start) throw Error(ErrorKind::NonInteriorStart, "interior methods need a START block in the listing");
    StartPoint start;
    start.x = *listing.start;
    if (m == Method::AffineScaling) {
      out = affine_scaling(lp, start, opts);
    } else {
      start.y = Vector::Zero(static_cast<Eigen::Index>(lp.rows()));
      start.t = Vector::Ones(static_cast<Eigen::Index>(lp.cols()));
      out = primal_dual(lp, start, opts);
    }
  }
  nlohmann::json j{{"status", to_string(out.status)},
                   {"iterations", out.iterations},
                   {"primal_residual_inf", out.primal_residual_inf},
                   {"dual_residual_inf", out.dual_residual_inf},
                   {"duality_gap", out.duality_gap},
                   {"wall_time_ns", out.wall_time_ns},
                   {"x", std::vector<double>(out.x.data(), out.x.data() + out.x.size())}};
  j["objective"] = out.objective ? nlohmann::json(*out.objective) : nlohmann::json(nullptr);
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decide whether a finite set of gambles avoids sure loss"};
  app.require_subcommand(1);

  std::string check_file, method = "primal-dual", formulation = "P3", dump_path;
  auto* check = app.add_subcommand("check", "Check a gamble set (JSON) and print the verdict with its certificate");
  check->add_option("file", check_file, "Gamble set JSON: {\"outcomes\": [...], \"gambles\": [[...], ...]}")->required();
  check->add_option("--method", method, "simplex | affine | primal-dual")->capture_default_str();
  check->add_option("--formulation", formulation, "P3 | D3 | D4prime")->capture_default_str();
  check->add_option("--dump-lp", dump_path, "Also write the program handed to the solver as a listing");

  GenSpec spec;
  std::string truth = "asl", bias = "none", gen_out;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "Generate a random gamble set with known verdict");
  gen->add_option("--outcomes", spec.n_outcomes, "Number of outcomes")->required();
  gen->add_option("--gambles", spec.n_gambles, "Number of gambles")->required();
  gen->add_option("--truth", truth, "asl | not_asl")->capture_default_str();
  gen->add_option("--seed", gen_seed, "64-bit seed")->capture_default_str();
  gen->add_option("--k", spec.k_previsions, "Previsions in the polyhedral lower prevision")->capture_default_str();
  gen->add_option("--delta", spec.delta, "Margin of the violating gamble")->capture_default_str();
  gen->add_option("--bias", bias, "none | uniform | constant")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  std::string preset = "desk", bench_out = "bench_out";
  std::uint64_t bench_seed = 1;
  int reps = 0;
  bool no_plots = false;
  auto* bench = app.add_subcommand("bench", "Run the timing grid and write CSV, summary and SVG plots");
  bench->add_option("--preset", preset, "desk | full")->capture_default_str();
  bench->add_option("--out", bench_out, "Output directory")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Plan seed")->capture_default_str();
  bench->add_option("--reps", reps, "Override the preset's repetitions");
  bench->add_flag("--no-plots", no_plots, "Skip SVG output");

  std::string lp_file, solve_method = "simplex";
  auto* solve = app.add_subcommand("solve", "Solve an LP listing directly (debugging)");
  solve->add_option("file", lp_file, "LP listing as written by check --dump-lp")->required();
  solve->add_option("--method", solve_method, "simplex | affine | primal-dual")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*check) return run_check(check_file, method, formulation, dump_path);
    if (*gen) {
      spec.bias = bias_from_string(bias);
      return run_gen(spec, truth, gen_seed, gen_out);
    }
    if (*bench) return run_bench(preset, bench_out, bench_seed, reps, !no_plots);
    if (*solve) return run_solve(lp_file, solve_method);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
