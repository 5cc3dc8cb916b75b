// monoproj command line: exact monotone projection of gridded estimates,
// confidence band correction, and the two built-in simulation studies.
//
// Exit codes: 0 success, 2 input error, 3 violated finite-sample guarantee,
// 4 solver or estimation failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "monoproj/grid_io.hpp"
#include "monoproj/interpolate.hpp"
#include "monoproj/iso_project.hpp"
#include "monoproj/sim_lab.hpp"
#include "monoproj/svg.hpp"

namespace {

using namespace monoproj;
using nlohmann::ordered_json;

struct ProjectArgs {
  std::string in;
  std::string out;
  std::string diag;
  std::string eval_points;
  std::string eval_out = "eval.csv";
  std::string scheme = "multilinear";
  SolverConfig solver;
};

struct BandArgs {
  std::string in;
  std::string out;
  std::string diag;
  std::string truth;
  double level = 0.95;
  SolverConfig solver;
};

struct SimulateArgs {
  std::string example;
  SimConfig cfg;
  std::string out_dir = ".";
  bool svg = false;
  bool full = false;
  int dump_rep = -1;
  std::string grid_mode = "fixed";
};

InterpScheme parse_scheme(const std::string& s) {
  if (s == "nearest") return InterpScheme::NearestNeighbor;
  if (s == "multilinear") return InterpScheme::Multilinear;
  throw InputError("unknown scheme '" + s + "' (expected nearest or multilinear)");
}

ordered_json grid_index_json(const GridIndex& idx) {
  ordered_json a = ordered_json::array();
  for (const auto i : idx) a.push_back(i);
  return a;
}

int run_project(const ProjectArgs& args) {
  const GridFunction input = read_grid_csv(args.in);
  const ProjectionResult result = project_monotone(input, args.solver);
  const ViolationDiagnostic diag = violation_diagnostic(input);

  write_grid_csv(args.out, result.projected);

  ordered_json j;
  j["input"] = args.in;
  j["points"] = input.size();
  j["violation_radius"] = diag.radius;
  if (diag.worst_pair) {
    j["worst_pair"]["s"] = grid_index_json(diag.worst_pair->first);
    j["worst_pair"]["t"] = grid_index_json(diag.worst_pair->second);
  } else {
    j["worst_pair"] = nullptr;
  }
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["max_kkt_residual"] = result.max_kkt_residual;
  j["max_abs_displacement"] =
      (result.projected.values() - input.values()).cwiseAbs().maxCoeff();
  j["oscillation_bound_holds"] = oscillation_bound_check(input, result, args.solver.tol_monotone);
  if (!args.diag.empty()) atomic_write_file(args.diag, j.dump(2) + "\n");

  if (!args.eval_points.empty()) {
    const Interpolator itp(parse_scheme(args.scheme), result.projected,
                           args.solver.tol_monotone);
    const auto points = read_points_csv(args.eval_points);
    std::vector<double> values;
    values.reserve(points.size());
    for (const auto& p : points) values.push_back(itp.eval(p));
    write_point_values_csv(args.eval_out, points, values);
  }

  if (!result.converged) {
    std::cerr << "monoproj: projection did not converge within "
              << args.solver.max_sweeps << " sweeps (diagnostics written)\n";
    return 4;
  }
  return 0;
}

int run_band_correct(const BandArgs& args) {
  const Band initial = read_band_csv(args.in, args.level);
  const CorrectedBand corrected = correct_band(initial, args.solver);
  write_band_csv(args.out, corrected.band);

  ordered_json j;
  j["input"] = args.in;
  j["level"] = args.level;
  j["converged"] = corrected.converged();
  j["iterations"]["lower"] = corrected.lower_projection.iterations;
  j["iterations"]["upper"] = corrected.upper_projection.iterations;
  j["sum_width"]["initial"] = initial.sum_width();
  j["sum_width"]["corrected"] = corrected.band.sum_width();
  j["sup_width"]["initial"] = initial.sup_width();
  j["sup_width"]["corrected"] = corrected.band.sup_width();
  if (!args.truth.empty()) {
    const GridFunction truth = read_grid_csv(args.truth);
    const BandComparison cmp = compare_bands(initial, corrected.band, truth);
    j["covered"]["initial"] = cmp.covered_initial;
    j["covered"]["corrected"] = cmp.covered_corrected;
  }
  if (!args.diag.empty()) atomic_write_file(args.diag, j.dump(2) + "\n");

  if (!corrected.converged()) {
    std::cerr << "monoproj: band projection did not converge\n";
    return 4;
  }
  return 0;
}

void write_sim_artifacts(const SimReport& report, const std::string& dir,
                         const std::string& stem, bool svg) {
  atomic_write_file(dir + "/" + stem + "report.csv", report_csv(report));
  atomic_write_file(dir + "/" + stem + "summary.json", summary_json_text(report));
  if (!svg) return;
  std::vector<double> scaled, err, width;
  for (const SimRow& row : report.rows) {
    if (row.failed) continue;
    scaled.push_back(row.scaled_discrepancy);
    err.push_back(row.error_ratio);
    width.push_back(row.width_ratio);
  }
  const std::string label = "n=" + std::to_string(report.config.n);
  write_ecdf_svg(dir + "/" + stem + "ecdf_scaled_discrepancy.svg",
                 "scaled max |projected - initial|", "r_n * discrepancy",
                 {{label, scaled}});
  write_ecdf_svg(dir + "/" + stem + "ecdf_error_ratio.svg",
                 "max error of initial / max error of projected", "ratio",
                 {{label, err}});
  write_ecdf_svg(dir + "/" + stem + "ecdf_width_ratio.svg",
                 "sup width of initial band / corrected band", "ratio",
                 {{label, width}});
}

int run_simulate(SimulateArgs& args) {
  args.cfg.example = sim_example_from_string(args.example);
  if (args.grid_mode == "fixed") {
    args.cfg.grid_mode = GridMode::Fixed;
  } else if (args.grid_mode == "observed") {
    args.cfg.grid_mode = GridMode::Observed;
  } else {
    throw InputError("unknown grid mode '" + args.grid_mode + "'");
  }
  std::filesystem::create_directories(args.out_dir);

  if (args.dump_rep >= 0) dump_replication(args.cfg, args.dump_rep, args.out_dir);

  if (!args.full) {
    SimReport report;
    try {
      report = run_simulation(args.cfg);
    } catch (const InvariantViolation& e) {
      std::cerr << "monoproj: invariant violation: " << e.what() << "\n";
      if (e.replication() >= 0) {
        std::cerr << "monoproj: dumping replication " << e.replication()
                  << " for replay\n";
        try {
          dump_replication(args.cfg, static_cast<int>(e.replication()), args.out_dir);
        } catch (const std::exception& dump_err) {
          std::cerr << "monoproj: dump failed: " << dump_err.what() << "\n";
        }
      }
      return 3;
    }
    write_sim_artifacts(report, args.out_dir, "", args.svg);
    std::cout << summary_json_text(report);
    return 0;
  }

  // Full mode: the whole sample-size sweep at 1000 replications per cell.
  const int sweep[] = {100, 250, 500, 750, 1000};
  std::vector<SimReport> reports;
  for (const int n : sweep) {
    SimConfig cfg = args.cfg;
    cfg.n = n;
    cfg.reps = 1000;
    std::cerr << "monoproj: running " << to_string(cfg.example) << " n=" << n
              << " reps=1000\n";
    try {
      reports.push_back(run_simulation(cfg));
    } catch (const InvariantViolation& e) {
      std::cerr << "monoproj: invariant violation at n=" << n << ": " << e.what()
                << "\n";
      return 3;
    }
    write_sim_artifacts(reports.back(), args.out_dir,
                        "n" + std::to_string(n) + "_", false);
  }

  ordered_json table;
  table["example"] = to_string(args.cfg.example);
  table["level"] = args.cfg.level;
  table["reps"] = 1000;
  for (const SimReport& r : reports) {
    table["coverage_table"]["n"].push_back(r.config.n);
    table["coverage_table"]["initial"].push_back(100.0 * r.summary.coverage_initial);
    table["coverage_table"]["monotone"].push_back(100.0 * r.summary.coverage_corrected);
    table["median_scaled_discrepancy"].push_back(r.summary.scaled_discrepancy_q[1]);
  }
  atomic_write_file(args.out_dir + "/summary.json", table.dump(2) + "\n");

  if (args.svg) {
    std::vector<EcdfSeries> scaled, err, width;
    for (const SimReport& r : reports) {
      EcdfSeries s{"n=" + std::to_string(r.config.n), {}};
      EcdfSeries e = s, w = s;
      for (const SimRow& row : r.rows) {
        if (row.failed) continue;
        s.second.push_back(row.scaled_discrepancy);
        e.second.push_back(row.error_ratio);
        w.second.push_back(row.width_ratio);
      }
      scaled.push_back(std::move(s));
      err.push_back(std::move(e));
      width.push_back(std::move(w));
    }
    write_ecdf_svg(args.out_dir + "/ecdf_scaled_discrepancy.svg",
                   "scaled max |projected - initial|", "r_n * discrepancy", scaled);
    write_ecdf_svg(args.out_dir + "/ecdf_error_ratio.svg",
                   "max error of initial / max error of projected", "ratio", err);
    write_ecdf_svg(args.out_dir + "/ecdf_width_ratio.svg",
                   "sup width of initial band / corrected band", "ratio", width);
  }
  return 0;
}

void add_solver_flags(CLI::App* cmd, SolverConfig& solver) {
  cmd->add_option("--tol-dykstra", solver.tol_dykstra,
                  "sup-norm change per sweep required to stop");
  cmd->add_option("--max-sweeps", solver.max_sweeps, "sweep budget");
  cmd->add_option("--tol-monotone", solver.tol_monotone,
                  "allowed residual monotonicity violation");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact monotone projection of gridded estimates and bands"};
  app.require_subcommand(1);

  ProjectArgs project;
  CLI::App* cmd_project =
      app.add_subcommand("project", "project a grid CSV onto the monotone cone");
  cmd_project->add_option("--in", project.in, "input grid CSV")->required();
  cmd_project->add_option("--out", project.out, "projected grid CSV")->required();
  cmd_project->add_option("--diag", project.diag, "diagnostics JSON path");
  cmd_project->add_option("--eval", project.eval_points,
                          "points CSV to evaluate via interpolation");
  cmd_project->add_option("--eval-out", project.eval_out, "interpolated values CSV");
  cmd_project->add_option("--scheme", project.scheme,
                          "interpolation scheme: nearest or multilinear");
  add_solver_flags(cmd_project, project.solver);

  BandArgs band;
  CLI::App* cmd_band =
      app.add_subcommand("band-correct", "project both endpoints of a band CSV");
  cmd_band->add_option("--in", band.in, "input band CSV")->required();
  cmd_band->add_option("--out", band.out, "corrected band CSV")->required();
  cmd_band->add_option("--diag", band.diag, "comparison JSON path");
  cmd_band->add_option("--truth", band.truth, "optional truth grid CSV for coverage");
  cmd_band->add_option("--level", band.level, "nominal band level");
  add_solver_flags(cmd_band, band.solver);

  SimulateArgs sim;
  CLI::App* cmd_sim = app.add_subcommand(
      "simulate", "run a built-in simulation study and write its report");
  cmd_sim->add_option("example", sim.example, "gcomp1d, gcomp2d or conddist")
      ->required();
  cmd_sim->add_option("--n", sim.cfg.n, "sample size per replication");
  cmd_sim->add_option("--reps", sim.cfg.reps, "replication count");
  cmd_sim->add_option("--seed", sim.cfg.seed, "64-bit seed");
  cmd_sim->add_option("--level", sim.cfg.level, "band level");
  cmd_sim->add_option("--draws", sim.cfg.band_draws,
                      "multiplier draws for influence-function bands");
  cmd_sim->add_option("--band-reps", sim.cfg.band_reps,
                      "bootstrap replicates for the conditional CDF bands");
  cmd_sim->add_option("--out", sim.out_dir, "output directory");
  cmd_sim->add_option("--grid-mode", sim.grid_mode,
                      "fixed (equally spaced) or observed thresholds");
  cmd_sim->add_option("--threads", sim.cfg.threads,
                      "worker threads (0 = MONOPROJ_THREADS or hardware)");
  cmd_sim->add_flag("--svg", sim.svg, "emit ECDF SVG plots");
  cmd_sim->add_flag("--full", sim.full,
                    "run the whole n-sweep at 1000 replications per cell");
  cmd_sim->add_option("--dump-rep", sim.dump_rep,
                      "write one replication's dataset/estimate/bands and continue");
  add_solver_flags(cmd_sim, sim.cfg.solver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_project) return run_project(project);
    if (*cmd_band) return run_band_correct(band);
    if (*cmd_sim) return run_simulate(sim);
  } catch (const InputError& e) {
    std::cerr << "monoproj: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "monoproj: invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const ComputeError& e) {
    std::cerr << "monoproj: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "monoproj: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
