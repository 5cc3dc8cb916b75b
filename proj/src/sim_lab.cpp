#include "monoproj/sim_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "monoproj/bands.hpp"
#include "monoproj/grid_io.hpp"
#include "monoproj/parallel.hpp"
#include "monoproj/stats.hpp"

namespace monoproj {

namespace {

// Evaluation window for the G-computation thresholds.
constexpr double kGcompLo = 0.1;
constexpr double kGcompHi = 0.9;

// Exposure window: from half a bandwidth above the support edge (where the
// one-sided kernel windows still hold enough data for stable fits and
// bootstrap refits) up to the 95% quantile of the Beta(2,3) exposure law,
// whose right tail is too thin for windowed fits.
constexpr double kCondT2Q05 = 0.09761146288641434;
constexpr double kCondT2Hi = 0.7513953742698181;
// 2% standard normal quantile.
constexpr double kZTail = -2.053748910631823;

// Deterministic stand-in for the per-replication bandwidth rule, using the
// exact Beta(2,3) exposure sd of 0.2; grids must not depend on the data.
double nominal_bandwidth(int n) {
  const double h = 0.8 * std::pow(static_cast<double>(n), -0.2);
  return std::min(std::max(h, 2.0 / std::sqrt(static_cast<double>(n))), 0.5);
}

double cond_t2_lo(int n) { return std::min(kCondT2Q05, 0.65 * nominal_bandwidth(n)); }

constexpr Eigen::Index kMaxAxisPoints = 120;

std::uint64_t example_tag(SimExample e) {
  switch (e) {
    case SimExample::GComp1D: return 1;
    case SimExample::GComp2D: return 2;
    case SimExample::CondDist: return 3;
  }
  return 0;
}

Eigen::Index mesh_points(double lo, double hi, double spacing) {
  // Equally spaced axis with step at most the requested spacing.
  const double len = hi - lo;
  Eigen::Index m = 1 + static_cast<Eigen::Index>(std::ceil(len / spacing));
  return std::min(std::max<Eigen::Index>(m, 2), kMaxAxisPoints);
}

struct RepContext {
  const SimConfig& cfg;
  const Lattice* fixed_grid = nullptr;      // null in observed-value mode
  const GridFunction* fixed_truth = nullptr;
};

void assert_invariants(const SimRow& row, double err_initial, double err_corrected,
                       double sum_w_initial, double sum_w_corrected,
                       double sup_w_initial, double sup_w_corrected, int rep) {
  if (err_corrected > err_initial + 1e-9)
    throw InvariantViolation("grid error of projected estimate exceeds initial estimate", rep);
  if (row.covered_initial && !row.covered_corrected)
    throw InvariantViolation("corrected band lost coverage held by initial band", rep);
  if (std::abs(sum_w_initial - sum_w_corrected) >
      1e-9 * std::max(1.0, std::abs(sum_w_initial)))
    throw InvariantViolation("band correction changed the total width", rep);
  if (sup_w_corrected > sup_w_initial * (1.0 + 1e-9) + 1e-12)
    throw InvariantViolation("band correction increased the sup width", rep);
  if (!row.oscillation_bound_ok)
    throw InvariantViolation("projection displacement exceeded the oscillation bound", rep);
}

// Everything a replication produces before metrics: the (unclipped)
// estimate, its initial band, the matching truth, and the raw ingredients
// kept for replay dumps.
struct Pipeline {
  GridFunction estimate;
  Band band;
  GridFunction truth;
  Eigen::Index out_of_unit = 0;
  std::vector<ObsBinary> bin_data;
  std::vector<ObsCont> cont_data;
  Eigen::MatrixXd influence;  // empty for the conditional CDF example
};

// Shared tail of every replication: project, correct, compare, check.
SimRow finish_replication(int rep, double r_n, const GridFunction& estimate,
                          const Band& band, const GridFunction& truth,
                          const SolverConfig& solver, Eigen::Index out_of_unit) {
  SimRow row;
  row.rep = rep;
  row.out_of_unit = out_of_unit;

  const ProjectionResult proj = project_monotone(estimate, solver);
  if (!proj.converged)
    throw ComputeError("projection did not converge");
  const CorrectedBand corrected = correct_band(band, solver);
  if (!corrected.converged())
    throw ComputeError("band projection did not converge");

  row.scaled_discrepancy =
      r_n * (proj.projected.values() - estimate.values()).cwiseAbs().maxCoeff();
  const double err_initial = (estimate.values() - truth.values()).cwiseAbs().maxCoeff();
  const double err_corrected =
      (proj.projected.values() - truth.values()).cwiseAbs().maxCoeff();
  row.error_ratio = err_corrected > 0.0
                        ? err_initial / err_corrected
                        : (err_initial > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);

  const BandComparison cmp = compare_bands(band, corrected.band, truth);
  row.width_ratio = cmp.sup_width_initial / cmp.sup_width_corrected;
  row.covered_initial = cmp.covered_initial;
  row.covered_corrected = cmp.covered_corrected;

  row.violations_axis = axis_violations(estimate);
  const ViolationDiagnostic diag = violation_diagnostic(estimate);
  row.violation_radius = diag.radius;
  row.oscillation_bound_ok = oscillation_bound_check(estimate, proj, solver.tol_monotone);

  assert_invariants(row, err_initial, err_corrected, cmp.sum_width_initial,
                    cmp.sum_width_corrected, cmp.sup_width_initial,
                    cmp.sup_width_corrected, rep);
  return row;
}

Pipeline build_gcomp_pipeline(const RepContext& ctx, Rng rep_rng) {
  const SimConfig& cfg = ctx.cfg;
  std::vector<ObsBinary> data = gen_gcomp(cfg.n, rep_rng.substream(0));
  const NuisanceFits fits = fit_nuisance(data);

  Lattice grid = ctx.fixed_grid ? *ctx.fixed_grid : [&] {
    // Observed-value mode: thresholds are the outcome values seen in the
    // window, distinct and sorted.
    std::set<double> vals;
    for (const auto& o : data)
      if (o.y >= kGcompLo && o.y <= kGcompHi) vals.insert(o.y);
    if (vals.size() < 2)
      throw ComputeError("observed-value grid has fewer than 2 thresholds");
    Eigen::VectorXd axis(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double v : vals) axis[i++] = v;
    return Lattice({axis});
  }();

  if (cfg.example == SimExample::GComp1D) {
    EstimateWithInfluence est = aipw_curve(data, fits, 1, grid);
    GridFunction truth = ctx.fixed_truth ? *ctx.fixed_truth : gcomp_truth(grid, 1);
    Band band = multiplier_band(est, cfg.level, cfg.band_draws, rep_rng.substream(1));
    return Pipeline{std::move(est.estimate), std::move(band), std::move(truth),
                    0,          std::move(data),  {},
                    std::move(est.influence)};
  }

  const EstimateWithInfluence est0 = aipw_curve(data, fits, 0, grid);
  const EstimateWithInfluence est1 = aipw_curve(data, fits, 1, grid);
  EstimateWithInfluence stacked = bivariate_stack(est0, est1);
  GridFunction truth = ctx.fixed_truth
                           ? *ctx.fixed_truth
                           : gcomp_truth_stacked(stacked.estimate.lattice());
  Band band = multiplier_band(stacked, cfg.level, cfg.band_draws, rep_rng.substream(1));
  return Pipeline{std::move(stacked.estimate), std::move(band), std::move(truth),
                  0,          std::move(data),  {},
                  std::move(stacked.influence)};
}

Pipeline build_conddist_pipeline(const RepContext& ctx, Rng rep_rng,
                                 double* bandwidth_out) {
  const SimConfig& cfg = ctx.cfg;
  std::vector<ObsCont> data = gen_conddist(cfg.n, rep_rng.substream(0));
  const double h = select_bandwidth(data);
  *bandwidth_out = h;
  const KernelSpec kernel{KernelKind::Epanechnikov, h};

  // Guarantee checks run on unclipped values; clipping is an output-side step.
  const LoclinOptions opts{/*clip_to_unit=*/false, 1e-12};
  LoclinGrid fit = loclin_grid(data, kernel, *ctx.fixed_grid, opts);
  BootstrapBandResult boot =
      bootstrap_band(data, kernel, *ctx.fixed_grid, cfg.level, cfg.band_reps,
                     rep_rng.substream(1), opts);
  return Pipeline{std::move(fit.values), std::move(boot.band), *ctx.fixed_truth,
                  fit.out_of_unit,       {},                   std::move(data),
                  Eigen::MatrixXd()};
}

SimRow run_gcomp_replication(const RepContext& ctx, int rep, Rng rep_rng,
                             double* bandwidth_out) {
  *bandwidth_out = 0.0;
  const Pipeline p = build_gcomp_pipeline(ctx, rep_rng);
  return finish_replication(rep, std::sqrt(static_cast<double>(ctx.cfg.n)),
                            p.estimate, p.band, p.truth, ctx.cfg.solver, 0);
}

SimRow run_conddist_replication(const RepContext& ctx, int rep, Rng rep_rng,
                                double* bandwidth_out) {
  const Pipeline p = build_conddist_pipeline(ctx, rep_rng, bandwidth_out);
  const double h = *bandwidth_out;
  return finish_replication(rep, std::sqrt(static_cast<double>(ctx.cfg.n) * h),
                            p.estimate, p.band, p.truth, ctx.cfg.solver,
                            p.out_of_unit);
}

std::array<double, 3> quartiles(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0, 0.0};
  return {quantile(v, 0.25), quantile(v, 0.50), quantile(v, 0.75)};
}

struct FixedContext {
  std::optional<Lattice> grid;
  std::optional<GridFunction> truth;
};

FixedContext make_fixed_context(const SimConfig& cfg) {
  FixedContext out;
  if (cfg.example == SimExample::CondDist) {
    out.grid = conddist_grid(cfg.n);
    out.truth = conddist_truth(*out.grid);
  } else if (cfg.grid_mode == GridMode::Fixed) {
    out.grid = gcomp_grid(cfg.n);
    if (cfg.example == SimExample::GComp1D) {
      out.truth = gcomp_truth(*out.grid, 1);
    } else {
      Eigen::VectorXd a_axis(2);
      a_axis << 0.0, 1.0;
      Lattice stacked({a_axis, out.grid->axis(0)});
      out.truth = gcomp_truth_stacked(stacked);
    }
  }
  return out;
}

}  // namespace

std::string to_string(SimExample e) {
  switch (e) {
    case SimExample::GComp1D: return "gcomp1d";
    case SimExample::GComp2D: return "gcomp2d";
    case SimExample::CondDist: return "conddist";
  }
  return "?";
}

SimExample sim_example_from_string(const std::string& s) {
  if (s == "gcomp1d") return SimExample::GComp1D;
  if (s == "gcomp2d") return SimExample::GComp2D;
  if (s == "conddist") return SimExample::CondDist;
  throw InputError("unknown example '" + s + "' (expected gcomp1d, gcomp2d or conddist)");
}

void SimConfig::validate() const {
  if (n < 50) throw InputError("SimConfig: n must be >= 50");
  if (reps < 1) throw InputError("SimConfig: reps must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw InputError("SimConfig: level must lie in (0,1)");
  if (band_draws < 100) throw InputError("SimConfig: band_draws must be >= 100");
  if (band_reps < 100) throw InputError("SimConfig: band_reps must be >= 100");
  if (grid_mode == GridMode::Observed && example == SimExample::CondDist)
    throw InputError("SimConfig: observed-value grids apply to the G-computation examples only");
  solver.validate();
}

std::vector<ObsBinary> gen_gcomp(int n, Rng rng) {
  if (n < 1) throw InputError("gen_gcomp: n must be >= 1");
  std::vector<ObsBinary> data(static_cast<std::size_t>(n));
  const double sd = std::sqrt(0.3);
  for (auto& o : data) {
    o.w1 = rng.bernoulli(0.5) ? 1 : 0;
    o.w2 = rng.uniform(-1.0, 1.0);
    o.a = rng.bernoulli(expit(0.5 + o.w1 - 2.0 * o.w2)) ? 1 : 0;
    o.y = expit(rng.normal(0.2 - 0.3 * o.a - 4.0 * o.w2, sd));
  }
  return data;
}

std::vector<ObsCont> gen_conddist(int n, Rng rng) {
  if (n < 1) throw InputError("gen_conddist: n must be >= 1");
  std::vector<ObsCont> data(static_cast<std::size_t>(n));
  for (auto& o : data) {
    o.a = rng.beta23();
    o.y = expit(rng.normal(0.5 * (1.0 + (o.a - 1.2) * (o.a - 1.2)), 1.0));
  }
  return data;
}

Lattice gcomp_grid(int n) {
  const Eigen::Index m = static_cast<Eigen::Index>(
      std::ceil(std::sqrt(static_cast<double>(n))));
  return Lattice({Lattice::linspace(kGcompLo, kGcompHi, std::max<Eigen::Index>(m, 2))});
}

Lattice conddist_grid(int n) {
  // Threshold window chosen so the true conditional CDF stays inside
  // [0.02, 0.98] across the whole exposure window. Much beyond it the
  // windowed indicator counts are all-zero or all-one, the bootstrap
  // variance collapses to its floor, and sup-coverage is unattainable for
  // any band.
  const double t2_lo = cond_t2_lo(n);
  const double mu_max = 0.5 * (1.0 + (t2_lo - 1.2) * (t2_lo - 1.2));
  const double mu_min = 0.5 * (1.0 + (kCondT2Hi - 1.2) * (kCondT2Hi - 1.2));
  const double t1_lo = expit(kZTail + mu_max);
  const double t1_hi = expit(-kZTail + mu_min);
  const double target = std::pow(static_cast<double>(n), -0.8);
  return Lattice({Lattice::linspace(t1_lo, t1_hi, mesh_points(t1_lo, t1_hi, target)),
                  Lattice::linspace(t2_lo, kCondT2Hi,
                                    mesh_points(t2_lo, kCondT2Hi, target))});
}

SimReport run_simulation(const SimConfig& cfg) {
  cfg.validate();

  RepContext ctx{cfg, nullptr, nullptr};
  const FixedContext fixed = make_fixed_context(cfg);
  if (fixed.grid) ctx.fixed_grid = &*fixed.grid;
  if (fixed.truth) ctx.fixed_truth = &*fixed.truth;

  const Rng base = Rng(cfg.seed).substream(example_tag(cfg.example));
  std::vector<SimRow> rows(static_cast<std::size_t>(cfg.reps));
  std::vector<double> bandwidths(static_cast<std::size_t>(cfg.reps), 0.0);

  const auto errors = parallel_for(
      cfg.reps, effective_threads(cfg.threads), [&](int rep) {
        Rng rep_rng = base.substream(static_cast<std::uint64_t>(rep));
        double h = 0.0;
        SimRow row =
            cfg.example == SimExample::CondDist
                ? run_conddist_replication(ctx, rep, rep_rng, &h)
                : run_gcomp_replication(ctx, rep, rep_rng, &h);
        bandwidths[static_cast<std::size_t>(rep)] = h;
        rows[static_cast<std::size_t>(rep)] = std::move(row);
      });

  // Handle outcomes in replication order: invariant violations abort,
  // estimator failures are recorded and skipped.
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const auto& err = errors[static_cast<std::size_t>(rep)];
    if (!err) continue;
    try {
      std::rethrow_exception(err);
    } catch (const InvariantViolation&) {
      throw;
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      SimRow& row = rows[static_cast<std::size_t>(rep)];
      row.rep = rep;
      row.failed = true;
      row.note = e.what();
      std::replace(row.note.begin(), row.note.end(), ',', ';');
    }
  }

  SimReport report{cfg, std::move(rows), SimSummary{}};
  SimSummary& s = report.summary;
  s.reps = cfg.reps;
  s.grid_mesh = 0.0;
  if (ctx.fixed_grid) {
    std::vector<std::pair<double, double>> box;
    for (int j = 0; j < ctx.fixed_grid->dims(); ++j)
      box.emplace_back(ctx.fixed_grid->axis(j)[0],
                       ctx.fixed_grid->axis(j)[ctx.fixed_grid->axis_size(j) - 1]);
    s.grid_mesh = mesh(*ctx.fixed_grid, box);
  }

  std::vector<double> scaled, err_ratio, width_ratio, ok_bandwidths;
  int covered_i = 0, covered_c = 0, ok = 0;
  const int d = cfg.example == SimExample::GComp1D ? 1 : 2;
  std::vector<int> axis_hits(static_cast<std::size_t>(d), 0);
  int all_hits = 0;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const SimRow& row = report.rows[static_cast<std::size_t>(rep)];
    if (row.failed) {
      ++s.failed;
      continue;
    }
    ++ok;
    scaled.push_back(row.scaled_discrepancy);
    err_ratio.push_back(row.error_ratio);
    width_ratio.push_back(row.width_ratio);
    covered_i += row.covered_initial;
    covered_c += row.covered_corrected;
    bool all = true;
    for (int j = 0; j < d; ++j) {
      const bool hit = row.violations_axis[static_cast<std::size_t>(j)];
      axis_hits[static_cast<std::size_t>(j)] += hit;
      all = all && hit;
    }
    all_hits += all;
    if (cfg.example == SimExample::CondDist)
      ok_bandwidths.push_back(bandwidths[static_cast<std::size_t>(rep)]);
  }
  if (ok == 0) throw ComputeError("run_simulation: every replication failed");
  if (20 * s.failed > cfg.reps)
    throw ComputeError("run_simulation: " + std::to_string(s.failed) + " of " +
                       std::to_string(cfg.reps) + " replications failed");

  s.coverage_initial = static_cast<double>(covered_i) / ok;
  s.coverage_corrected = static_cast<double>(covered_c) / ok;
  s.scaled_discrepancy_q = quartiles(scaled);
  s.error_ratio_q = quartiles(err_ratio);
  s.width_ratio_q = quartiles(width_ratio);
  for (int j = 0; j < d; ++j)
    s.violation_fraction_axis.push_back(
        static_cast<double>(axis_hits[static_cast<std::size_t>(j)]) / ok);
  s.violation_fraction_all_axes = static_cast<double>(all_hits) / ok;
  if (!ok_bandwidths.empty()) s.median_bandwidth = quantile(ok_bandwidths, 0.5);
  return report;
}

std::string report_csv(const SimReport& report) {
  const int d = report.config.example == SimExample::GComp1D ? 1 : 2;
  std::string out = "rep,status,scaled_discrepancy,error_ratio,width_ratio,"
                    "covered_initial,covered_corrected";
  for (int j = 0; j < d; ++j) out += ",violation_axis" + std::to_string(j + 1);
  out += ",violation_radius,oscillation_bound_ok,out_of_unit,note\n";
  for (const SimRow& row : report.rows) {
    out += std::to_string(row.rep);
    if (row.failed) {
      out += ",failed";
      // empty metric fields, then the note in the last column
      for (int c = 0; c < 8 + d; ++c) out += ",";
      out += "," + row.note + "\n";
      continue;
    }
    out += ",ok," + format_double(row.scaled_discrepancy) + "," +
           format_double(row.error_ratio) + "," + format_double(row.width_ratio) +
           "," + std::to_string(row.covered_initial ? 1 : 0) + "," +
           std::to_string(row.covered_corrected ? 1 : 0);
    for (int j = 0; j < d; ++j)
      out += "," + std::to_string(row.violations_axis[static_cast<std::size_t>(j)] ? 1 : 0);
    out += "," + format_double(row.violation_radius) + "," +
           std::to_string(row.oscillation_bound_ok ? 1 : 0) + "," +
           std::to_string(row.out_of_unit) + ",\n";
  }
  return out;
}

std::string summary_json_text(const SimReport& report) {
  nlohmann::ordered_json j;
  const SimConfig& cfg = report.config;
  j["example"] = to_string(cfg.example);
  j["n"] = cfg.n;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.seed;
  j["level"] = cfg.level;
  j["grid_mode"] = cfg.grid_mode == GridMode::Fixed ? "fixed" : "observed";
  j["grid_mesh"] = report.summary.grid_mesh;
  j["failed_replications"] = report.summary.failed;
  j["coverage_percent"]["initial"] = 100.0 * report.summary.coverage_initial;
  j["coverage_percent"]["monotone"] = 100.0 * report.summary.coverage_corrected;
  auto quart = [](const std::array<double, 3>& q) {
    return nlohmann::ordered_json{{"q25", q[0]}, {"q50", q[1]}, {"q75", q[2]}};
  };
  j["scaled_discrepancy"] = quart(report.summary.scaled_discrepancy_q);
  j["error_ratio"] = quart(report.summary.error_ratio_q);
  j["width_ratio"] = quart(report.summary.width_ratio_q);
  j["violation_fraction_axis"] = report.summary.violation_fraction_axis;
  j["violation_fraction_all_axes"] = report.summary.violation_fraction_all_axes;
  if (cfg.example == SimExample::CondDist)
    j["median_bandwidth"] = report.summary.median_bandwidth;
  return j.dump(2) + "\n";
}

void dump_replication(const SimConfig& cfg, int rep, const std::string& dir) {
  cfg.validate();
  if (rep < 0 || rep >= cfg.reps)
    throw InputError("dump_replication: replication index out of range");

  RepContext ctx{cfg, nullptr, nullptr};
  const FixedContext fixed = make_fixed_context(cfg);
  if (fixed.grid) ctx.fixed_grid = &*fixed.grid;
  if (fixed.truth) ctx.fixed_truth = &*fixed.truth;

  const Rng base = Rng(cfg.seed).substream(example_tag(cfg.example));
  Rng rep_rng = base.substream(static_cast<std::uint64_t>(rep));
  double h = 0.0;
  const Pipeline p = cfg.example == SimExample::CondDist
                         ? build_conddist_pipeline(ctx, rep_rng, &h)
                         : build_gcomp_pipeline(ctx, rep_rng);

  const std::string prefix = dir + "/rep" + std::to_string(rep) + "_";
  if (cfg.example == SimExample::CondDist) {
    write_conddist_csv(prefix + "data.csv", p.cont_data);
  } else {
    write_gcomp_csv(prefix + "data.csv", p.bin_data);
    write_influence_csv(prefix + "influence.csv", p.influence);
  }
  write_grid_csv(prefix + "estimate.csv", p.estimate);
  write_grid_csv(prefix + "truth.csv", p.truth);
  write_band_csv(prefix + "band_initial.csv", p.band);
  write_band_csv(prefix + "band_corrected.csv", correct_band(p.band, cfg.solver).band);
}

}  // namespace monoproj
