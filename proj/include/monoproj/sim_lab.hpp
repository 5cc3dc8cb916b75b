#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "monoproj/estimators_gcomp.hpp"
#include "monoproj/estimators_loclin.hpp"
#include "monoproj/iso_project.hpp"
#include "monoproj/rng.hpp"

namespace monoproj {

enum class SimExample { GComp1D, GComp2D, CondDist };

std::string to_string(SimExample e);
SimExample sim_example_from_string(const std::string& s);

enum class GridMode { Fixed, Observed };

struct SimConfig {
  SimExample example = SimExample::GComp1D;
  int n = 1000;
  int reps = 300;
  std::uint64_t seed = 1;
  double level = 0.95;
  int band_draws = 1000;  // multiplier draws (G-computation examples)
  int band_reps = 200;    // bootstrap replicates (conditional CDF example)
  GridMode grid_mode = GridMode::Fixed;
  SolverConfig solver;
  int threads = 0;  // 0 = MONOPROJ_THREADS env or hardware

  void validate() const;
};

// Per-replication metrics. scaled_discrepancy is r_n * max|theta* - theta|
// with r_n = sqrt(n) for the G-computation examples and sqrt(n h) for the
// conditional CDF example. error_ratio >= 1 and the coverage implication are
// per-sample guarantees; a single violation aborts the run.
struct SimRow {
  int rep = 0;
  bool failed = false;
  std::string note;
  double scaled_discrepancy = 0.0;
  double error_ratio = 0.0;
  double width_ratio = 0.0;
  bool covered_initial = false;
  bool covered_corrected = false;
  std::vector<bool> violations_axis;
  double violation_radius = 0.0;
  bool oscillation_bound_ok = false;
  Eigen::Index out_of_unit = 0;  // estimates outside [0,1] (conditional CDF)
};

struct SimSummary {
  int reps = 0;
  int failed = 0;
  double coverage_initial = 0.0;   // fraction over successful replications
  double coverage_corrected = 0.0;
  std::array<double, 3> scaled_discrepancy_q{};  // 25/50/75th percentiles
  std::array<double, 3> error_ratio_q{};
  std::array<double, 3> width_ratio_q{};
  std::vector<double> violation_fraction_axis;
  double violation_fraction_all_axes = 0.0;
  double median_bandwidth = 0.0;  // conditional CDF example only
  double grid_mesh = 0.0;         // mesh within the evaluation rectangle
};

struct SimReport {
  SimConfig config;
  std::vector<SimRow> rows;
  SimSummary summary;
};

// Exact data-generating process of the binary-exposure example:
// W1 ~ Bernoulli(0.5), W2 ~ Uniform(-1,1), A | W ~ Bernoulli(expit(0.5 + W1
// - 2 W2)), Y = expit(N(0.2 - 0.3 A - 4 W2, 0.3)).
std::vector<ObsBinary> gen_gcomp(int n, Rng rng);

// Exact data-generating process of the continuous-exposure example:
// A ~ Beta(2,3), Y = expit(N(0.5 [1 + (A - 1.2)^2], 1)).
std::vector<ObsCont> gen_conddist(int n, Rng rng);

// Evaluation lattices used by the replication engine (exposed for tests).
Lattice gcomp_grid(int n);
Lattice conddist_grid(int n);

// Runs the full generate -> fit -> estimate -> project -> band -> correct ->
// metrics pipeline for each replication, asserting the deterministic
// guarantees inline (InvariantViolation carries the replication index).
// Estimator failures are recorded and skipped; more than 5% of them aborts
// with ComputeError. Rows are ordered by replication index regardless of the
// thread schedule.
SimReport run_simulation(const SimConfig& cfg);

// Serialized artifacts; byte-stable for a fixed config and seed.
std::string report_csv(const SimReport& report);
std::string summary_json_text(const SimReport& report);

// Re-runs one replication and writes its dataset, estimate grid, influence
// matrix (G-computation examples only) and the initial/corrected band CSVs
// into dir, prefixed rep<k>_. Used to dump an offending replication for
// replay; no invariant assertions run here.
void dump_replication(const SimConfig& cfg, int rep, const std::string& dir);

}  // namespace monoproj
