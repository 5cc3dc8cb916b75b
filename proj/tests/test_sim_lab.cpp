#include "monoproj/sim_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "monoproj/stats.hpp"
#include "test_helpers.hpp"

using namespace monoproj;

TEST_CASE("binary-exposure generator matches its law") {
  const auto data = gen_gcomp(100000, Rng(1));
  double w1_mean = 0.0;
  double logit_y_sum = 0.0;
  int bin_count = 0;
  int a_given_w = 0, w_count = 0;
  for (const auto& o : data) {
    w1_mean += o.w1;
    // exposure rate in a thin slice around (w1=0, w2=0); expit(0.5) there
    if (o.w1 == 0 && std::abs(o.w2) < 0.05) {
      ++w_count;
      a_given_w += o.a;
    }
    if (o.a == 0 && std::abs(o.w2) < 0.025) {
      logit_y_sum += logit(o.y);
      ++bin_count;
    }
  }
  w1_mean /= data.size();
  CHECK(std::abs(w1_mean - 0.5) < 0.005);
  CHECK(std::abs(static_cast<double>(a_given_w) / w_count - expit(0.5)) < 0.02);
  CHECK(std::abs(logit_y_sum / bin_count - 0.2) < 0.02);
}

TEST_CASE("continuous-exposure generator matches its law") {
  const auto data = gen_conddist(100000, Rng(2));
  double a_mean = 0.0;
  std::vector<double> bin;
  for (const auto& o : data) {
    CHECK(o.a >= 0.0);
    CHECK(o.a <= 1.0);
    CHECK(o.y > 0.0);
    CHECK(o.y < 1.0);
    a_mean += o.a;
    if (std::abs(o.a - 0.4) < 0.02) bin.push_back(logit(o.y));
  }
  a_mean /= data.size();
  CHECK(std::abs(a_mean - 0.4) < 0.005);
  // median of logit(Y) near a = 0.4 is about 0.5 * (1 + 0.64)
  CHECK(std::abs(quantile(bin, 0.5) - 0.5 * (1.0 + 0.64)) < 0.1);
}

TEST_CASE("evaluation grids follow the mesh rules") {
  const Lattice g1 = gcomp_grid(1000);
  CHECK(g1.dims() == 1);
  CHECK(g1.axis_size(0) == 32);  // ceil(sqrt(1000))
  CHECK(g1.coord(0, 0) == doctest::Approx(0.1));
  CHECK(g1.coord(0, 31) == doctest::Approx(0.9));

  const Lattice g2 = conddist_grid(100);
  CHECK(g2.dims() == 2);
  const double target = std::pow(100.0, -0.8);
  for (int j = 0; j < 2; ++j) {
    const double lo = g2.axis(j)[0];
    const double hi = g2.axis(j)[g2.axis_size(j) - 1];
    const Eigen::Index expect =
        1 + static_cast<Eigen::Index>(std::ceil((hi - lo) / target));
    CHECK(g2.axis_size(j) == expect);
    // grid step stays within the target spacing
    const double gap = g2.coord(j, 1) - g2.coord(j, 0);
    CHECK(gap <= target + 1e-12);
  }

  // the axis cap keeps desk-scale runtimes
  const Lattice g3 = conddist_grid(5000);
  CHECK(g3.axis_size(0) <= 120);
  CHECK(g3.axis_size(1) <= 120);
}

TEST_CASE("simulation reports are deterministic and respect the guarantees") {
  SimConfig cfg;
  cfg.example = SimExample::GComp1D;
  cfg.n = 200;
  cfg.reps = 20;
  cfg.seed = 7;
  cfg.band_draws = 200;
  cfg.threads = 2;

  const SimReport report = run_simulation(cfg);
  REQUIRE(report.rows.size() == 20);
  for (const SimRow& row : report.rows) {
    REQUIRE_FALSE(row.failed);
    CHECK(row.error_ratio >= 1.0 - 1e-9);
    CHECK(row.oscillation_bound_ok);
    CHECK((!row.covered_initial || row.covered_corrected));
    CHECK(row.scaled_discrepancy >= 0.0);
    CHECK(row.width_ratio >= 1.0 - 1e-9);
  }

  const SimReport again = run_simulation(cfg);
  CHECK(report_csv(report) == report_csv(again));
  CHECK(summary_json_text(report) == summary_json_text(again));

  // identical bytes with a different thread count
  SimConfig serial = cfg;
  serial.threads = 1;
  CHECK(report_csv(run_simulation(serial)) == report_csv(report));
}

TEST_CASE("single replication runs") {
  SimConfig cfg;
  cfg.example = SimExample::GComp2D;
  cfg.n = 150;
  cfg.reps = 1;
  cfg.seed = 3;
  cfg.band_draws = 150;
  const SimReport report = run_simulation(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK_FALSE(report.rows[0].failed);
  CHECK(report.rows[0].violations_axis.size() == 2);
  CHECK(report.summary.grid_mesh > 0.0);
}

TEST_CASE("observed-value grid mode uses the outcomes as thresholds") {
  SimConfig cfg;
  cfg.example = SimExample::GComp1D;
  cfg.n = 120;
  cfg.reps = 2;
  cfg.seed = 11;
  cfg.band_draws = 150;
  cfg.grid_mode = GridMode::Observed;
  const SimReport report = run_simulation(cfg);
  for (const SimRow& row : report.rows) CHECK_FALSE(row.failed);
  CHECK(report.summary.grid_mesh == 0.0);  // grids are replication-specific
}

TEST_CASE("conditional-CDF replications run end to end") {
  SimConfig cfg;
  cfg.example = SimExample::CondDist;
  cfg.n = 100;
  cfg.reps = 4;
  cfg.seed = 19;
  cfg.band_reps = 100;
  cfg.threads = 2;
  const SimReport report = run_simulation(cfg);
  int violations_both = 0;
  for (const SimRow& row : report.rows) {
    REQUIRE_FALSE(row.failed);
    CHECK(row.error_ratio >= 1.0 - 1e-9);
    CHECK(row.oscillation_bound_ok);
    violations_both += row.violations_axis[0] && row.violations_axis[1];
  }
  CHECK(violations_both >= 3);  // violations are the norm for this law
  CHECK(report.summary.median_bandwidth > 0.0);
  CHECK(report_csv(run_simulation(cfg)) == report_csv(report));
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.n = 10;
  CHECK_THROWS_AS(run_simulation(cfg), InputError);
  cfg.n = 100;
  cfg.reps = 0;
  CHECK_THROWS_AS(run_simulation(cfg), InputError);
  cfg.reps = 1;
  cfg.level = 1.0;
  CHECK_THROWS_AS(run_simulation(cfg), InputError);
  cfg.level = 0.95;
  cfg.example = SimExample::CondDist;
  cfg.grid_mode = GridMode::Observed;
  CHECK_THROWS_AS(run_simulation(cfg), InputError);
}

TEST_CASE("report csv rows line up with the header for ok and failed rows") {
  SimReport report;
  report.config.example = SimExample::GComp2D;
  SimRow ok;
  ok.rep = 0;
  ok.scaled_discrepancy = 0.5;
  ok.error_ratio = 1.25;
  ok.width_ratio = 1.0;
  ok.covered_initial = true;
  ok.covered_corrected = true;
  ok.violations_axis = {true, false};
  ok.violation_radius = 0.125;
  ok.oscillation_bound_ok = true;
  SimRow bad;
  bad.rep = 1;
  bad.failed = true;
  bad.note = "window collapsed";
  report.rows = {ok, bad};

  const std::string csv = report_csv(report);
  std::vector<std::vector<std::string>> lines;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    lines.push_back(cells);
  }
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].size() == lines[0].size());
  CHECK(lines[2].size() == lines[0].size());
  CHECK(lines[2][1] == "failed");
  CHECK(lines[2].back() == "window collapsed");
  CHECK(lines[0].back() == "note");
}

TEST_CASE("example names round-trip") {
  for (const auto e : {SimExample::GComp1D, SimExample::GComp2D, SimExample::CondDist})
    CHECK(sim_example_from_string(to_string(e)) == e);
  CHECK_THROWS_AS(sim_example_from_string("nope"), InputError);
}
