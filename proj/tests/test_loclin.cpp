#include "monoproj/estimators_loclin.hpp"

#include <cmath>

#include "doctest.h"
#include "monoproj/sim_lab.hpp"
#include "monoproj/stats.hpp"
#include "test_helpers.hpp"

using namespace monoproj;

namespace {

Lattice square_grid(std::initializer_list<double> t1s, std::initializer_list<double> t2s) {
  Eigen::VectorXd a1(static_cast<Eigen::Index>(t1s.size()));
  Eigen::VectorXd a2(static_cast<Eigen::Index>(t2s.size()));
  Eigen::Index i = 0;
  for (double t : t1s) a1[i++] = t;
  i = 0;
  for (double t : t2s) a2[i++] = t;
  return Lattice({a1, a2});
}

}  // namespace

TEST_CASE("kernels have the right shape") {
  CHECK(kernel_eval(KernelKind::Epanechnikov, 0.0) == doctest::Approx(0.75));
  CHECK(kernel_eval(KernelKind::Epanechnikov, 1.0) == 0.0);
  CHECK(kernel_eval(KernelKind::Epanechnikov, -1.5) == 0.0);
  CHECK(kernel_eval(KernelKind::Triweight, 0.0) == doctest::Approx(35.0 / 32.0));
  CHECK(kernel_eval(KernelKind::Epanechnikov, 0.3) ==
        kernel_eval(KernelKind::Epanechnikov, -0.3));
}

TEST_CASE("local linear reproduces constants exactly") {
  Rng rng(4);
  std::vector<ObsCont> data;
  for (int i = 0; i < 50; ++i) data.push_back({rng.uniform(), 0.2 + 0.6 * rng.uniform()});
  const KernelSpec k{KernelKind::Epanechnikov, 0.3};
  CHECK(loclin_eval(data, k, 0.95, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(loclin_eval(data, k, 0.05, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("three-point window matches the closed-form weighted least squares fit") {
  const std::vector<ObsCont> data = {{0.2, 0.9}, {0.5, 0.1}, {0.8, 0.2}};
  // responses I(y <= 0.5) = {0, 1, 1}
  const KernelSpec k{KernelKind::Epanechnikov, 0.5};
  const double got = loclin_eval(data, k, 0.5, 0.5);
  CHECK(got == doctest::Approx(0.719298245614035).epsilon(1e-12));

  // independent 2x2 weighted normal equations
  double s0 = 0, s1 = 0, s2 = 0, b0 = 0, b1 = 0;
  for (const auto& o : data) {
    const double d = o.a - 0.5;
    const double kv = kernel_eval(KernelKind::Epanechnikov, d / 0.5);
    const double z = o.y <= 0.5 ? 1.0 : 0.0;
    s0 += kv;
    s1 += kv * d;
    s2 += kv * d * d;
    b0 += kv * z;
    b1 += kv * d * z;
  }
  const double det = s0 * s2 - s1 * s1;
  const double intercept = (s2 * b0 - s1 * b1) / det;
  CHECK(got == doctest::Approx(intercept).epsilon(1e-12));
}

TEST_CASE("degenerate designs are reported") {
  std::vector<ObsCont> atom;
  for (int i = 0; i < 20; ++i) atom.push_back({0.5, 0.1 + 0.04 * i});
  const KernelSpec k{KernelKind::Epanechnikov, 0.1};
  CHECK_THROWS_AS(loclin_eval(atom, k, 0.5, 0.5), ComputeError);
  CHECK_THROWS_WITH_AS(loclin_eval(atom, k, 0.5, 0.9), doctest::Contains("0.9"),
                       ComputeError);
}

TEST_CASE("weights sum to one and annihilate linear trends") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ObsCont> data;
    const int n = 40 + static_cast<int>(rng.uniform_index(60));
    for (int i = 0; i < n; ++i) data.push_back({rng.uniform(), 0.5});
    const KernelSpec k{trial % 2 ? KernelKind::Epanechnikov : KernelKind::Triweight,
                       0.15 + 0.3 * rng.uniform()};
    const double t2 = 0.2 + 0.6 * rng.uniform();
    Eigen::VectorXd w;
    try {
      w = loclin_weights(data, k, t2);
    } catch (const ComputeError&) {
      continue;  // sparse window; nothing to assert
    }
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-10));
    const double alpha = rng.normal(), beta = rng.normal();
    double fitted = 0.0;
    for (int i = 0; i < n; ++i)
      fitted += w[i] * (alpha + beta * data[static_cast<std::size_t>(i)].a);
    CHECK(fitted == doctest::Approx(alpha + beta * t2).epsilon(1e-8));
  }
}

TEST_CASE("fits are equivariant under location shifts") {
  Rng rng(33);
  std::vector<ObsCont> data, shifted;
  for (int i = 0; i < 80; ++i) {
    const double a = 0.1 + 0.6 * rng.uniform();
    const double y = 0.2 + 0.6 * rng.uniform();
    data.push_back({a, y});
    shifted.push_back({a + 0.2, y});
  }
  const KernelSpec k{KernelKind::Epanechnikov, 0.2};
  const double t2 = 0.4;
  CHECK(loclin_eval(data, k, 0.5, t2) ==
        doctest::Approx(loclin_eval(shifted, k, 0.5, t2 + 0.2)).epsilon(1e-10));
}

TEST_CASE("grid evaluation agrees with pointwise evaluation") {
  const auto data = gen_conddist(200, Rng(8));
  const KernelSpec k{KernelKind::Epanechnikov, 0.25};
  const Lattice grid = square_grid({0.3, 0.5, 0.7}, {0.2, 0.4, 0.6});
  const LoclinGrid fit = loclin_grid(data, k, grid, {false, 1e-12});
  for (Eigen::Index r = 0; r < 3; ++r)
    for (Eigen::Index c = 0; c < 3; ++c)
      CHECK(fit.values[r * 3 + c] ==
            doctest::Approx(loclin_eval(data, k, grid.coord(0, r), grid.coord(1, c)))
                .epsilon(1e-12));

  // single point grid
  const Lattice single = square_grid({0.5}, {0.4});
  const LoclinGrid one = loclin_grid(data, k, single, {false, 1e-12});
  CHECK(one.values[0] == doctest::Approx(loclin_eval(data, k, 0.5, 0.4)).epsilon(1e-12));
}

TEST_CASE("clipping is an output-side choice with a reported count") {
  const auto data = gen_conddist(150, Rng(18));
  const KernelSpec k{KernelKind::Epanechnikov, select_bandwidth(data)};
  const Lattice grid = conddist_grid(150);
  const LoclinGrid raw = loclin_grid(data, k, grid, {false, 1e-12});
  const LoclinGrid clipped = loclin_grid(data, k, grid, {true, 1e-12});
  CHECK(raw.out_of_unit == clipped.out_of_unit);
  CHECK((clipped.values.values().array() >= 0.0).all());
  CHECK((clipped.values.values().array() <= 1.0).all());
  Eigen::Index outside = 0;
  for (Eigen::Index i = 0; i < raw.values.size(); ++i)
    outside += (raw.values[i] < 0.0 || raw.values[i] > 1.0) ? 1 : 0;
  CHECK(outside == raw.out_of_unit);
}

TEST_CASE("boundary columns are flagged") {
  const auto data = gen_conddist(300, Rng(28));
  const KernelSpec k{KernelKind::Epanechnikov, 0.3};
  const Lattice grid = square_grid({0.5}, {0.1, 0.5, 0.9});
  const LoclinGrid fit = loclin_grid(data, k, grid, {false, 1e-12});
  REQUIRE(fit.boundary_columns.size() == 2);
  CHECK(fit.boundary_columns[0] == 0);
  CHECK(fit.boundary_columns[1] == 2);
}

TEST_CASE("bandwidth rule") {
  const auto data = gen_conddist(1000, Rng(55));
  Eigen::VectorXd a(1000);
  for (int i = 0; i < 1000; ++i) a[i] = data[static_cast<std::size_t>(i)].a;
  const double sd = sample_sd(a);
  const double h = select_bandwidth(data);
  CHECK(h == doctest::Approx(4.0 * sd * std::pow(1000.0, -0.2)).epsilon(1e-12));
  // Beta(2,3) has sd 0.2, so the rule lands near 0.8 * n^{-1/5}
  CHECK(h == doctest::Approx(0.201).epsilon(0.1));

  std::vector<ObsCont> constant;
  for (int i = 0; i < 50; ++i) constant.push_back({0.5, 0.1 + 0.01 * i});
  CHECK_THROWS_AS(select_bandwidth(constant), ComputeError);
  CHECK_THROWS_AS(select_bandwidth(std::vector<ObsCont>(10, ObsCont{0.5, 0.5})),
                  InputError);

  // lower clamp engages when the rule falls under 2/sqrt(n)
  std::vector<ObsCont> tight;
  Rng rng(66);
  for (int i = 0; i < 10000; ++i) tight.push_back({0.5 + 0.001 * rng.normal(), 0.5});
  for (auto& o : tight) o.a = std::min(std::max(o.a, 0.0), 1.0);
  for (auto& o : tight) o.y = 0.2 + 0.6 * rng.uniform();
  CHECK(select_bandwidth(tight) == doctest::Approx(2.0 / std::sqrt(10000.0)).epsilon(1e-12));
}

TEST_CASE("bootstrap bands are deterministic and variable width") {
  const auto data = gen_conddist(120, Rng(71));
  const KernelSpec k{KernelKind::Epanechnikov, select_bandwidth(data)};
  const Lattice grid = conddist_grid(120);
  const LoclinOptions opts{false, 1e-12};
  const auto b1 = bootstrap_band(data, k, grid, 0.95, 100, Rng(5), opts);
  const auto b2 = bootstrap_band(data, k, grid, 0.95, 100, Rng(5), opts);
  CHECK(b1.band.lower().values() == b2.band.lower().values());
  CHECK(b1.band.upper().values() == b2.band.upper().values());
  CHECK(b1.failed_replicates == b2.failed_replicates);

  // width varies across the grid
  const Eigen::VectorXd widths = b1.band.upper().values() - b1.band.lower().values();
  CHECK(widths.maxCoeff() > widths.minCoeff() + 1e-6);
}

TEST_CASE("constant outcomes give a zero-width band at the variance floor") {
  std::vector<ObsCont> data;
  Rng rng(81);
  for (int i = 0; i < 100; ++i) data.push_back({rng.uniform(), 0.5});
  const KernelSpec k{KernelKind::Epanechnikov, 0.3};
  const Lattice grid = square_grid({0.3, 0.7}, {0.35, 0.5, 0.65});
  const auto b = bootstrap_band(data, k, grid, 0.95, 100, Rng(6), {false, 1e-12});
  CHECK(b.band.sup_width() == doctest::Approx(0.0));
}

TEST_CASE("truth surface reference values") {
  const Lattice grid = square_grid({0.5, expit(1.22), 0.8}, {0.0, 0.5, 1.0});
  const GridFunction truth = conddist_truth(grid);
  // t1 = 0.5, t2 = 0: Phi(0 - 0.5 * (1 + 1.44))
  CHECK(truth[0] == doctest::Approx(0.11123243744783456).epsilon(1e-12));
  // logit(t1) equal to the conditional mean puts the value at one half
  CHECK(truth[3] == doctest::Approx(0.5).epsilon(1e-12));
  // t1 = 0.8, t2 = 1
  CHECK(truth[8] == doctest::Approx(0.806835621101863).epsilon(1e-9));
  CHECK(is_monotone(truth));
}

TEST_CASE("conddist dataset csv round-trips") {
  const auto data = gen_conddist(40, Rng(15));
  const std::string path = "/tmp/monoproj_test_conddist.csv";
  write_conddist_csv(path, data);
  const auto back = read_conddist_csv(path);
  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back[i].a == data[i].a);
    CHECK(back[i].y == data[i].y);
  }
}
