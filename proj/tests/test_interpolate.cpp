#include "monoproj/interpolate.hpp"

#include "doctest.h"
#include "test_helpers.hpp"

using namespace monoproj;
using testutil::grid2d;
using testutil::monotone_grid;

namespace {

Eigen::VectorXd pt(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("interpolation reproduces grid values at lattice points") {
  Rng rng(2);
  const GridFunction f = monotone_grid(grid2d(3, 4), rng);
  for (const auto scheme : {InterpScheme::Multilinear, InterpScheme::NearestNeighbor}) {
    const Interpolator itp(scheme, f);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const Eigen::VectorXd t = f.lattice().point(i);
      CHECK(itp.eval(t) == doctest::Approx(f[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("multilinear cell centre averages the four vertices") {
  Eigen::VectorXd v(4);
  v << 0.0, 1.0, 1.0, 2.0;
  const Interpolator itp(InterpScheme::Multilinear, GridFunction(grid2d(2, 2), v));
  CHECK(itp.eval(pt({0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("nearest neighbour picks the closer point, ties to the lower index") {
  Eigen::VectorXd v(2);
  v << 0.0, 1.0;
  const Interpolator itp(InterpScheme::NearestNeighbor,
                         GridFunction(testutil::chain(2), v));
  CHECK(itp.eval(pt({0.4})) == 0.0);
  CHECK(itp.eval(pt({0.6})) == 1.0);
  CHECK(itp.eval(pt({0.5})) == 0.0);
}

TEST_CASE("evaluation outside the bounding box fails") {
  Eigen::VectorXd ax(2);
  ax << 0.2, 0.8;
  Eigen::VectorXd v(2);
  v << 0.0, 1.0;
  const Interpolator itp(InterpScheme::Multilinear, GridFunction(Lattice({ax}), v));
  CHECK_THROWS_AS(itp.eval(pt({0.1})), InputError);
  CHECK_THROWS_AS(itp.eval(pt({0.9})), InputError);
}

TEST_CASE("non-monotone sources are rejected") {
  Eigen::VectorXd v(4);
  v << 1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(Interpolator(InterpScheme::Multilinear, GridFunction(grid2d(2, 2), v)),
                  InputError);
}

TEST_CASE("weights are a convex combination of cell vertices") {
  Rng rng(9);
  const Lattice lat = testutil::grid3d(3, 2, 4);
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::VectorXd t(3);
    for (int j = 0; j < 3; ++j) t[j] = rng.uniform();
    for (const auto scheme : {InterpScheme::Multilinear, InterpScheme::NearestNeighbor}) {
      const auto w = interpolation_weights(lat, t, scheme);
      double total = 0.0;
      for (const auto& [idx, weight] : w) {
        CHECK(weight >= 0.0);
        CHECK(weight <= 1.0 + 1e-12);
        CHECK(idx >= 0);
        CHECK(idx < lat.size());
        total += weight;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("multilinear interpolation preserves monotonicity and range") {
  Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const GridFunction f = monotone_grid(grid2d(4, 3), rng);
    const Interpolator itp(InterpScheme::Multilinear, f);
    Eigen::VectorXd lo(2), hi(2);
    for (int j = 0; j < 2; ++j) {
      const double a = rng.uniform(), b = rng.uniform();
      lo[j] = std::min(a, b);
      hi[j] = std::max(a, b);
    }
    const double vlo = itp.eval(lo);
    const double vhi = itp.eval(hi);
    CHECK(vlo <= vhi + 1e-12);
    CHECK(vlo >= f.values().minCoeff() - 1e-12);
    CHECK(vhi <= f.values().maxCoeff() + 1e-12);
  }
}

TEST_CASE("degenerate single-point axes interpolate through the slab") {
  Eigen::VectorXd ax(1), ay(3), v(3);
  ax << 0.5;
  ay << 0.0, 0.5, 1.0;
  v << 0.0, 1.0, 2.0;
  const Interpolator itp(InterpScheme::Multilinear, GridFunction(Lattice({ax, ay}), v));
  CHECK(itp.eval(pt({0.5, 0.25})) == doctest::Approx(0.5));
}
