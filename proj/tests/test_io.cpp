#include "monoproj/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "monoproj/svg.hpp"
#include "test_helpers.hpp"

using namespace monoproj;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace

TEST_CASE("grid csv round-trips exactly") {
  Rng rng(3);
  const GridFunction f = testutil::gaussian_grid(testutil::grid2d(3, 4), rng);
  const std::string path = "/tmp/monoproj_grid_roundtrip.csv";
  write_grid_csv(path, f);
  const GridFunction back = read_grid_csv(path);
  CHECK(back.lattice() == f.lattice());
  CHECK(back.values() == f.values());

  // a second write produces identical bytes
  const std::string first = slurp(path);
  write_grid_csv(path, back);
  CHECK(slurp(path) == first);
}

TEST_CASE("grid csv accepts shuffled rows") {
  spit("/tmp/monoproj_grid_shuffled.csv",
       "axis1,axis2,value\n"
       "1,1,4\n"
       "0,0,1\n"
       "1,0,3\n"
       "0,1,2\n");
  const GridFunction f = read_grid_csv("/tmp/monoproj_grid_shuffled.csv");
  CHECK(f.values()[0] == 1.0);
  CHECK(f.values()[1] == 2.0);
  CHECK(f.values()[2] == 3.0);
  CHECK(f.values()[3] == 4.0);
}

TEST_CASE("grid csv structural errors carry row context") {
  const char* path = "/tmp/monoproj_grid_bad.csv";

  spit(path, "axis1,axis2,value\n0,0,1\n0,1,2\n1,0,3\n0,1,4\n");
  CHECK_THROWS_WITH_AS(read_grid_csv(path), doctest::Contains("duplicates"), InputError);

  spit(path, "axis1,axis2,value\n0,0,1\n0,1,2\n1,0,3\n");
  CHECK_THROWS_WITH_AS(read_grid_csv(path), doctest::Contains("rectangular"), InputError);

  spit(path, "axis1,value\n0,1\n0.5\n");
  CHECK_THROWS_WITH_AS(read_grid_csv(path), doctest::Contains("row 3"), InputError);

  spit(path, "axis1,value\n0,abc\n");
  CHECK_THROWS_WITH_AS(read_grid_csv(path), doctest::Contains("abc"), InputError);

  spit(path, "t,value\n0,1\n");
  CHECK_THROWS_WITH_AS(read_grid_csv(path), doctest::Contains("axis1"), InputError);

  spit(path, "axis1,value\n1.5,1\n");
  CHECK_THROWS_AS(read_grid_csv(path), InputError);  // coordinate outside [0,1]

  CHECK_THROWS_AS(read_grid_csv("/tmp/monoproj_does_not_exist.csv"), InputError);
}

TEST_CASE("band csv round-trips and validates ordering") {
  Rng rng(5);
  const GridFunction lo = testutil::monotone_grid(testutil::grid2d(2, 3), rng);
  // band endpoints must stay in [0,1]-indexed lattices but values are free
  const Band band(lo, lo.with_values(lo.values().array() + 0.3), 0.9);
  const std::string path = "/tmp/monoproj_band_roundtrip.csv";
  write_band_csv(path, band);
  const Band back = read_band_csv(path, 0.9);
  CHECK(back.lower().values() == band.lower().values());
  CHECK(back.upper().values() == band.upper().values());

  spit(path, "axis1,lower,upper\n0,1,0\n1,0,1\n");
  CHECK_THROWS_WITH_AS(read_band_csv(path, 0.9), doctest::Contains("lower exceeds"),
                       InputError);
}

TEST_CASE("points csv reads evaluation points") {
  spit("/tmp/monoproj_points.csv", "axis1,axis2\n0.25,0.5\n0.75,0.125\n");
  const auto pts = read_points_csv("/tmp/monoproj_points.csv");
  REQUIRE(pts.size() == 2);
  CHECK(pts[0][0] == 0.25);
  CHECK(pts[1][1] == 0.125);

  write_point_values_csv("/tmp/monoproj_points_out.csv", pts, {1.0, 2.0});
  const std::string out = slurp("/tmp/monoproj_points_out.csv");
  CHECK(out == "axis1,axis2,value\n0.25,0.5,1\n0.75,0.125,2\n");
}

TEST_CASE("atomic writes leave no temp file behind") {
  const std::string path = "/tmp/monoproj_atomic.csv";
  atomic_write_file(path, "x\n");
  CHECK(slurp(path) == "x\n");
  std::ifstream tmp(path + ".tmp");
  CHECK_FALSE(tmp.good());
  std::remove(path.c_str());
}

TEST_CASE("influence csv has one row per observation") {
  Eigen::MatrixXd infl(2, 3);
  infl << 1, 2, 3, 4, 5, 6;
  write_influence_csv("/tmp/monoproj_infl.csv", infl);
  CHECK(slurp("/tmp/monoproj_infl.csv") ==
        "obs,p0,p1,p2\n0,1,2,3\n1,4,5,6\n");
}

TEST_CASE("ecdf svg renders step curves for each series") {
  const std::string svg =
      ecdf_svg("title", "metric", {{"n=100", {1.0, 2.0, 3.0}}, {"n=1000", {0.5, 1.5}}});
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("n=100") != std::string::npos);
  CHECK(svg.find("n=1000") != std::string::npos);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  CHECK_THROWS_AS(ecdf_svg("t", "x", {}), InputError);
  write_ecdf_svg("/tmp/monoproj_ecdf.svg", "t", "x", {{"s", {1.0, 2.0}}});
  CHECK(slurp("/tmp/monoproj_ecdf.svg").find("</svg>") != std::string::npos);
}
