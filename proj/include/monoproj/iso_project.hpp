#pragma once

#include <optional>
#include <utility>

#include "monoproj/lattice.hpp"

namespace monoproj {

struct SolverConfig {
  double tol_dykstra = 1e-10;  // sup-norm change of the iterate per sweep
  int max_sweeps = 10000;
  double tol_monotone = 1e-8;  // residual monotonicity violation

  void validate() const {
    if (!(tol_dykstra > 0.0) || !(tol_monotone > 0.0) || max_sweeps < 1)
      throw InputError("SolverConfig: tolerances must be > 0 and max_sweeps >= 1");
  }
};

struct ProjectionResult {
  GridFunction projected;
  int iterations = 0;
  bool converged = false;
  // max of the residual monotonicity violation and the final sweep's sup-norm
  // change; 0 for the exact one-dimensional path.
  double max_kkt_residual = 0.0;
};

struct ViolationDiagnostic {
  // Largest max-norm distance between a comparable pair whose values tie or
  // reverse; 0 iff values strictly increase along every comparable pair.
  double radius = 0.0;
  std::optional<std::pair<GridIndex, GridIndex>> worst_pair;
};

// L2 projection of the grid values onto the component-wise monotone cone.
// d = 1 is a single exact PAVA pass. d >= 2 runs Dykstra's alternating
// projections over the d axis-wise monotone cones, each sub-projection being
// exact line-wise PAVA; the intersection of the axis cones is the monotone
// cone, so the iterates converge to the unique projection. Non-convergence is
// reported through the result, never as an exception.
ProjectionResult project_monotone(const GridFunction& f, const SolverConfig& cfg = {});

// Exact isotonic regression by enumeration of upper and lower sets,
//   theta*(t) = max_{U : t in U} min_{L : t in L} mean(U \cap L),
// with U upper sets and L lower sets. Also verifies that the max-min and
// min-max forms agree. Guarded to lattices with at most 16 points.
GridFunction oracle_minmax(const GridFunction& f);

// Empirical violation radius over the grid with the attaining pair.
ViolationDiagnostic violation_diagnostic(const GridFunction& f);

// Deterministic inequality relating the projection displacement to the
// oscillation of f over violation-radius neighborhoods:
//   max |theta* - theta|  <=  sup_{||s-t|| <= radius} |theta(s) - theta(t)|.
// Returns true iff it holds within tol.
bool oscillation_bound_check(const GridFunction& f, const ProjectionResult& p,
                        double tol = 1e-8);

}  // namespace monoproj
