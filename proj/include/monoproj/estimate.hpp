#pragma once

#include <Eigen/Core>

#include "monoproj/lattice.hpp"

namespace monoproj {

// Estimator values on a grid together with the per-observation influence
// matrix (rows = observations, columns = grid points in flat order).
// Influence columns are empirically mean-zero by construction.
struct EstimateWithInfluence {
  GridFunction estimate;
  Eigen::MatrixXd influence;
  // Set when more than 10% of the relevant observations sat at the
  // propensity truncation floor.
  bool truncation_warning = false;

  void validate() const {
    if (influence.cols() != estimate.size())
      throw InputError("EstimateWithInfluence: influence columns must match grid size");
    if (influence.rows() < 2)
      throw InputError("EstimateWithInfluence: need at least 2 observations");
  }
};

}  // namespace monoproj
