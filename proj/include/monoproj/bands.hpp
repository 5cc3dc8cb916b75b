#pragma once

#include "monoproj/estimate.hpp"
#include "monoproj/iso_project.hpp"
#include "monoproj/lattice.hpp"
#include "monoproj/rng.hpp"

namespace monoproj {

// Paired band endpoints on a shared lattice with lower <= upper pointwise.
class Band {
 public:
  Band(GridFunction lower, GridFunction upper, double level);

  const GridFunction& lower() const { return lower_; }
  const GridFunction& upper() const { return upper_; }
  double level() const { return level_; }
  const Lattice& lattice() const { return lower_.lattice(); }

  double sum_width() const { return (upper_.values() - lower_.values()).sum(); }
  double sup_width() const { return (upper_.values() - lower_.values()).maxCoeff(); }

 private:
  GridFunction lower_;
  GridFunction upper_;
  double level_;
};

struct BandComparison {
  double sum_width_initial = 0.0;
  double sum_width_corrected = 0.0;
  double sup_width_initial = 0.0;
  double sup_width_corrected = 0.0;
  bool covered_initial = false;
  bool covered_corrected = false;
};

struct CorrectedBand {
  Band band;
  ProjectionResult lower_projection;
  ProjectionResult upper_projection;

  bool converged() const {
    return lower_projection.converged && upper_projection.converged;
  }
};

// True iff lower <= truth <= upper at every grid point.
bool covers(const Band& b, const GridFunction& truth);

// Wald-type band theta -+ c_alpha * sigma / r_n.
Band construct_wald(const GridFunction& theta, const GridFunction& sigma,
                    double c_alpha, double r_n, double level);

// Projects both endpoints onto the monotone cone separately. Order
// preservation of the projection keeps lower* <= upper*; widths satisfy
// sum-preservation and sup-non-increase. Solver non-convergence is carried in
// the per-endpoint results.
CorrectedBand correct_band(const Band& b, const SolverConfig& cfg = {});

BandComparison compare_bands(const Band& initial, const Band& corrected,
                             const GridFunction& truth);

// Influence-function multiplier band: sigma_n = per-point sample sd of the
// influence columns; the critical value is the level-quantile over draws of
//   sup_t | n^{-1/2} sum_i xi_i phi_t(X_i) | / sigma_n(t)
// with independent standard Gaussian multipliers xi. The band is
// theta -+ q * sigma_n / sqrt(n). Draw streams derive from (rng, draw index),
// so the result is reproducible regardless of evaluation order.
Band multiplier_band(const EstimateWithInfluence& est, double level, int draws,
                     const Rng& rng);

}  // namespace monoproj
