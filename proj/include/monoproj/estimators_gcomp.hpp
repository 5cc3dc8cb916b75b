#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "monoproj/estimate.hpp"
#include "monoproj/lattice.hpp"

namespace monoproj {

// One observation (Y, A, W) with binary exposure and covariates
// W = (W1, W2), W1 binary and W2 in (-1,1). Y lies in (0,1).
struct ObsBinary {
  double y;
  int a;
  int w1;
  double w2;
};

// Parametric nuisance fits: logistic propensity A ~ (1, W1, W2) and a linear
// model for logit(Y) on (1, A, W2) with Gaussian residuals.
struct NuisanceFits {
  Eigen::Vector3d propensity;  // intercept, w1, w2
  Eigen::Vector3d outcome;     // intercept, a, w2
  double residual_sd = 0.0;
  double truncation = 0.01;  // propensity floor / ceiling
};

void validate_obs(std::span<const ObsBinary> data);

// IRLS logistic fit plus OLS outcome fit. Requires n >= 20 and both exposure
// arms present; throws ComputeError on IRLS divergence or separation and on a
// degenerate (zero residual) outcome fit.
NuisanceFits fit_nuisance(std::span<const ObsBinary> data);

// P(A = a0 | W = w) under the fit, truncated to [truncation, 1 - truncation].
double propensity(const NuisanceFits& fits, int a0, int w1, double w2);

// Conditional exposure-specific distribution function
// Qbar(t | a, w) = Phi((logit t - mu(a, w2)) / sd), non-decreasing in t.
double qbar(const NuisanceFits& fits, double t, int a, double w2);

// Doubly-robust AIPW estimator of the G-computed distribution function on a
// one-dimensional grid of thresholds, with the per-observation influence
// matrix. Values need not be monotone in t; that is the point of the
// downstream projection.
EstimateWithInfluence aipw_curve(std::span<const ObsBinary> data,
                                 const NuisanceFits& fits, int a0,
                                 const Lattice& grid);

// Stacks the a0 = 0 and a0 = 1 curves on the {0,1} x T lattice (exposure
// axis first, so curve0's block precedes curve1's). The exposure axis is
// ordered so the true surface is component-wise monotone.
EstimateWithInfluence bivariate_stack(const EstimateWithInfluence& curve0,
                                      const EstimateWithInfluence& curve1);

// Reference curve theta_0 for the simulated data-generating process, by
// Gauss-Legendre integration of the true Qbar over the covariate law.
GridFunction gcomp_truth(const Lattice& grid, int a0);

// Truth on the stacked {0,1} x T lattice.
GridFunction gcomp_truth_stacked(const Lattice& stacked);

// Dataset CSV with header y,a,w1,w2.
std::vector<ObsBinary> read_gcomp_csv(const std::string& path);
void write_gcomp_csv(const std::string& path, std::span<const ObsBinary> data);

}  // namespace monoproj
