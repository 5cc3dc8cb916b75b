#pragma once

#include <span>
#include <string>
#include <vector>

#include "monoproj/bands.hpp"
#include "monoproj/lattice.hpp"
#include "monoproj/rng.hpp"

namespace monoproj {

// One observation (A, Y) with continuous exposure A in [0,1] and outcome Y
// in (0,1).
struct ObsCont {
  double a;
  double y;
};

enum class KernelKind { Epanechnikov, Triweight };

// Symmetric bounded kernel supported on [-1,1] plus its bandwidth.
struct KernelSpec {
  KernelKind kind = KernelKind::Epanechnikov;
  double bandwidth = 0.0;

  void validate() const {
    if (!(bandwidth > 0.0)) throw InputError("KernelSpec: bandwidth must be > 0");
  }
};

template <typename Scalar>
Scalar kernel_eval(KernelKind kind, Scalar u) {
  const Scalar one = Scalar(1);
  if (u < -one || u > one) return Scalar(0);
  const Scalar q = one - u * u;
  switch (kind) {
    case KernelKind::Epanechnikov:
      return Scalar(0.75) * q;
    case KernelKind::Triweight:
      return Scalar(35.0 / 32.0) * q * q * q;
  }
  return Scalar(0);
}

// Kernel moments s_j(t2) = (nh)^{-1} sum_i (A_i - t2)^j K((A_i - t2)/h) for
// j in {0,1,2}, and their determinant g = s0 s2 - s1^2. g near zero marks a
// data-sparse window.
struct LocalMoments {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double g = 0.0;
};

LocalMoments local_moments(std::span<const ObsCont> data, const KernelSpec& k,
                           double t2);

// Equivalent-kernel weights of the local linear fit at t2:
//   w_i = [s2 - s1 (A_i - t2)] K((A_i - t2)/h) / (n h g).
// They sum to one and annihilate linear trends, which is what makes the
// estimator reproduce constants and linear functions exactly. Throws
// ComputeError on a degenerate window (g <= 1e-12).
Eigen::VectorXd loclin_weights(std::span<const ObsCont> data,
                               const KernelSpec& k, double t2);

// Local linear estimate of P(Y <= t1 | A = t2): the intercept of the
// kernel-weighted linear fit of I(Y <= t1) on (A - t2). Throws ComputeError
// on a degenerate window (g <= 1e-12).
double loclin_eval(std::span<const ObsCont> data, const KernelSpec& k,
                   double t1, double t2);

struct LoclinOptions {
  bool clip_to_unit = true;  // clamp estimates into the CDF range
  double degenerate_tol = 1e-12;
};

struct LoclinGrid {
  GridFunction values;
  Eigen::Index out_of_unit = 0;            // values outside [0,1] before any clipping
  std::vector<Eigen::Index> boundary_columns;  // t2 indices within h of {0,1}
};

// Evaluates the estimator on a 2-D lattice (axis 1 = outcome threshold t1,
// axis 2 = exposure t2). Column moments are shared across thresholds. Throws
// ComputeError listing the affected t2 slices if any window is degenerate.
LoclinGrid loclin_grid(std::span<const ObsCont> data, const KernelSpec& k,
                       const Lattice& grid, const LoclinOptions& opts = {});

// Rule-of-thumb bandwidth 2.0 * sd(A) * n^{-1/5}, clamped to [2/sqrt(n), 0.5].
double select_bandwidth(std::span<const ObsCont> data);

struct BootstrapBandResult {
  Band band;
  int failed_replicates = 0;
};

// Variable-width nonparametric bootstrap band: resample observation pairs,
// re-fit on the same grid with the same bandwidth, studentize the sup
// deviation by the pointwise bootstrap standard deviation (floored at 1e-6).
// More than 5% replicate failures is an error; fewer are dropped and counted.
BootstrapBandResult bootstrap_band(std::span<const ObsCont> data,
                                   const KernelSpec& k, const Lattice& grid,
                                   double level, int reps, const Rng& rng,
                                   const LoclinOptions& opts = {});

// True conditional distribution function of the simulated law,
// Phi(logit(t1) - 0.5 * (1 + (t2 - 1.2)^2)); monotone in both arguments over
// the unit square.
GridFunction conddist_truth(const Lattice& grid);

// Dataset CSV with header a,y.
std::vector<ObsCont> read_conddist_csv(const std::string& path);
void write_conddist_csv(const std::string& path, std::span<const ObsCont> data);

}  // namespace monoproj
