#include "monoproj/bands.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "monoproj/stats.hpp"

namespace monoproj {

namespace {
// Slack for endpoint ordering checks; the projection of both endpoints is
// exact only up to solver tolerance.
constexpr double kOrderTol = 1e-8;
}  // namespace

Band::Band(GridFunction lower, GridFunction upper, double level)
    : lower_(std::move(lower)), upper_(std::move(upper)), level_(level) {
  if (lower_.lattice() != upper_.lattice())
    throw InputError("Band: endpoints live on different lattices");
  if (!(level_ > 0.0 && level_ < 1.0))
    throw InputError("Band: level must lie in (0,1)");
  if (((upper_.values() - lower_.values()).array() < -kOrderTol).any())
    throw InputError("Band: lower endpoint exceeds upper endpoint");
}

bool covers(const Band& b, const GridFunction& truth) {
  if (truth.lattice() != b.lattice())
    throw InputError("covers: truth lives on a different lattice");
  return (b.lower().values().array() <= truth.values().array()).all() &&
         (truth.values().array() <= b.upper().values().array()).all();
}

Band construct_wald(const GridFunction& theta, const GridFunction& sigma,
                    double c_alpha, double r_n, double level) {
  if (sigma.lattice() != theta.lattice())
    throw InputError("construct_wald: sigma lives on a different lattice");
  if ((sigma.values().array() <= 0.0).any())
    throw InputError("construct_wald: sigma must be positive everywhere");
  if (!(c_alpha > 0.0)) throw InputError("construct_wald: c_alpha must be > 0");
  if (!(r_n > 0.0)) throw InputError("construct_wald: r_n must be > 0");
  const Eigen::VectorXd half = (c_alpha / r_n) * sigma.values();
  return Band(theta.with_values(theta.values() - half),
              theta.with_values(theta.values() + half), level);
}

CorrectedBand correct_band(const Band& b, const SolverConfig& cfg) {
  ProjectionResult lo = project_monotone(b.lower(), cfg);
  ProjectionResult hi = project_monotone(b.upper(), cfg);
  Band corrected(lo.projected, hi.projected, b.level());
  return CorrectedBand{std::move(corrected), std::move(lo), std::move(hi)};
}

BandComparison compare_bands(const Band& initial, const Band& corrected,
                             const GridFunction& truth) {
  if (initial.lattice() != corrected.lattice() || initial.lattice() != truth.lattice())
    throw InputError("compare_bands: lattice mismatch");
  BandComparison c;
  c.sum_width_initial = initial.sum_width();
  c.sum_width_corrected = corrected.sum_width();
  c.sup_width_initial = initial.sup_width();
  c.sup_width_corrected = corrected.sup_width();
  c.covered_initial = covers(initial, truth);
  c.covered_corrected = covers(corrected, truth);
  return c;
}

Band multiplier_band(const EstimateWithInfluence& est, double level, int draws,
                     const Rng& rng) {
  est.validate();
  if (draws < 100) throw InputError("multiplier_band: need at least 100 draws");
  if (!(level > 0.0 && level < 1.0))
    throw InputError("multiplier_band: level must lie in (0,1)");

  const Eigen::Index n = est.influence.rows();
  const Eigen::Index m = est.influence.cols();
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  Eigen::VectorXd sigma(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    sigma[t] = sample_sd(est.influence.col(t));
    if (!(sigma[t] > 0.0))
      throw InputError("multiplier_band: zero influence variance at grid point " +
                       std::to_string(t));
  }

  // One multiplier vector per draw, each from its own substream; the sup
  // statistics are then a single matrix product.
  Eigen::MatrixXd xi(n, draws);
  for (int b = 0; b < draws; ++b) {
    Rng draw_rng = rng.substream(static_cast<std::uint64_t>(b));
    for (Eigen::Index i = 0; i < n; ++i) xi(i, b) = draw_rng.normal();
  }
  const Eigen::MatrixXd z = est.influence.transpose() * xi / sqrt_n;  // m x draws

  std::vector<double> sups(static_cast<std::size_t>(draws));
  for (int b = 0; b < draws; ++b)
    sups[static_cast<std::size_t>(b)] =
        (z.col(b).cwiseAbs().array() / sigma.array()).maxCoeff();
  const double q = order_statistic_quantile(std::move(sups), level);

  return construct_wald(est.estimate, est.estimate.with_values(sigma), q,
                        sqrt_n, level);
}

}  // namespace monoproj
