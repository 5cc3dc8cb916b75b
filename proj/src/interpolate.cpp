#include "monoproj/interpolate.hpp"

#include <algorithm>
#include <cmath>

namespace monoproj {

namespace {

// Cell along one axis for coordinate x: the index c of the left vertex,
// c in [0, len-2]. A point sitting exactly on an interior grid coordinate is
// assigned the left (smaller-index) cell.
Eigen::Index axis_cell(const Eigen::VectorXd& ax, double x) {
  const Eigen::Index len = ax.size();
  // last index with ax[c] strictly below x
  Eigen::Index c =
      std::lower_bound(ax.data(), ax.data() + len, x) - ax.data() - 1;
  if (c < 0) c = 0;
  if (c > len - 2) c = len - 2;
  return c;
}

}  // namespace

std::vector<std::pair<Eigen::Index, double>> interpolation_weights(
    const Lattice& lat, const Eigen::Ref<const Eigen::VectorXd>& t,
    InterpScheme scheme) {
  const int d = lat.dims();
  if (t.size() != d) throw InputError("interpolation_weights: point dimension mismatch");
  for (int j = 0; j < d; ++j) {
    const auto& ax = lat.axis(j);
    if (t[j] < ax[0] || t[j] > ax[ax.size() - 1])
      throw InputError("interpolation_weights: point outside the lattice bounding box on axis " +
                       std::to_string(j + 1));
  }

  if (scheme == InterpScheme::NearestNeighbor) {
    GridIndex idx(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const auto& ax = lat.axis(j);
      Eigen::Index best = 0;
      double best_dist = std::abs(t[j] - ax[0]);
      for (Eigen::Index i = 1; i < ax.size(); ++i) {
        const double dist = std::abs(t[j] - ax[i]);
        if (dist < best_dist) {  // ties keep the lower index
          best = i;
          best_dist = dist;
        }
      }
      idx[static_cast<std::size_t>(j)] = best;
    }
    return {{lat.flat(idx), 1.0}};
  }

  // Multilinear: per-axis cell plus fractional position, then product
  // weights over the 2^d cell vertices.
  std::vector<Eigen::Index> cell(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const auto& ax = lat.axis(j);
    if (ax.size() == 1) {
      cell[static_cast<std::size_t>(j)] = 0;
      frac[static_cast<std::size_t>(j)] = 0.0;
      continue;
    }
    const Eigen::Index c = axis_cell(ax, t[j]);
    cell[static_cast<std::size_t>(j)] = c;
    frac[static_cast<std::size_t>(j)] = (t[j] - ax[c]) / (ax[c + 1] - ax[c]);
  }

  std::vector<std::pair<Eigen::Index, double>> out;
  out.reserve(1u << d);
  GridIndex idx(static_cast<std::size_t>(d));
  for (std::uint32_t corner = 0; corner < (1u << d); ++corner) {
    double w = 1.0;
    bool degenerate_corner = false;
    for (int j = 0; j < d; ++j) {
      const bool high = (corner >> j) & 1u;
      if (lat.axis_size(j) == 1) {
        if (high) degenerate_corner = true;
        idx[static_cast<std::size_t>(j)] = 0;
        continue;
      }
      idx[static_cast<std::size_t>(j)] = cell[static_cast<std::size_t>(j)] + (high ? 1 : 0);
      w *= high ? frac[static_cast<std::size_t>(j)] : 1.0 - frac[static_cast<std::size_t>(j)];
    }
    if (degenerate_corner) continue;
    out.emplace_back(lat.flat(idx), w);
  }
  return out;
}

Interpolator::Interpolator(InterpScheme scheme, GridFunction source, double tol_monotone)
    : scheme_(scheme), source_(std::move(source)) {
  if (!is_monotone(source_, tol_monotone))
    throw InputError("Interpolator: source grid function is not monotone");
}

double Interpolator::eval(const Eigen::Ref<const Eigen::VectorXd>& t) const {
  const auto weights = interpolation_weights(source_.lattice(), t, scheme_);
  double v = 0.0;
  for (const auto& [i, w] : weights) v += w * source_[i];
  return v;
}

}  // namespace monoproj
