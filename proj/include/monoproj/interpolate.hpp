#pragma once

#include <utility>
#include <vector>

#include "monoproj/lattice.hpp"

namespace monoproj {

enum class InterpScheme { NearestNeighbor, Multilinear };

// Convex-combination weights placing t inside its enclosing grid cell:
// (flat vertex index, weight) pairs with nonnegative weights summing to 1.
// Multilinear returns the 2^d cell vertices with product weights;
// NearestNeighbor returns a single vertex with weight 1 (per-axis nearest,
// ties to the lower index). Points on shared cell faces belong to the cell
// with the smaller index. Throws if t lies outside the lattice bounding box.
std::vector<std::pair<Eigen::Index, double>> interpolation_weights(
    const Lattice& lat, const Eigen::Ref<const Eigen::VectorXd>& t,
    InterpScheme scheme);

// Extends a monotone grid function to the whole bounding box. Multilinear
// evaluation is continuous and component-wise monotone whenever the source
// is; it is the default scheme.
class Interpolator {
 public:
  Interpolator(InterpScheme scheme, GridFunction source,
               double tol_monotone = 1e-8);

  double eval(const Eigen::Ref<const Eigen::VectorXd>& t) const;

  InterpScheme scheme() const { return scheme_; }
  const GridFunction& source() const { return source_; }

 private:
  InterpScheme scheme_;
  GridFunction source_;
};

}  // namespace monoproj
