#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

#include "monoproj/errors.hpp"

namespace monoproj {

// Index of a grid point, one entry per axis.
using GridIndex = std::vector<Eigen::Index>;

// A finite rectangular lattice in [0,1]^d: the Cartesian product of d
// strictly increasing coordinate axes. Values attached to the lattice are
// stored flat in row-major order with the LAST axis varying fastest; this is
// the one canonical layout used everywhere (solver, I/O, estimators).
//
// Immutable after construction and safe to share across threads.
class Lattice {
 public:
  explicit Lattice(std::vector<Eigen::VectorXd> axes);

  // Equally spaced axis helper.
  static Eigen::VectorXd linspace(double lo, double hi, Eigen::Index count);

  int dims() const { return static_cast<int>(axes_.size()); }
  const Eigen::VectorXd& axis(int j) const { return axes_[static_cast<std::size_t>(j)]; }
  Eigen::Index axis_size(int j) const { return axes_[static_cast<std::size_t>(j)].size(); }
  Eigen::Index size() const { return size_; }  // m_n

  Eigen::Index flat(const GridIndex& idx) const;
  GridIndex unflatten(Eigen::Index flat) const;
  double coord(int j, Eigen::Index i) const;

  // Coordinates of the grid point with the given flat index.
  Eigen::VectorXd point(Eigen::Index flat) const;

  bool operator==(const Lattice& other) const;
  bool operator!=(const Lattice& other) const { return !(*this == other); }

 private:
  std::vector<Eigen::VectorXd> axes_;
  Eigen::Index size_ = 0;
};

// Real values attached to the lattice points, flat row-major (last axis
// fastest). All values must be finite. Immutable after construction.
class GridFunction {
 public:
  GridFunction(Lattice lattice, Eigen::VectorXd values);

  const Lattice& lattice() const { return lattice_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](Eigen::Index flat) const { return values_[flat]; }
  double operator()(const GridIndex& idx) const { return values_[lattice_.flat(idx)]; }
  Eigen::Index size() const { return values_.size(); }

  // Same lattice, new values.
  GridFunction with_values(Eigen::VectorXd values) const;

 private:
  Lattice lattice_;
  Eigen::VectorXd values_;
};

// Component-wise partial order on grid indices: a <= b iff the coordinate of
// a is <= the coordinate of b on every axis. Throws on out-of-bounds indices.
bool partial_le(const GridIndex& a, const GridIndex& b, const Lattice& lat);

// Max-norm distance between the coordinates of two grid points.
double point_distance(const Lattice& lat, Eigen::Index s, Eigen::Index t);

// Mesh of the lattice in the enclosing rectangular domain: the supremal
// max-norm distance from any domain point to its nearest lattice point. For a
// product grid this is the max over axes of
//   max(first - lo, hi - last, largest gap / 2).
double mesh(const Lattice& lat,
            const std::vector<std::pair<double, double>>& domain);

// Mesh in the unit box [0,1]^d.
double mesh(const Lattice& lat);

// All upper sets of the lattice under the component-wise order, as bitmasks
// over flat indices (bit i set  <=>  point with flat index i belongs to the
// set). Enumeration only; guarded to lattices with at most 16 points.
std::vector<std::uint32_t> enumerate_upper_sets(const Lattice& lat);

// Max point count accepted by the enumeration oracle.
inline constexpr Eigen::Index kEnumerationLimit = 16;

// True iff values are non-decreasing along every axis-aligned step, i.e. the
// function is component-wise monotone on the lattice (up to tol).
bool is_monotone(const GridFunction& f, double tol = 0.0);

// Largest positive violation f(prev) - f(next) over axis-aligned adjacent
// pairs; 0 for a monotone function.
double monotonicity_residual(const GridFunction& f);

// Per-axis flags: true where some axis-aligned adjacent pair strictly
// decreases.
std::vector<bool> axis_violations(const GridFunction& f);

}  // namespace monoproj
