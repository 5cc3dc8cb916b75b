#include "monoproj/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace monoproj {

Lattice::Lattice(std::vector<Eigen::VectorXd> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InputError("Lattice: need at least one axis");
  size_ = 1;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const auto& ax = axes_[j];
    if (ax.size() < 1)
      throw InputError("Lattice: axis " + std::to_string(j + 1) + " is empty");
    for (Eigen::Index i = 0; i < ax.size(); ++i) {
      if (!std::isfinite(ax[i]) || ax[i] < 0.0 || ax[i] > 1.0)
        throw InputError("Lattice: axis " + std::to_string(j + 1) +
                         " has a coordinate outside [0,1]");
      if (i > 0 && !(ax[i] > ax[i - 1]))
        throw InputError("Lattice: axis " + std::to_string(j + 1) +
                         " is not strictly increasing");
    }
    size_ *= ax.size();
  }
}

Eigen::VectorXd Lattice::linspace(double lo, double hi, Eigen::Index count) {
  if (count < 1) throw InputError("linspace: count must be >= 1");
  if (count == 1) return Eigen::VectorXd::Constant(1, lo);
  return Eigen::VectorXd::LinSpaced(count, lo, hi);
}

Eigen::Index Lattice::flat(const GridIndex& idx) const {
  if (static_cast<int>(idx.size()) != dims())
    throw InputError("Lattice: index dimension mismatch");
  Eigen::Index f = 0;
  for (int j = 0; j < dims(); ++j) {
    const Eigen::Index n = axis_size(j);
    if (idx[static_cast<std::size_t>(j)] < 0 || idx[static_cast<std::size_t>(j)] >= n)
      throw InputError("Lattice: index out of bounds on axis " + std::to_string(j + 1));
    f = f * n + idx[static_cast<std::size_t>(j)];
  }
  return f;
}

GridIndex Lattice::unflatten(Eigen::Index flat) const {
  if (flat < 0 || flat >= size_) throw InputError("Lattice: flat index out of bounds");
  GridIndex idx(static_cast<std::size_t>(dims()));
  for (int j = dims() - 1; j >= 0; --j) {
    const Eigen::Index n = axis_size(j);
    idx[static_cast<std::size_t>(j)] = flat % n;
    flat /= n;
  }
  return idx;
}

double Lattice::coord(int j, Eigen::Index i) const {
  if (j < 0 || j >= dims()) throw InputError("Lattice: axis out of bounds");
  const auto& ax = axes_[static_cast<std::size_t>(j)];
  if (i < 0 || i >= ax.size()) throw InputError("Lattice: index out of bounds on axis " + std::to_string(j + 1));
  return ax[i];
}

Eigen::VectorXd Lattice::point(Eigen::Index flat) const {
  const GridIndex idx = unflatten(flat);
  Eigen::VectorXd p(dims());
  for (int j = 0; j < dims(); ++j) p[j] = coord(j, idx[static_cast<std::size_t>(j)]);
  return p;
}

bool Lattice::operator==(const Lattice& other) const {
  if (axes_.size() != other.axes_.size()) return false;
  for (std::size_t j = 0; j < axes_.size(); ++j)
    if (axes_[j].size() != other.axes_[j].size() || axes_[j] != other.axes_[j])
      return false;
  return true;
}

GridFunction::GridFunction(Lattice lattice, Eigen::VectorXd values)
    : lattice_(std::move(lattice)), values_(std::move(values)) {
  if (values_.size() != lattice_.size())
    throw InputError("GridFunction: value count does not match lattice size");
  if (!values_.allFinite())
    throw InputError("GridFunction: values must be finite");
}

GridFunction GridFunction::with_values(Eigen::VectorXd values) const {
  return GridFunction(lattice_, std::move(values));
}

bool partial_le(const GridIndex& a, const GridIndex& b, const Lattice& lat) {
  if (static_cast<int>(a.size()) != lat.dims() || static_cast<int>(b.size()) != lat.dims())
    throw InputError("partial_le: index dimension mismatch");
  for (int j = 0; j < lat.dims(); ++j) {
    const Eigen::Index n = lat.axis_size(j);
    const Eigen::Index ia = a[static_cast<std::size_t>(j)];
    const Eigen::Index ib = b[static_cast<std::size_t>(j)];
    if (ia < 0 || ia >= n || ib < 0 || ib >= n)
      throw InputError("partial_le: index out of bounds on axis " + std::to_string(j + 1));
    if (ia > ib) return false;
  }
  return true;
}

double point_distance(const Lattice& lat, Eigen::Index s, Eigen::Index t) {
  const GridIndex is = lat.unflatten(s);
  const GridIndex it = lat.unflatten(t);
  double d = 0.0;
  for (int j = 0; j < lat.dims(); ++j)
    d = std::max(d, std::abs(lat.coord(j, is[static_cast<std::size_t>(j)]) -
                             lat.coord(j, it[static_cast<std::size_t>(j)])));
  return d;
}

double mesh(const Lattice& lat, const std::vector<std::pair<double, double>>& domain) {
  if (static_cast<int>(domain.size()) != lat.dims())
    throw InputError("mesh: domain dimension mismatch");
  double m = 0.0;
  for (int j = 0; j < lat.dims(); ++j) {
    const auto& ax = lat.axis(j);
    const auto [lo, hi] = domain[static_cast<std::size_t>(j)];
    if (!(lo <= ax[0]) || !(hi >= ax[ax.size() - 1]))
      throw InputError("mesh: domain does not enclose axis " + std::to_string(j + 1));
    double axis_mesh = std::max(ax[0] - lo, hi - ax[ax.size() - 1]);
    for (Eigen::Index i = 1; i < ax.size(); ++i)
      axis_mesh = std::max(axis_mesh, 0.5 * (ax[i] - ax[i - 1]));
    m = std::max(m, axis_mesh);
  }
  return m;
}

double mesh(const Lattice& lat) {
  return mesh(lat, std::vector<std::pair<double, double>>(
                       static_cast<std::size_t>(lat.dims()), {0.0, 1.0}));
}

std::vector<std::uint32_t> enumerate_upper_sets(const Lattice& lat) {
  const Eigen::Index m = lat.size();
  if (m > kEnumerationLimit)
    throw InputError("enumerate_upper_sets: lattice has " + std::to_string(m) +
                     " points, enumeration is limited to " +
                     std::to_string(kEnumerationLimit));

  // Pairwise order as bitmasks: ge[i] holds the points >= point i.
  std::vector<GridIndex> idx(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = lat.unflatten(i);
  std::vector<std::uint32_t> ge(static_cast<std::size_t>(m), 0);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < m; ++k)
      if (partial_le(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(k)], lat))
        ge[static_cast<std::size_t>(i)] |= (1u << k);

  std::vector<std::uint32_t> out;
  const std::uint32_t total = 1u << m;
  for (std::uint32_t s = 0; s < total; ++s) {
    bool upper = true;
    for (Eigen::Index i = 0; i < m && upper; ++i)
      if (s & (1u << i))
        upper = (s & ge[static_cast<std::size_t>(i)]) == ge[static_cast<std::size_t>(i)];
    if (upper) out.push_back(s);
  }
  return out;
}

namespace {

// Visits every axis-aligned adjacent pair (prev, next) along axis j and
// folds f over the pair's flat indices.
template <typename Visit>
void for_each_axis_step(const Lattice& lat, int j, Visit&& visit) {
  const Eigen::Index len = lat.axis_size(j);
  if (len < 2) return;
  Eigen::Index stride = 1;
  for (int k = j + 1; k < lat.dims(); ++k) stride *= lat.axis_size(k);
  const Eigen::Index block = stride * len;
  const Eigen::Index outer = lat.size() / block;
  for (Eigen::Index b = 0; b < outer; ++b)
    for (Eigen::Index a = 0; a < stride; ++a) {
      const Eigen::Index base = b * block + a;
      for (Eigen::Index i = 0; i + 1 < len; ++i)
        visit(base + i * stride, base + (i + 1) * stride);
    }
}

}  // namespace

bool is_monotone(const GridFunction& f, double tol) {
  const auto& v = f.values();
  for (int j = 0; j < f.lattice().dims(); ++j) {
    bool ok = true;
    for_each_axis_step(f.lattice(), j, [&](Eigen::Index p, Eigen::Index q) {
      if (v[q] < v[p] - tol) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

double monotonicity_residual(const GridFunction& f) {
  const auto& v = f.values();
  double r = 0.0;
  for (int j = 0; j < f.lattice().dims(); ++j)
    for_each_axis_step(f.lattice(), j, [&](Eigen::Index p, Eigen::Index q) {
      r = std::max(r, v[p] - v[q]);
    });
  return std::max(r, 0.0);
}

std::vector<bool> axis_violations(const GridFunction& f) {
  const auto& v = f.values();
  std::vector<bool> flags(static_cast<std::size_t>(f.lattice().dims()), false);
  for (int j = 0; j < f.lattice().dims(); ++j) {
    bool hit = false;
    for_each_axis_step(f.lattice(), j, [&](Eigen::Index p, Eigen::Index q) {
      if (v[q] < v[p]) hit = true;
    });
    flags[static_cast<std::size_t>(j)] = hit;
  }
  return flags;
}

}  // namespace monoproj
