#include "monoproj/iso_project.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "monoproj/pava.hpp"

namespace monoproj {

namespace {

// Calls fn(base, stride, len) once per grid line along axis j. A line visits
// flat indices base, base+stride, ..., base+(len-1)*stride.
template <typename Fn>
void for_each_line(const Lattice& lat, int j, Fn&& fn) {
  Eigen::Index stride = 1;
  for (int k = j + 1; k < lat.dims(); ++k) stride *= lat.axis_size(k);
  const Eigen::Index len = lat.axis_size(j);
  const Eigen::Index block = stride * len;
  const Eigen::Index outer = lat.size() / block;
  for (Eigen::Index b = 0; b < outer; ++b)
    for (Eigen::Index a = 0; a < stride; ++a) fn(b * block + a, stride, len);
}

double residual_on(const Lattice& lat, const Eigen::VectorXd& v) {
  double r = 0.0;
  for (int j = 0; j < lat.dims(); ++j)
    for_each_line(lat, j, [&](Eigen::Index base, Eigen::Index stride, Eigen::Index len) {
      for (Eigen::Index i = 0; i + 1 < len; ++i)
        r = std::max(r, v[base + i * stride] - v[base + (i + 1) * stride]);
    });
  return std::max(r, 0.0);
}

// Exact projection onto the cone "monotone along axis j": independent
// line-wise PAVA.
void project_axis(const Lattice& lat, int j, Eigen::VectorXd& x,
                  std::vector<double>& line, std::vector<double>& means,
                  std::vector<Eigen::Index>& counts) {
  for_each_line(lat, j, [&](Eigen::Index base, Eigen::Index stride, Eigen::Index len) {
    line.resize(static_cast<std::size_t>(len));
    for (Eigen::Index i = 0; i < len; ++i) line[static_cast<std::size_t>(i)] = x[base + i * stride];
    detail::pava_unit_inplace(line.data(), len, means, counts);
    for (Eigen::Index i = 0; i < len; ++i) x[base + i * stride] = line[static_cast<std::size_t>(i)];
  });
}

double mask_mean(std::uint32_t mask, const Eigen::VectorXd& v) {
  double sum = 0.0;
  int count = 0;
  while (mask) {
    const int i = __builtin_ctz(mask);
    sum += v[i];
    ++count;
    mask &= mask - 1;
  }
  return sum / static_cast<double>(count);
}

}  // namespace

ProjectionResult project_monotone(const GridFunction& f, const SolverConfig& cfg) {
  cfg.validate();
  const Lattice& lat = f.lattice();
  const int d = lat.dims();

  if (d == 1) {
    Eigen::VectorXd out = pava(f.values());
    return ProjectionResult{f.with_values(std::move(out)), 1, true, 0.0};
  }

  Eigen::VectorXd x = f.values();
  std::vector<Eigen::VectorXd> corrections(
      static_cast<std::size_t>(d), Eigen::VectorXd::Zero(lat.size()));
  std::vector<double> line, means;
  std::vector<Eigen::Index> counts;
  Eigen::VectorXd x_prev(lat.size());
  Eigen::VectorXd y(lat.size());

  int sweeps = 0;
  double change = 0.0;
  double resid = 0.0;
  bool converged = false;
  while (sweeps < cfg.max_sweeps) {
    ++sweeps;
    x_prev = x;
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd& p = corrections[static_cast<std::size_t>(j)];
      y = x + p;
      x = y;
      project_axis(lat, j, x, line, means, counts);
      p = y - x;
    }
    change = (x - x_prev).cwiseAbs().maxCoeff();
    resid = residual_on(lat, x);
    if (change < cfg.tol_dykstra && resid < cfg.tol_monotone) {
      converged = true;
      break;
    }
  }

  return ProjectionResult{f.with_values(std::move(x)), sweeps, converged,
                          std::max(resid, change)};
}

GridFunction oracle_minmax(const GridFunction& f) {
  const Lattice& lat = f.lattice();
  const Eigen::Index m = lat.size();
  if (m > kEnumerationLimit)
    throw InputError("oracle_minmax: lattice exceeds the enumeration limit");
  const Eigen::VectorXd& v = f.values();

  const std::vector<std::uint32_t> uppers = enumerate_upper_sets(lat);
  const std::uint32_t full = (1u << m) - 1u;
  std::vector<std::uint32_t> lowers(uppers.size());
  for (std::size_t i = 0; i < uppers.size(); ++i) lowers[i] = full & ~uppers[i];

  Eigen::VectorXd out(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    const std::uint32_t bit = 1u << t;
    double maxmin = -std::numeric_limits<double>::infinity();
    for (const std::uint32_t u : uppers) {
      if (!(u & bit)) continue;
      double inner = std::numeric_limits<double>::infinity();
      for (const std::uint32_t l : lowers) {
        if (!(l & bit)) continue;
        inner = std::min(inner, mask_mean(u & l, v));
      }
      maxmin = std::max(maxmin, inner);
    }
    double minmax = std::numeric_limits<double>::infinity();
    for (const std::uint32_t l : lowers) {
      if (!(l & bit)) continue;
      double inner = -std::numeric_limits<double>::infinity();
      for (const std::uint32_t u : uppers) {
        if (!(u & bit)) continue;
        inner = std::max(inner, mask_mean(u & l, v));
      }
      minmax = std::min(minmax, inner);
    }
    if (std::abs(maxmin - minmax) > 1e-9 * std::max(1.0, std::abs(maxmin)))
      throw InvariantViolation("oracle_minmax: max-min and min-max forms disagree");
    out[t] = maxmin;
  }
  return f.with_values(std::move(out));
}

ViolationDiagnostic violation_diagnostic(const GridFunction& f) {
  const Lattice& lat = f.lattice();
  const Eigen::Index m = lat.size();
  const int d = lat.dims();
  const Eigen::VectorXd& v = f.values();

  // Cache index tuples and coordinates once; the pair scan is the hot path.
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> idx(m, d);
  Eigen::MatrixXd coords(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const GridIndex gi = lat.unflatten(i);
    for (int j = 0; j < d; ++j) {
      idx(i, j) = gi[static_cast<std::size_t>(j)];
      coords(i, j) = lat.coord(j, gi[static_cast<std::size_t>(j)]);
    }
  }

  ViolationDiagnostic diag;
  Eigen::Index best_s = -1, best_t = -1;
  // Flat order is lexicographic in the index tuple, so for i < k the only
  // possible comparability is i <= k.
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = i + 1; k < m; ++k) {
      bool le = true;
      for (int j = 0; j < d; ++j) {
        if (idx(i, j) > idx(k, j)) {
          le = false;
          break;
        }
      }
      if (!le || v[k] > v[i]) continue;
      double dist = 0.0;
      for (int j = 0; j < d; ++j)
        dist = std::max(dist, coords(k, j) - coords(i, j));
      if (dist > diag.radius) {
        diag.radius = dist;
        best_s = i;
        best_t = k;
      }
    }
  }
  if (best_s >= 0)
    diag.worst_pair = std::make_pair(lat.unflatten(best_s), lat.unflatten(best_t));
  return diag;
}

namespace {

// Sliding window extrema along one axis: out[i] = extremum of in over the
// index window determined by coordinates within radius of axis coord i.
// Window endpoints are monotone in i, so a deque scan is linear.
template <bool kMax>
void axis_window_filter(const Lattice& lat, int j, double radius,
                        const Eigen::VectorXd& in, Eigen::VectorXd& out) {
  const Eigen::VectorXd& ax = lat.axis(j);
  const Eigen::Index len = ax.size();
  std::vector<Eigen::Index> lo(static_cast<std::size_t>(len)),
      hi(static_cast<std::size_t>(len));
  {
    Eigen::Index l = 0, h = 0;
    for (Eigen::Index i = 0; i < len; ++i) {
      while (ax[l] < ax[i] - radius) ++l;
      if (h < i) h = i;
      while (h + 1 < len && ax[h + 1] <= ax[i] + radius) ++h;
      lo[static_cast<std::size_t>(i)] = l;
      hi[static_cast<std::size_t>(i)] = h;
    }
  }
  std::deque<Eigen::Index> dq;
  for_each_line(lat, j, [&](Eigen::Index base, Eigen::Index stride, Eigen::Index) {
    dq.clear();
    Eigen::Index filled = 0;  // next axis position to push
    for (Eigen::Index i = 0; i < len; ++i) {
      for (; filled <= hi[static_cast<std::size_t>(i)]; ++filled) {
        const double val = in[base + filled * stride];
        while (!dq.empty()) {
          const double back = in[base + dq.back() * stride];
          if (kMax ? (back <= val) : (back >= val))
            dq.pop_back();
          else
            break;
        }
        dq.push_back(filled);
      }
      while (dq.front() < lo[static_cast<std::size_t>(i)]) dq.pop_front();
      out[base + i * stride] = in[base + dq.front() * stride];
    }
  });
}

}  // namespace

bool oscillation_bound_check(const GridFunction& f, const ProjectionResult& p,
                        double tol) {
  if (p.projected.lattice() != f.lattice())
    throw InputError("oscillation_bound_check: mismatched lattices");
  const Lattice& lat = f.lattice();
  const double lhs = (p.projected.values() - f.values()).cwiseAbs().maxCoeff();
  const double radius = violation_diagnostic(f).radius;

  // Oscillation of f over the radius-ball: separable max/min filters across
  // axes give sup_{||s-t|| <= radius} |f(s) - f(t)| as
  // max_t max(maxfilt - f, f - minfilt).
  Eigen::VectorXd fmax = f.values(), fmin = f.values(), tmp(lat.size());
  for (int j = 0; j < lat.dims(); ++j) {
    axis_window_filter<true>(lat, j, radius, fmax, tmp);
    fmax.swap(tmp);
    axis_window_filter<false>(lat, j, radius, fmin, tmp);
    fmin.swap(tmp);
  }
  const double rhs = std::max((fmax - f.values()).maxCoeff(),
                              (f.values() - fmin).maxCoeff());
  return lhs <= rhs + tol;
}

}  // namespace monoproj
