#include "monoproj/estimators_loclin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "monoproj/grid_io.hpp"
#include "monoproj/stats.hpp"

namespace monoproj {

namespace {

void validate_obs(std::span<const ObsCont> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i].a >= 0.0 && data[i].a <= 1.0))
      throw InputError("observation " + std::to_string(i) + ": a must lie in [0,1]");
    if (!(data[i].y > 0.0 && data[i].y < 1.0))
      throw InputError("observation " + std::to_string(i) + ": y must lie in (0,1)");
  }
}

}  // namespace

LocalMoments local_moments(std::span<const ObsCont> data, const KernelSpec& k,
                           double t2) {
  k.validate();
  const double h = k.bandwidth;
  const double nh = static_cast<double>(data.size()) * h;
  LocalMoments m;
  for (const auto& o : data) {
    const double d = o.a - t2;
    const double kv = kernel_eval(k.kind, d / h);
    if (kv == 0.0) continue;
    m.s0 += kv;
    m.s1 += d * kv;
    m.s2 += d * d * kv;
  }
  m.s0 /= nh;
  m.s1 /= nh;
  m.s2 /= nh;
  m.g = m.s0 * m.s2 - m.s1 * m.s1;
  return m;
}

Eigen::VectorXd loclin_weights(std::span<const ObsCont> data,
                               const KernelSpec& k, double t2) {
  k.validate();
  if (data.size() < 2) throw InputError("loclin_weights: need at least 2 observations");
  const LocalMoments m = local_moments(data, k, t2);
  if (m.g <= 1e-12)
    throw ComputeError("loclin_weights: degenerate window at t2 = " + format_double(t2));
  const double h = k.bandwidth;
  const double scale = static_cast<double>(data.size()) * h * m.g;
  Eigen::VectorXd w(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = data[i].a - t2;
    w[static_cast<Eigen::Index>(i)] =
        (m.s2 - m.s1 * d) * kernel_eval(k.kind, d / h) / scale;
  }
  return w;
}

double loclin_eval(std::span<const ObsCont> data, const KernelSpec& k,
                   double t1, double t2) {
  const Eigen::VectorXd w = loclin_weights(data, k, t2);
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i].y <= t1) acc += w[static_cast<Eigen::Index>(i)];
  return acc;
}

LoclinGrid loclin_grid(std::span<const ObsCont> data, const KernelSpec& k,
                       const Lattice& grid, const LoclinOptions& opts) {
  k.validate();
  if (grid.dims() != 2) throw InputError("loclin_grid: grid must be two-dimensional");
  if (data.size() < 2) throw InputError("loclin_grid: need at least 2 observations");

  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::VectorXd& t1s = grid.axis(0);
  const Eigen::VectorXd& t2s = grid.axis(1);
  const Eigen::Index m1 = t1s.size();
  const Eigen::Index m2 = t2s.size();
  const double h = k.bandwidth;

  // Observations sorted by outcome once; per column the estimate at every
  // threshold is then a prefix sum of the local linear weights.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return data[static_cast<std::size_t>(i)].y < data[static_cast<std::size_t>(j)].y;
  });
  Eigen::VectorXd sorted_y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    sorted_y[i] = data[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].y;

  Eigen::VectorXd values(grid.size());
  std::vector<Eigen::Index> degenerate;
  std::vector<Eigen::Index> boundary;
  Eigen::VectorXd cumw(n + 1);
  for (Eigen::Index c = 0; c < m2; ++c) {
    const double t2 = t2s[c];
    if (t2 < h || t2 > 1.0 - h) boundary.push_back(c);
    const LocalMoments m = local_moments(data, k, t2);
    if (m.g <= opts.degenerate_tol) {
      degenerate.push_back(c);
      continue;
    }
    const double scale = static_cast<double>(n) * h * m.g;
    cumw[0] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& o = data[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      const double d = o.a - t2;
      cumw[i + 1] = cumw[i] + (m.s2 - m.s1 * d) * kernel_eval(k.kind, d / h) / scale;
    }
    for (Eigen::Index r = 0; r < m1; ++r) {
      const Eigen::Index cnt =
          std::upper_bound(sorted_y.data(), sorted_y.data() + n, t1s[r]) - sorted_y.data();
      values[r * m2 + c] = cumw[cnt];
    }
  }
  if (!degenerate.empty()) {
    std::string msg = "loclin_grid: degenerate windows at t2 in {";
    for (std::size_t i = 0; i < degenerate.size(); ++i)
      msg += (i ? "," : "") + format_double(t2s[degenerate[i]]);
    throw ComputeError(msg + "}");
  }

  Eigen::Index out_of_unit = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0 || values[i] > 1.0) {
      ++out_of_unit;
      if (opts.clip_to_unit) values[i] = std::min(std::max(values[i], 0.0), 1.0);
    }
  }
  return LoclinGrid{GridFunction(grid, std::move(values)), out_of_unit,
                    std::move(boundary)};
}

double select_bandwidth(std::span<const ObsCont> data) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  if (n < 30) throw InputError("select_bandwidth: need at least 30 observations");
  validate_obs(data);
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = data[static_cast<std::size_t>(i)].a;
  const double sd = sample_sd(a);
  if (!(sd > 0.0)) throw ComputeError("select_bandwidth: exposure has zero variance");
  const double h = 4.0 * sd * std::pow(static_cast<double>(n), -0.2);
  const double lo = 2.0 / std::sqrt(static_cast<double>(n));
  return std::min(std::max(h, lo), 0.5);
}

BootstrapBandResult bootstrap_band(std::span<const ObsCont> data,
                                   const KernelSpec& k, const Lattice& grid,
                                   double level, int reps, const Rng& rng,
                                   const LoclinOptions& opts) {
  if (reps < 100) throw InputError("bootstrap_band: need at least 100 replicates");
  if (!(level > 0.0 && level < 1.0))
    throw InputError("bootstrap_band: level must lie in (0,1)");

  const LoclinGrid fit = loclin_grid(data, k, grid, opts);
  const Eigen::Index m = fit.values.size();
  const std::size_t n = data.size();

  Eigen::MatrixXd boot(m, reps);
  int ok = 0, failed = 0;
  std::vector<ObsCont> resample(n);
  for (int b = 0; b < reps; ++b) {
    Rng rep_rng = rng.substream(static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < n; ++i)
      resample[i] = data[rep_rng.uniform_index(n)];
    try {
      boot.col(ok) = loclin_grid(resample, k, grid, opts).values.values();
      ++ok;
    } catch (const ComputeError&) {
      ++failed;
    }
  }
  if (failed * 20 > reps)
    throw ComputeError("bootstrap_band: " + std::to_string(failed) + " of " +
                       std::to_string(reps) + " replicates failed");

  Eigen::VectorXd sigma(m);
  for (Eigen::Index t = 0; t < m; ++t)
    sigma[t] = std::max(sample_sd(boot.row(t).head(ok).transpose()), 1e-6);

  std::vector<double> sups(static_cast<std::size_t>(ok));
  for (int b = 0; b < ok; ++b)
    sups[static_cast<std::size_t>(b)] =
        ((boot.col(b) - fit.values.values()).cwiseAbs().array() / sigma.array())
            .maxCoeff();
  const double q = order_statistic_quantile(std::move(sups), level);

  Band band(fit.values.with_values(fit.values.values() - q * sigma),
            fit.values.with_values(fit.values.values() + q * sigma), level);
  return BootstrapBandResult{std::move(band), failed};
}

GridFunction conddist_truth(const Lattice& grid) {
  if (grid.dims() != 2) throw InputError("conddist_truth: grid must be two-dimensional");
  const Eigen::VectorXd& t1s = grid.axis(0);
  const Eigen::VectorXd& t2s = grid.axis(1);
  Eigen::VectorXd values(grid.size());
  for (Eigen::Index r = 0; r < t1s.size(); ++r) {
    const double lt = logit(t1s[r]);
    for (Eigen::Index c = 0; c < t2s.size(); ++c) {
      const double mu = 0.5 * (1.0 + (t2s[c] - 1.2) * (t2s[c] - 1.2));
      values[r * t2s.size() + c] = normal_cdf(lt - mu);
    }
  }
  return GridFunction(grid, std::move(values));
}

std::vector<ObsCont> read_conddist_csv(const std::string& path) {
  const auto rows = csv::read_table(path);
  if (rows[0] != std::vector<std::string>{"a", "y"})
    throw InputError(path + ": expected header a,y");
  std::vector<ObsCont> data;
  data.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2)
      throw InputError(path + ": row " + std::to_string(r + 1) + " has wrong field count");
    data.push_back({csv::parse_double(rows[r][0], r + 1),
                    csv::parse_double(rows[r][1], r + 1)});
  }
  validate_obs(data);
  return data;
}

void write_conddist_csv(const std::string& path, std::span<const ObsCont> data) {
  std::string out = "a,y\n";
  for (const auto& o : data)
    out += format_double(o.a) + "," + format_double(o.y) + "\n";
  atomic_write_file(path, out);
}

}  // namespace monoproj
