#include "monoproj/estimators_gcomp.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "monoproj/grid_io.hpp"
#include "monoproj/stats.hpp"

namespace monoproj {

namespace {

// Gauss-Legendre nodes and weights on (-1, 1) by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double true_qbar(double t, int a, double w2) {
  // Under the simulated law, logit(Y) | A, W is Gaussian with mean
  // 0.2 - 0.3 a - 4 w2 and variance 0.3.
  const double mu = 0.2 - 0.3 * a - 4.0 * w2;
  return normal_cdf((logit(t) - mu) / std::sqrt(0.3));
}

}  // namespace

void validate_obs(std::span<const ObsBinary> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& o = data[i];
    if (!(o.y > 0.0 && o.y < 1.0))
      throw InputError("observation " + std::to_string(i) + ": y must lie in (0,1)");
    if (o.a != 0 && o.a != 1)
      throw InputError("observation " + std::to_string(i) + ": a must be 0 or 1");
    if (o.w1 != 0 && o.w1 != 1)
      throw InputError("observation " + std::to_string(i) + ": w1 must be 0 or 1");
    if (!(o.w2 > -1.0 && o.w2 < 1.0))
      throw InputError("observation " + std::to_string(i) + ": w2 must lie in (-1,1)");
  }
}

NuisanceFits fit_nuisance(std::span<const ObsBinary> data) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  if (n < 20) throw InputError("fit_nuisance: need at least 20 observations");
  validate_obs(data);

  Eigen::Index n1 = 0;
  for (const auto& o : data) n1 += o.a;
  if (n1 == 0 || n1 == n)
    throw InputError("fit_nuisance: both exposure arms must be present");

  Eigen::MatrixXd xp(n, 3);  // propensity design: 1, w1, w2
  Eigen::VectorXd av(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xp(i, 0) = 1.0;
    xp(i, 1) = data[static_cast<std::size_t>(i)].w1;
    xp(i, 2) = data[static_cast<std::size_t>(i)].w2;
    av[i] = data[static_cast<std::size_t>(i)].a;
  }

  // IRLS for the logistic propensity model.
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd eta = xp * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = expit(eta[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-10);
    }
    const Eigen::Matrix3d h = xp.transpose() * w.asDiagonal() * xp;
    const Eigen::Vector3d g = xp.transpose() * (av - p);
    const Eigen::Vector3d step = h.ldlt().solve(g);
    if (!step.allFinite())
      throw ComputeError("fit_nuisance: IRLS step is not finite");
    beta += step;
    if (step.cwiseAbs().maxCoeff() < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged || !beta.allFinite() || beta.cwiseAbs().maxCoeff() > 50.0)
    throw ComputeError("fit_nuisance: IRLS diverged (possible separation)");

  // OLS for logit(Y) on (1, a, w2).
  Eigen::MatrixXd xo(n, 3);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xo(i, 0) = 1.0;
    xo(i, 1) = data[static_cast<std::size_t>(i)].a;
    xo(i, 2) = data[static_cast<std::size_t>(i)].w2;
    z[i] = logit(data[static_cast<std::size_t>(i)].y);
  }
  const Eigen::Vector3d gamma =
      (xo.transpose() * xo).ldlt().solve(xo.transpose() * z);
  const double rss = (z - xo * gamma).squaredNorm();
  const double sd = std::sqrt(rss / static_cast<double>(n - 3));
  if (!(sd > 0.0))
    throw ComputeError("fit_nuisance: outcome model has zero residual variance");

  return NuisanceFits{beta, gamma, sd, 0.01};
}

double propensity(const NuisanceFits& fits, int a0, int w1, double w2) {
  const double eta = fits.propensity[0] + fits.propensity[1] * w1 + fits.propensity[2] * w2;
  double g = expit(eta);
  if (a0 == 0) g = 1.0 - g;
  return std::min(std::max(g, fits.truncation), 1.0 - fits.truncation);
}

double qbar(const NuisanceFits& fits, double t, int a, double w2) {
  const double mu = fits.outcome[0] + fits.outcome[1] * a + fits.outcome[2] * w2;
  return normal_cdf((logit(t) - mu) / fits.residual_sd);
}

EstimateWithInfluence aipw_curve(std::span<const ObsBinary> data,
                                 const NuisanceFits& fits, int a0,
                                 const Lattice& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  if (n < 2) throw InputError("aipw_curve: need at least 2 observations");
  if (grid.dims() != 1) throw InputError("aipw_curve: grid must be one-dimensional");
  const Eigen::VectorXd& ts = grid.axis(0);
  for (Eigen::Index t = 0; t < ts.size(); ++t)
    if (!(ts[t] > 0.0 && ts[t] < 1.0))
      throw InputError("aipw_curve: grid thresholds must lie in (0,1)");

  Eigen::VectorXd g(n);
  Eigen::Index arm = 0, at_floor = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = data[static_cast<std::size_t>(i)];
    g[i] = propensity(fits, a0, o.w1, o.w2);
    if (o.a == a0) {
      ++arm;
      if (g[i] <= fits.truncation) ++at_floor;
    }
  }

  const Eigen::Index m = ts.size();
  Eigen::MatrixXd influence(n, m);
  Eigen::VectorXd theta(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& o = data[static_cast<std::size_t>(i)];
      const double qb = qbar(fits, ts[t], a0, o.w2);
      const double term =
          (o.a == a0 ? ((o.y <= ts[t] ? 1.0 : 0.0) - qb) / g[i] : 0.0) + qb;
      influence(i, t) = term;
      sum += term;
    }
    theta[t] = sum / static_cast<double>(n);
    influence.col(t).array() -= theta[t];
  }

  EstimateWithInfluence est{GridFunction(grid, std::move(theta)),
                            std::move(influence),
                            arm > 0 && 10 * at_floor > arm};
  est.validate();
  return est;
}

EstimateWithInfluence bivariate_stack(const EstimateWithInfluence& curve0,
                                      const EstimateWithInfluence& curve1) {
  if (curve0.estimate.lattice() != curve1.estimate.lattice())
    throw InputError("bivariate_stack: curves live on different grids");
  if (curve0.estimate.lattice().dims() != 1)
    throw InputError("bivariate_stack: curves must be one-dimensional");
  if (curve0.influence.rows() != curve1.influence.rows())
    throw InputError("bivariate_stack: influence row counts differ");

  const Eigen::Index m = curve0.estimate.size();
  Eigen::VectorXd a_axis(2);
  a_axis << 0.0, 1.0;
  Lattice stacked({a_axis, curve0.estimate.lattice().axis(0)});

  Eigen::VectorXd values(2 * m);
  values.head(m) = curve0.estimate.values();
  values.tail(m) = curve1.estimate.values();

  Eigen::MatrixXd influence(curve0.influence.rows(), 2 * m);
  influence.leftCols(m) = curve0.influence;
  influence.rightCols(m) = curve1.influence;

  EstimateWithInfluence est{GridFunction(std::move(stacked), std::move(values)),
                            std::move(influence),
                            curve0.truncation_warning || curve1.truncation_warning};
  est.validate();
  return est;
}

GridFunction gcomp_truth(const Lattice& grid, int a0) {
  if (grid.dims() != 1) throw InputError("gcomp_truth: grid must be one-dimensional");
  static thread_local Eigen::VectorXd nodes, weights;
  if (nodes.size() == 0) gauss_legendre(64, nodes, weights);

  const Eigen::VectorXd& ts = grid.axis(0);
  Eigen::VectorXd out(ts.size());
  for (Eigen::Index t = 0; t < ts.size(); ++t) {
    // W1 does not enter the outcome law, so the average over W1 in {0,1} is
    // the W2 integral itself; W2 is uniform on (-1,1) with density 1/2.
    double acc = 0.0;
    for (Eigen::Index k = 0; k < nodes.size(); ++k)
      acc += weights[k] * true_qbar(ts[t], a0, nodes[k]);
    out[t] = 0.5 * acc;
  }
  return GridFunction(grid, std::move(out));
}

GridFunction gcomp_truth_stacked(const Lattice& stacked) {
  if (stacked.dims() != 2 || stacked.axis_size(0) != 2 ||
      stacked.coord(0, 0) != 0.0 || stacked.coord(0, 1) != 1.0)
    throw InputError("gcomp_truth_stacked: lattice must be {0,1} x T");
  Lattice tgrid({stacked.axis(1)});
  const GridFunction t0 = gcomp_truth(tgrid, 0);
  const GridFunction t1 = gcomp_truth(tgrid, 1);
  Eigen::VectorXd values(stacked.size());
  values.head(t0.size()) = t0.values();
  values.tail(t1.size()) = t1.values();
  return GridFunction(stacked, std::move(values));
}

std::vector<ObsBinary> read_gcomp_csv(const std::string& path) {
  const auto rows = csv::read_table(path);
  if (rows[0] != std::vector<std::string>{"y", "a", "w1", "w2"})
    throw InputError(path + ": expected header y,a,w1,w2");
  std::vector<ObsBinary> data;
  data.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 4)
      throw InputError(path + ": row " + std::to_string(r + 1) + " has wrong field count");
    ObsBinary o;
    o.y = csv::parse_double(rows[r][0], r + 1);
    o.a = static_cast<int>(csv::parse_double(rows[r][1], r + 1));
    o.w1 = static_cast<int>(csv::parse_double(rows[r][2], r + 1));
    o.w2 = csv::parse_double(rows[r][3], r + 1);
    data.push_back(o);
  }
  validate_obs(data);
  return data;
}

void write_gcomp_csv(const std::string& path, std::span<const ObsBinary> data) {
  std::string out = "y,a,w1,w2\n";
  for (const auto& o : data) {
    out += format_double(o.y) + "," + std::to_string(o.a) + "," +
           std::to_string(o.w1) + "," + format_double(o.w2) + "\n";
  }
  atomic_write_file(path, out);
}

}  // namespace monoproj
