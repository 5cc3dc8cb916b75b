#include "monoproj/grid_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace monoproj {

std::string format_double(double x) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw InputError("cannot rename into place: " + path);
}

namespace csv {

std::vector<std::vector<std::string>> read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      // trim spaces
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw InputError("empty file: " + path);
  return rows;
}

double parse_double(const std::string& cell, std::size_t row) {
  if (cell.empty())
    throw InputError("row " + std::to_string(row) + ": empty numeric field");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw InputError("row " + std::to_string(row) + ": cannot parse number '" + cell + "'");
  }
  if (pos != cell.size())
    throw InputError("row " + std::to_string(row) + ": trailing characters in '" + cell + "'");
  return v;
}

}  // namespace csv

namespace {

struct GriddedTable {
  Lattice lattice;
  std::vector<Eigen::VectorXd> columns;
};

// Shared reader for grid-shaped files: d axis columns followed by the named
// value columns.
GriddedTable read_gridded(const std::string& path,
                          const std::vector<std::string>& value_headers) {
  const auto rows = csv::read_table(path);
  const auto& header = rows[0];
  const std::size_t k = value_headers.size();
  if (header.size() < k + 1)
    throw InputError(path + ": header must contain at least one axis column and " +
                     std::to_string(k) + " value column(s)");
  const std::size_t d = header.size() - k;
  for (std::size_t j = 0; j < d; ++j) {
    const std::string expect = "axis" + std::to_string(j + 1);
    if (header[j] != expect)
      throw InputError(path + ": expected header column '" + expect + "', got '" +
                       header[j] + "'");
  }
  for (std::size_t j = 0; j < k; ++j)
    if (header[d + j] != value_headers[j])
      throw InputError(path + ": expected header column '" + value_headers[j] +
                       "', got '" + header[d + j] + "'");

  const std::size_t n = rows.size() - 1;
  if (n == 0) throw InputError(path + ": no data rows");
  Eigen::MatrixXd table(n, d + k);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw InputError(path + ": row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " fields, expected " +
                       std::to_string(header.size()));
    for (std::size_t c = 0; c < header.size(); ++c)
      table(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
          csv::parse_double(rows[r][c], r + 1);
  }

  // Axes are the sorted distinct coordinates per axis column.
  std::vector<Eigen::VectorXd> axes(d);
  std::vector<std::map<double, Eigen::Index>> lookup(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> vals(table.col(static_cast<Eigen::Index>(j)).data(),
                             table.col(static_cast<Eigen::Index>(j)).data() + n);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    axes[j] = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    for (Eigen::Index i = 0; i < axes[j].size(); ++i) lookup[j][axes[j][i]] = i;
  }
  Lattice lat(axes);
  if (lat.size() != static_cast<Eigen::Index>(n))
    throw InputError(path + ": rows do not form a rectangular grid (" +
                     std::to_string(n) + " rows vs " + std::to_string(lat.size()) +
                     " lattice points)");

  std::vector<Eigen::VectorXd> columns(k, Eigen::VectorXd::Zero(lat.size()));
  std::vector<bool> seen(static_cast<std::size_t>(lat.size()), false);
  GridIndex idx(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j)
      idx[j] = lookup[j].at(table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
    const Eigen::Index flat = lat.flat(idx);
    if (seen[static_cast<std::size_t>(flat)])
      throw InputError(path + ": row " + std::to_string(r + 2) + " duplicates a grid point");
    seen[static_cast<std::size_t>(flat)] = true;
    for (std::size_t j = 0; j < k; ++j)
      columns[j][flat] = table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d + j));
  }
  return GriddedTable{std::move(lat), std::move(columns)};
}

std::string grid_header(int d, const std::vector<std::string>& value_headers) {
  std::string h;
  for (int j = 0; j < d; ++j) h += "axis" + std::to_string(j + 1) + ",";
  for (std::size_t j = 0; j < value_headers.size(); ++j) {
    h += value_headers[j];
    h += (j + 1 < value_headers.size()) ? "," : "\n";
  }
  return h;
}

std::string gridded_body(const Lattice& lat,
                         const std::vector<const Eigen::VectorXd*>& cols) {
  std::string out;
  for (Eigen::Index i = 0; i < lat.size(); ++i) {
    const Eigen::VectorXd p = lat.point(i);
    for (Eigen::Index j = 0; j < p.size(); ++j) out += format_double(p[j]) + ",";
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out += format_double((*cols[c])[i]);
      out += (c + 1 < cols.size()) ? "," : "\n";
    }
  }
  return out;
}

}  // namespace

GridFunction read_grid_csv(const std::string& path) {
  auto t = read_gridded(path, {"value"});
  return GridFunction(std::move(t.lattice), std::move(t.columns[0]));
}

void write_grid_csv(const std::string& path, const GridFunction& f) {
  std::string out = grid_header(f.lattice().dims(), {"value"});
  out += gridded_body(f.lattice(), {&f.values()});
  atomic_write_file(path, out);
}

Band read_band_csv(const std::string& path, double level) {
  auto t = read_gridded(path, {"lower", "upper"});
  if (((t.columns[1] - t.columns[0]).array() < 0.0).any())
    throw InputError(path + ": lower exceeds upper at some grid point");
  return Band(GridFunction(t.lattice, std::move(t.columns[0])),
              GridFunction(t.lattice, std::move(t.columns[1])), level);
}

void write_band_csv(const std::string& path, const Band& b) {
  std::string out = grid_header(b.lattice().dims(), {"lower", "upper"});
  out += gridded_body(b.lattice(), {&b.lower().values(), &b.upper().values()});
  atomic_write_file(path, out);
}

std::vector<Eigen::VectorXd> read_points_csv(const std::string& path) {
  const auto rows = csv::read_table(path);
  const auto& header = rows[0];
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] != "axis" + std::to_string(j + 1))
      throw InputError(path + ": expected header column 'axis" + std::to_string(j + 1) +
                       "', got '" + header[j] + "'");
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw InputError(path + ": row " + std::to_string(r + 1) + " has wrong field count");
    Eigen::VectorXd p(static_cast<Eigen::Index>(header.size()));
    for (std::size_t c = 0; c < header.size(); ++c)
      p[static_cast<Eigen::Index>(c)] = csv::parse_double(rows[r][c], r + 1);
    pts.push_back(std::move(p));
  }
  return pts;
}

void write_point_values_csv(const std::string& path,
                            const std::vector<Eigen::VectorXd>& points,
                            const std::vector<double>& values) {
  if (points.size() != values.size())
    throw InputError("write_point_values_csv: size mismatch");
  const int d = points.empty() ? 0 : static_cast<int>(points[0].size());
  std::string out = grid_header(d, {"value"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (Eigen::Index j = 0; j < points[i].size(); ++j)
      out += format_double(points[i][j]) + ",";
    out += format_double(values[i]) + "\n";
  }
  atomic_write_file(path, out);
}

void write_influence_csv(const std::string& path, const Eigen::MatrixXd& influence) {
  std::string out = "obs";
  for (Eigen::Index t = 0; t < influence.cols(); ++t) out += ",p" + std::to_string(t);
  out += "\n";
  for (Eigen::Index i = 0; i < influence.rows(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index t = 0; t < influence.cols(); ++t)
      out += "," + format_double(influence(i, t));
    out += "\n";
  }
  atomic_write_file(path, out);
}

}  // namespace monoproj
