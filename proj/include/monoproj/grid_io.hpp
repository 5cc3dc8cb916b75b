#pragma once

#include <string>
#include <vector>

#include "monoproj/bands.hpp"
#include "monoproj/lattice.hpp"

namespace monoproj {

// Shortest-exact formatting for doubles (%.17g); all CSV output goes through
// this so repeated runs are byte-identical.
std::string format_double(double x);

// Writes content to a temp file in the target directory and renames it into
// place; partial outputs are never visible.
void atomic_write_file(const std::string& path, const std::string& content);

namespace csv {

// Whole-file CSV split into trimmed cells. Throws InputError on empty files.
std::vector<std::vector<std::string>> read_table(const std::string& path);

double parse_double(const std::string& cell, std::size_t row);

}  // namespace csv

// Grid file: header axis1,...,axisd,value, one row per lattice point. The
// reader accepts any row order but requires the rows to form a full
// rectangular lattice with strictly increasing axes; duplicates and gaps are
// structural errors.
GridFunction read_grid_csv(const std::string& path);
void write_grid_csv(const std::string& path, const GridFunction& f);

// Band file: header axis1,...,axisd,lower,upper.
Band read_band_csv(const std::string& path, double level);
void write_band_csv(const std::string& path, const Band& b);

// Points file: header axis1,...,axisd; one evaluation point per row.
std::vector<Eigen::VectorXd> read_points_csv(const std::string& path);

// Points plus one value column.
void write_point_values_csv(const std::string& path,
                            const std::vector<Eigen::VectorXd>& points,
                            const std::vector<double>& values);

// Influence matrix: first column obs (row index), then one column per grid
// point labelled p0..p{m-1}.
void write_influence_csv(const std::string& path, const Eigen::MatrixXd& influence);

}  // namespace monoproj
