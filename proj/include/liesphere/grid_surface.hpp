#pragma once

// Hypersurfaces given as sampled grids. File format (plain text, '#' starts a comment):
//   n k size_1 ... size_k
//   then size_1 * ... * size_k rows "b_1 ... b_k x_1 ... x_n", last axis fastest.
// The grid is interpolated by a tensor-product natural cubic spline and the
// normal is the normalized generalized cross product of the partials.

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liesphere/zoo.hpp"

namespace liesphere {

struct SampledGrid {
  int n = 0;                                  // ambient dimension
  std::vector<std::vector<double>> axes;      // strictly increasing knots per parameter axis
  std::vector<Eigen::VectorXd> positions;     // row-major, last axis fastest
};

SampledGrid read_grid(std::istream& in);
SampledGrid read_grid_file(const std::string& path);

/// Samples f on the tensor grid of `axes` (used for tests and round trips).
SampledGrid sample_grid(const ImmersionOracle& f, std::vector<std::vector<double>> axes);
void write_grid(std::ostream& out, const SampledGrid& grid);

/// Throws invalid-argument unless k = n - 1 and every axis has at least 3 knots.
SurfaceData grid_surface(const SampledGrid& grid);

/// Generalized cross product of the n - 1 columns of an n x (n-1) matrix.
Eigen::VectorXd generalized_cross(const Eigen::MatrixXd& columns);

}  // namespace liesphere
