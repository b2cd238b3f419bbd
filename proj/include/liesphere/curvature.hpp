#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "liesphere/legendre.hpp"
#include "liesphere/lie_core.hpp"

namespace liesphere {

inline constexpr double kClusterTol = 1e-4;

struct ShapeData {
  Eigen::MatrixXd first_form;  // g = df^T df in the coordinate frame
  Eigen::MatrixXd shape;       // A, with g A symmetrized
  Eigen::MatrixXd tangent;     // df, columns are the coordinate tangent vectors
  double asymmetry = 0.0;      // max |gA - (gA)^T| relative to max |gA|
};

/// A = -g^{-1} (df^T dxi) from the first derivatives of the point and normal maps.
ShapeData shape_from_jet(const Eigen::MatrixXd& d_point, const Eigen::MatrixXd& d_normal);

ShapeData shape_operator(const ImmersionOracle& f, const VectorField& xi, const Eigen::VectorXd& b);

/// Second-derivative route A = g^{-1} (xi . d^2 f); kept as an independent check.
ShapeData shape_operator_hessian(const ImmersionOracle& f, const VectorField& xi, const Eigen::VectorXd& b);

/// Columns C with C^T g C = I (C = L^{-T} for the Cholesky factor g = L L^T).
Eigen::MatrixXd orthonormal_tangent_frame(const Eigen::MatrixXd& first_form);

/// h_ij = <dY_{n+3}(E_j), Y_i> with Y_i = (f . e_i)(e_1 - e_2) + e_i over the
/// orthonormal tangent frame e = df C. Requires a Euclidean lift.
Eigen::MatrixXd lie_second_form(const LegendreMap& map, const Eigen::VectorXd& b);

struct CurvatureSphere {
  double r = 0.0;
  int multiplicity = 1;
  LieVector K;                     // r * Y1 + Y_{n+3} in the projection frame's normalization
  Eigen::MatrixXd principal_basis;  // parameter-space eigenvectors, one per column
};

struct CurvatureAnalysis {
  std::vector<CurvatureSphere> spheres;  // ascending r
  ProjectionFrame frame;
  Eigen::VectorXd eigenvalues;  // unclustered, ascending
  Eigen::MatrixXd first_form;
  Eigen::MatrixXd shape;
  double asymmetry = 0.0;
  bool stable = true;  // cluster count unchanged at half and double tolerance

  int g() const { return static_cast<int>(spheres.size()); }
};

/// Groups ascending eigenvalues whose consecutive gaps are within tol * (1 + |kappa|).
std::vector<std::vector<int>> cluster_eigenvalues(const Eigen::VectorXd& ascending, double tol);

CurvatureAnalysis curvature_spheres(const LegendreMap& map, const Eigen::VectorXd& b,
                                    const ProjectionFrame& frame, double cluster_tol = kClusterTol);
/// As above with a frame chosen by `choose_frame` at b.
CurvatureAnalysis curvature_spheres(const LegendreMap& map, const Eigen::VectorXd& b,
                                    double cluster_tol = kClusterTol);

/// (r1 - r3)(r2 - r4) / ((r1 - r4)(r2 - r3)) after sorting ascending.
double lie_curvature(std::array<double, 4> rs);

/// Cross-ratio of four points alpha*y1 + beta*y2 given by (alpha, beta).
double cross_ratio_on_line(const LieLine& line, const std::array<Eigen::Vector2d, 4>& coeffs);

/// Least-squares coefficients of x in the basis (y1, y2) of the line, and the relative residual.
Eigen::Vector2d line_coordinates(const LieLine& line, const LieVector& x, double* residual = nullptr);

double cross_ratio_of_points(const LieLine& line, const std::array<LieVector, 4>& points);

}  // namespace liesphere
