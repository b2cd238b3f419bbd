#pragma once

// Example generators: cyclides, classical surfaces, the Veronese surface and
// Cartan's isoparametric family, and the four reducible constructions in R^4.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liesphere/legendre.hpp"
#include "liesphere/lie_core.hpp"

namespace liesphere {

/// Immersion with a chosen unit normal.
struct SurfaceData {
  ImmersionOracle f;
  VectorField xi;

  LegendreMap lift() const { return lift_euclidean(f, xi); }
};

/// Standard chart of S^m: polar angles in [0.3, pi - 0.3], the last angle periodic.
Eigen::VectorXd sphere_chart(const Eigen::VectorXd& angles);
ParamDomain sphere_chart_domain(int m);

struct CyclideSpec {
  int p = 1;
  int q = 1;
  int n = 3;

  static CyclideSpec make(int p, int q, int n);
};

/// Lines [e_1 + u, v + e_{n+3}] over S^q x S^p; the sphere [e_1 + u] has multiplicity p.
LegendreMap cyclide(const CyclideSpec& spec);

/// Torus of revolution with the inward tube normal; u, v both periodic.
SurfaceData torus(double a, double b);
/// (a sin t cos s, b sin t sin s, c cos t) with the inward normal, t in [0.2, pi - 0.2].
SurfaceData ellipsoid(double a, double b, double c);
SurfaceData plane_patch();

/// The same surface restricted (or extended) to another parameter box.
SurfaceData with_domain(SurfaceData s, ParamDomain domain);

/// torus(a, b) on the outer band |v| <= 1, where no principal curvature vanishes.
SurfaceData torus_outer_patch(double a, double b);

Eigen::VectorXd veronese_affine(const Eigen::Vector3d& y);
/// sqrt(3/2) (y y^T - I/3) under the isometry of trace-free symmetric 3x3 matrices with R^5.
Eigen::VectorXd veronese_spherical(const Eigen::Vector3d& y);

/// Spherical Veronese surface over the chart y = (sin a cos b, sin a sin b, cos a),
/// with the orthonormal normal frame nu1, nu2 inside S^4.
struct VeroneseSurface {
  ImmersionOracle phi;
  VectorField nu1;
  VectorField nu2;
};
VeroneseSurface veronese_surface();

struct VeroneseFrame {
  Eigen::Matrix3d A;
  std::array<Eigen::VectorXd, 3> F;
  Eigen::VectorXd G12, G23, G31;
};

struct FrameSolution {
  VeroneseFrame frame;
  Eigen::VectorXd Y3, Y4, Y5, Z3, Z4, Z5;
};

/// Requires A^T A = I to 1e-10 and det A > 0.
FrameSolution f_frames(const Eigen::Matrix3d& A);

/// (theta_1, theta_2, theta_3) = (alpha_23, alpha_31, alpha_12) for dA = Omega A.
Eigen::Vector3d maurer_cartan_theta(const Eigen::Matrix3d& omega);

struct CartanHypersurface {
  double t = 0.0;
  ImmersionOracle point;  // cos t V + sin t nu over (a, b, theta)
  VectorField normal;     // -sin t V + cos t nu
  LegendreMap map;
};

/// Tube of radius t over the spherical Veronese surface; principal curvatures cot(k pi/3 - t).
/// Throws degenerate-tube when t is a multiple of pi/3.
CartanHypersurface cartan_hypersurface(double t);

/// The three points -sin(k pi/3 - t) e_1 + cos(k pi/3 - t) e_7, each orthogonal to one
/// curvature-sphere family.
std::array<LieVector, 3> cartan_orthogonal_points(double t);

/// W_1 = 2 e_7 and W_2 = sqrt(3) e_1 + e_7 in R^7_2.
std::array<LieVector, 2> reference_timelike_pair();

enum class PinkallKind { Cylinder, Revolution, Cone, Tube };
std::string_view to_string(PinkallKind k);
PinkallKind parse_pinkall_kind(const std::string& s);

struct PinkallParams {
  double cylinder_half_length = 1.0;
  double revolution_shift = 3.0;  // translation along the third axis before revolving
  double cone_min = 0.5;
  double cone_max = 1.5;
  double tube_radius = 0.2;
};

/// Hypersurface of R^4 built from a surface in R^3.
SurfaceData pinkall_construction(PinkallKind kind, const SurfaceData& s, const PinkallParams& params = {});

struct CyclideEquivalence {
  LieTransform g;
  double membership_residual = 0.0;
};

/// Lie transform carrying the focal subspace pair of c1 onto that of c2.
CyclideEquivalence cyclide_equivalence(const LegendreMap& c1, const std::vector<Eigen::VectorXd>& samples1,
                                       const LegendreMap& c2, const std::vector<Eigen::VectorXd>& samples2);

/// Generator id with its parameters, e.g. "torus:a=2,b=1" or "ellipsoid:1,2,3".
struct GeneratorSpec {
  std::string name;
  std::map<std::string, double> params;
  std::vector<double> positional;
  std::string text;
};

GeneratorSpec parse_generator(const std::string& text);

struct Generated {
  std::string name;
  LegendreMap map;
  std::optional<SurfaceData> euclidean;  // codimension-one Euclidean source, when there is one
  std::vector<int> default_grid;
  std::map<std::string, double> params;  // resolved parameters
};

/// Throws invalid-argument for unknown names.
Generated make_generator(const GeneratorSpec& spec);
std::vector<std::string> generator_names();

}  // namespace liesphere
