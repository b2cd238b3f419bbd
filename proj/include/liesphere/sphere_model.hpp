#pragma once

// Oriented spheres, planes and points of R^n u {oo} as points of the Lie quadric.
// Orientation: a positive signed radius means the sphere carries its inward normal.

#include <variant>

#include <Eigen/Dense>

#include "liesphere/lie_core.hpp"

namespace liesphere {

struct PointElement {
  Eigen::VectorXd u;
};

struct InfinityElement {};

struct SphereElementData {
  Eigen::VectorXd center;
  double radius = 1.0;  // signed, nonzero
};

struct PlaneElement {
  Eigen::VectorXd normal;  // unit
  double offset = 0.0;     // plane {u . normal = offset}
};

using SphereElement = std::variant<PointElement, InfinityElement, SphereElementData, PlaneElement>;

/// Point x of S^n (unit vector in R^{n+1}).
struct SphericalPoint {
  Eigen::VectorXd x;
};

/// Oriented sphere in S^n: center m on S^n, signed spherical radius rho in (-pi, pi).
struct SphericalSphere {
  Eigen::VectorXd center;
  double radius = 0.0;
};

using SphericalElement = std::variant<SphericalPoint, SphericalSphere>;

/// Dimension n of an element's ambient R^n; 0 for the point at infinity.
int element_dim(const SphereElement& e);

LieVector encode(const SphereElement& e, int n);
SphereElement decode(const LieVector& x, double tol = kQuadricTol);

bool oriented_contact_lie(const LieVector& k1, const LieVector& k2, double tol = kQuadricTol);
bool oriented_contact_euclidean(const SphereElement& e1, const SphereElement& e2, double tol = 1e-9);

/// Point x -> e_1 + x; sphere (m, rho) -> cos(rho) e_1 + m + sin(rho) e_{n+3}.
LieVector encode_spherical(const SphericalElement& e, int n);

/// Inverse stereographic map R^n -> S^n from the pole -e; u = 0 goes to +e.
/// The distinguished axis e is the first coordinate of R^{n+1}, so that
/// encode(Point u) and e_1 + stereographic(u) are the same projective point.
Eigen::VectorXd stereographic(const Eigen::VectorXd& u);

/// S^n -> R^n u {oo}; the pole -e goes to infinity.
SphereElement stereographic_inv(const Eigen::VectorXd& x, double tol = 1e-12);

/// Differential of `stereographic` at u applied to w.
Eigen::VectorXd stereographic_differential(const Eigen::VectorXd& u, const Eigen::VectorXd& w);

}  // namespace liesphere
