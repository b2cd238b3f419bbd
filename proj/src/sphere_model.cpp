#include "liesphere/sphere_model.hpp"

#include <cmath>

namespace liesphere {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const Eigen::VectorXd& v, int n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " has dimension " +
                                                std::to_string(v.size()) + ", expected " +
                                                std::to_string(n));
  }
}

}  // namespace

int element_dim(const SphereElement& e) {
  return std::visit(Overloaded{
                        [](const PointElement& p) { return static_cast<int>(p.u.size()); },
                        [](const InfinityElement&) { return 0; },
                        [](const SphereElementData& s) { return static_cast<int>(s.center.size()); },
                        [](const PlaneElement& p) { return static_cast<int>(p.normal.size()); },
                    },
                    e);
}

LieVector encode(const SphereElement& e, int n) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 3);
  std::visit(Overloaded{
                 [&](const PointElement& p) {
                   require_dim(p.u, n, "point");
                   const double uu = p.u.squaredNorm();
                   x[0] = (1.0 + uu) / 2.0;
                   x[1] = (1.0 - uu) / 2.0;
                   x.segment(2, n) = p.u;
                 },
                 [&](const InfinityElement&) {
                   x[0] = 1.0;
                   x[1] = -1.0;
                 },
                 [&](const SphereElementData& s) {
                   require_dim(s.center, n, "sphere center");
                   if (s.radius == 0.0) throw Error(ErrorKind::InvalidArgument, "sphere radius must be nonzero");
                   const double pp = s.center.squaredNorm();
                   const double rr = s.radius * s.radius;
                   x[0] = (1.0 + pp - rr) / 2.0;
                   x[1] = (1.0 - pp + rr) / 2.0;
                   x.segment(2, n) = s.center;
                   x[n + 2] = s.radius;
                 },
                 [&](const PlaneElement& p) {
                   require_dim(p.normal, n, "plane normal");
                   if (std::abs(p.normal.norm() - 1.0) > 1e-12) {
                     throw Error(ErrorKind::InvalidArgument, "plane normal must be a unit vector");
                   }
                   x[0] = p.offset;
                   x[1] = -p.offset;
                   x.segment(2, n) = p.normal;
                   x[n + 2] = 1.0;
                 },
             },
             e);
  return LieVector(std::move(x));
}

SphereElement decode(const LieVector& x, double tol) {
  if (x.is_zero() || !on_quadric(x, tol)) throw Error(ErrorKind::NotASphere, "point is not on the Lie quadric");
  const int n = x.chart_dim();
  const Eigen::VectorXd& c = x.coords();
  const double scale = c.cwiseAbs().maxCoeff();
  const double last = c[n + 2];
  const double sum12 = c[0] + c[1];
  const Eigen::VectorXd spatial = c.segment(2, n);

  if (std::abs(last) <= tol * scale) {
    if (std::abs(sum12) <= tol * scale) return InfinityElement{};
    return PointElement{spatial / sum12};
  }
  if (std::abs(sum12) <= tol * scale) {
    const Eigen::VectorXd normal = spatial / last;
    return PlaneElement{normal.normalized(), c[0] / last};
  }
  return SphereElementData{spatial / sum12, last / sum12};
}

bool oriented_contact_lie(const LieVector& k1, const LieVector& k2, double tol) {
  if (!on_quadric(k1, tol) || !on_quadric(k2, tol)) {
    throw Error(ErrorKind::InvalidArgument, "oriented_contact_lie: argument off the quadric");
  }
  return std::abs(lie_inner(k1, k2)) <= tol * k1.norm() * k2.norm();
}

namespace {

bool near(double a, double b, double tol, double scale) { return std::abs(a - b) <= tol * (1.0 + scale); }

struct EuclideanContact {
  double tol;

  bool operator()(const PointElement& a, const PointElement& b) const {
    return (a.u - b.u).norm() <= tol * (1.0 + a.u.norm() + b.u.norm());
  }
  bool operator()(const PointElement&, const InfinityElement&) const { return false; }
  bool operator()(const PointElement& a, const SphereElementData& s) const {
    return near((a.u - s.center).norm(), std::abs(s.radius), tol, a.u.norm() + s.center.norm() + std::abs(s.radius));
  }
  bool operator()(const PointElement& a, const PlaneElement& p) const {
    return near(a.u.dot(p.normal), p.offset, tol, a.u.norm() + std::abs(p.offset));
  }
  bool operator()(const InfinityElement&, const InfinityElement&) const { return true; }
  bool operator()(const InfinityElement&, const SphereElementData&) const { return false; }
  bool operator()(const InfinityElement&, const PlaneElement&) const { return true; }
  bool operator()(const SphereElementData& a, const SphereElementData& b) const {
    return near((a.center - b.center).norm(), std::abs(a.radius - b.radius), tol,
                a.center.norm() + b.center.norm() + std::abs(a.radius) + std::abs(b.radius));
  }
  bool operator()(const SphereElementData& s, const PlaneElement& p) const {
    return near(s.center.dot(p.normal), p.offset + s.radius, tol,
                s.center.norm() + std::abs(p.offset) + std::abs(s.radius));
  }
  bool operator()(const PlaneElement& a, const PlaneElement& b) const {
    return (a.normal - b.normal).norm() <= tol;
  }

  // Remaining orderings by symmetry.
  bool operator()(const InfinityElement& a, const PointElement& b) const { return (*this)(b, a); }
  bool operator()(const SphereElementData& a, const PointElement& b) const { return (*this)(b, a); }
  bool operator()(const PlaneElement& a, const PointElement& b) const { return (*this)(b, a); }
  bool operator()(const SphereElementData& a, const InfinityElement& b) const { return (*this)(b, a); }
  bool operator()(const PlaneElement& a, const InfinityElement& b) const { return (*this)(b, a); }
  bool operator()(const PlaneElement& a, const SphereElementData& b) const { return (*this)(b, a); }
};

}  // namespace

bool oriented_contact_euclidean(const SphereElement& e1, const SphereElement& e2, double tol) {
  return std::visit(EuclideanContact{tol}, e1, e2);
}

LieVector encode_spherical(const SphericalElement& e, int n) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 3);
  std::visit(Overloaded{
                 [&](const SphericalPoint& p) {
                   require_dim(p.x, n + 1, "spherical point");
                   if (std::abs(p.x.norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "point is not on S^n");
                   x[0] = 1.0;
                   x.segment(1, n + 1) = p.x;
                 },
                 [&](const SphericalSphere& s) {
                   require_dim(s.center, n + 1, "spherical center");
                   if (std::abs(s.center.norm() - 1.0) > 1e-9) {
                     throw Error(ErrorKind::InvalidArgument, "center is not on S^n");
                   }
                   x[0] = std::cos(s.radius);
                   x.segment(1, n + 1) = s.center;
                   x[n + 2] = std::sin(s.radius);
                 },
             },
             e);
  return LieVector(std::move(x));
}

Eigen::VectorXd stereographic(const Eigen::VectorXd& u) {
  const double uu = u.squaredNorm();
  Eigen::VectorXd x(u.size() + 1);
  x[0] = (1.0 - uu) / (1.0 + uu);
  x.tail(u.size()) = 2.0 * u / (1.0 + uu);
  return x;
}

SphereElement stereographic_inv(const Eigen::VectorXd& x, double tol) {
  if (std::abs(x.norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "point is not on S^n");
  const double denom = 1.0 + x[0];
  if (denom <= tol) return InfinityElement{};
  return PointElement{x.tail(x.size() - 1) / denom};
}

Eigen::VectorXd stereographic_differential(const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  const double s = 1.0 + u.squaredNorm();
  const double uw = u.dot(w);
  Eigen::VectorXd dx(u.size() + 1);
  dx[0] = -4.0 * uw / (s * s);
  dx.tail(u.size()) = (2.0 * w * s - 4.0 * u * uw) / (s * s);
  return dx;
}

}  // namespace liesphere
