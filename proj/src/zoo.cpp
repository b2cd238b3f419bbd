#include "liesphere/zoo.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "liesphere/curvature.hpp"
#include "liesphere/dupin.hpp"
#include "liesphere/sphere_model.hpp"

namespace liesphere {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPolarMargin = 0.3;

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ParamDomain append_axis(const ParamDomain& d, double lo, double hi, bool periodic) {
  Eigen::VectorXd l(d.dim() + 1);
  Eigen::VectorXd h(d.dim() + 1);
  l << d.lo, lo;
  h << d.hi, hi;
  std::vector<bool> p = d.periodic;
  p.push_back(periodic);
  return ParamDomain::box(l, h, p);
}

Eigen::VectorXd pad(const Eigen::VectorXd& x, Eigen::Index size) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size);
  out.head(x.size()) = x;
  return out;
}

// Isometry from trace-free symmetric 3x3 matrices (Frobenius) onto R^5.
Eigen::VectorXd iota(const Eigen::Matrix3d& s) {
  const double r2 = std::sqrt(2.0);
  return vec({r2 * s(1, 2), r2 * s(2, 0), r2 * s(0, 1), (s(0, 0) - s(1, 1)) / r2,
              std::sqrt(1.5) * (s(0, 0) + s(1, 1))});
}

Eigen::Vector3d chart_y(double a, double b) {
  return {std::sin(a) * std::cos(b), std::sin(a) * std::sin(b), std::cos(a)};
}

// Orthonormal tangent pair of S^2 at chart_y(a, b).
std::pair<Eigen::Vector3d, Eigen::Vector3d> chart_tangents(double a, double b) {
  const Eigen::Vector3d y = chart_y(a, b);
  const Eigen::Vector3d a2(std::cos(a) * std::cos(b), std::cos(a) * std::sin(b), -std::sin(a));
  return {a2, y.cross(a2)};
}

Eigen::VectorXd veronese_nu1(double a, double b) {
  const auto [a2, a3] = chart_tangents(a, b);
  return iota(a2 * a2.transpose() - a3 * a3.transpose()) / std::sqrt(2.0);
}

Eigen::VectorXd veronese_nu2(double a, double b) {
  const auto [a2, a3] = chart_tangents(a, b);
  return iota(a2 * a3.transpose() + a3 * a2.transpose()) / std::sqrt(2.0);
}

ParamDomain veronese_domain() {
  return ParamDomain::box(vec({kPolarMargin, 0.0}), vec({kPi - kPolarMargin, 2.0 * kPi}), {false, true});
}

}  // namespace

Eigen::VectorXd sphere_chart(const Eigen::VectorXd& angles) {
  const Eigen::Index m = angles.size();
  Eigen::VectorXd x(m + 1);
  double s = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    x[i] = s * std::cos(angles[i]);
    s *= std::sin(angles[i]);
  }
  x[m] = s;
  return x;
}

ParamDomain sphere_chart_domain(int m) {
  Eigen::VectorXd lo(m);
  Eigen::VectorXd hi(m);
  std::vector<bool> periodic(static_cast<std::size_t>(m), false);
  for (int i = 0; i < m - 1; ++i) {
    lo[i] = kPolarMargin;
    hi[i] = kPi - kPolarMargin;
  }
  lo[m - 1] = 0.0;
  hi[m - 1] = 2.0 * kPi;
  periodic.back() = true;
  return ParamDomain::box(lo, hi, periodic);
}

CyclideSpec CyclideSpec::make(int p, int q, int n) {
  if (p < 1 || q < 1) throw Error(ErrorKind::InvalidArgument, "cyclide needs p, q >= 1");
  if (n != p + q + 1) throw Error(ErrorKind::InvalidArgument, "cyclide needs n = p + q + 1");
  return CyclideSpec{p, q, n};
}

LegendreMap cyclide(const CyclideSpec& spec) {
  const CyclideSpec s = CyclideSpec::make(spec.p, spec.q, spec.n);
  const ParamDomain du = sphere_chart_domain(s.q);
  const ParamDomain dv = sphere_chart_domain(s.p);
  Eigen::VectorXd lo(s.p + s.q);
  Eigen::VectorXd hi(s.p + s.q);
  lo << du.lo, dv.lo;
  hi << du.hi, dv.hi;
  std::vector<bool> periodic = du.periodic;
  periodic.insert(periodic.end(), dv.periodic.begin(), dv.periodic.end());
  const int n = s.n;
  auto line = [s, n](const Eigen::VectorXd& b) {
    Eigen::VectorXd y1 = Eigen::VectorXd::Zero(n + 3);
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(n + 3);
    y1[0] = 1.0;
    y1.segment(1, s.q + 1) = sphere_chart(b.head(s.q));
    y2.segment(s.q + 2, s.p + 1) = sphere_chart(b.tail(s.p));
    y2[n + 2] = 1.0;
    return LieLine{LieVector(std::move(y1)), LieVector(std::move(y2))};
  };
  return LegendreMap(n, ParamDomain::box(lo, hi, periodic), std::move(line), Provenance::ZooAnalytic);
}

SurfaceData torus(double a, double b) {
  if (!(b > 0) || !(a > b)) throw Error(ErrorKind::SelfIntersectingSpec, "torus needs a > b > 0");
  ImmersionOracle f;
  f.eval = [a, b](const Eigen::VectorXd& p) {
    const double r = a + b * std::cos(p[1]);
    return vec({r * std::cos(p[0]), r * std::sin(p[0]), b * std::sin(p[1])});
  };
  f.domain = ParamDomain::box(vec({0.0, 0.0}), vec({2.0 * kPi, 2.0 * kPi}), {true, true});
  VectorField xi = [](const Eigen::VectorXd& p) {
    return vec({-std::cos(p[1]) * std::cos(p[0]), -std::cos(p[1]) * std::sin(p[0]), -std::sin(p[1])});
  };
  f.normal = xi;
  return SurfaceData{std::move(f), std::move(xi)};
}

SurfaceData ellipsoid(double a, double b, double c) {
  if (!(a > 0) || !(b > 0) || !(c > 0)) throw Error(ErrorKind::InvalidArgument, "ellipsoid axes must be positive");
  ImmersionOracle f;
  f.eval = [a, b, c](const Eigen::VectorXd& p) {
    return vec({a * std::sin(p[0]) * std::cos(p[1]), b * std::sin(p[0]) * std::sin(p[1]), c * std::cos(p[0])});
  };
  f.domain = ParamDomain::box(vec({0.2, 0.0}), vec({kPi - 0.2, 2.0 * kPi}), {false, true});
  VectorField xi = [a, b, c](const Eigen::VectorXd& p) {
    const Eigen::VectorXd g = vec({std::sin(p[0]) * std::cos(p[1]) / a, std::sin(p[0]) * std::sin(p[1]) / b,
                                   std::cos(p[0]) / c});
    return Eigen::VectorXd(-g.normalized());
  };
  f.normal = xi;
  return SurfaceData{std::move(f), std::move(xi)};
}

SurfaceData plane_patch() {
  ImmersionOracle f;
  f.eval = [](const Eigen::VectorXd& p) { return vec({p[0], p[1], 0.0}); };
  f.domain = ParamDomain::box(vec({-1.0, -1.0}), vec({1.0, 1.0}));
  VectorField xi = [](const Eigen::VectorXd&) { return vec({0.0, 0.0, 1.0}); };
  f.normal = xi;
  return SurfaceData{std::move(f), std::move(xi)};
}

SurfaceData with_domain(SurfaceData s, ParamDomain domain) {
  if (domain.dim() != s.f.domain.dim()) throw Error(ErrorKind::InvalidArgument, "domain rank mismatch");
  s.f.domain = std::move(domain);
  return s;
}

SurfaceData torus_outer_patch(double a, double b) {
  return with_domain(torus(a, b), ParamDomain::box(vec({0.0, -1.0}), vec({2.0 * kPi, 1.0}), {true, false}));
}

Eigen::VectorXd veronese_affine(const Eigen::Vector3d& y) {
  if (std::abs(y.norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "Veronese argument must be a unit vector");
  return vec({2 * y[1] * y[2], 2 * y[2] * y[0], 2 * y[0] * y[1], y[0] * y[0], y[1] * y[1]});
}

Eigen::VectorXd veronese_spherical(const Eigen::Vector3d& y) {
  if (std::abs(y.norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "Veronese argument must be a unit vector");
  return iota(std::sqrt(1.5) * (y * y.transpose() - Eigen::Matrix3d::Identity() / 3.0));
}

VeroneseSurface veronese_surface() {
  VeroneseSurface v;
  v.phi.eval = [](const Eigen::VectorXd& p) { return veronese_spherical(chart_y(p[0], p[1])); };
  v.phi.domain = veronese_domain();
  v.nu1 = [](const Eigen::VectorXd& p) { return veronese_nu1(p[0], p[1]); };
  v.nu2 = [](const Eigen::VectorXd& p) { return veronese_nu2(p[0], p[1]); };
  return v;
}

FrameSolution f_frames(const Eigen::Matrix3d& A) {
  if ((A.transpose() * A - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10 || !(A.determinant() > 0)) {
    throw Error(ErrorKind::InvalidArgument, "f_frames needs a rotation matrix");
  }
  FrameSolution out;
  out.frame.A = A;
  for (int i = 0; i < 3; ++i) out.frame.F[static_cast<std::size_t>(i)] = veronese_affine(A.row(i).transpose());
  auto g = [&A](int i, int k) {
    return vec({2 * (A(i, 1) * A(k, 2) + A(i, 2) * A(k, 1)), 2 * (A(i, 0) * A(k, 2) + A(i, 2) * A(k, 0)),
                2 * (A(i, 0) * A(k, 1) + A(i, 1) * A(k, 0)), 2 * A(i, 0) * A(k, 0), 2 * A(i, 1) * A(k, 1)});
  };
  out.frame.G12 = g(0, 1);
  out.frame.G23 = g(1, 2);
  out.frame.G31 = g(2, 0);
  const auto& F = out.frame.F;
  out.Y3 = out.frame.G12;
  out.Y4 = -out.frame.G23;
  out.Y5 = out.frame.G31;
  out.Z3 = 2.0 * (F[1] - F[0]);
  out.Z4 = 2.0 * (F[2] - F[1]);
  out.Z5 = 2.0 * (F[0] - F[2]);
  return out;
}

Eigen::Vector3d maurer_cartan_theta(const Eigen::Matrix3d& omega) { return {omega(1, 2), omega(2, 0), omega(0, 1)}; }

CartanHypersurface cartan_hypersurface(double t) {
  const double third = kPi / 3.0;
  double r = std::fmod(t, third);
  if (r < 0) r += third;
  if (std::min(r, third - r) < 1e-6) {
    throw Error(ErrorKind::DegenerateTube, "tube radius is a multiple of pi/3; the tube collapses onto a Veronese surface");
  }
  const double ct = std::cos(t);
  const double st = std::sin(t);
  auto nu = [](const Eigen::VectorXd& p) {
    return Eigen::VectorXd(std::cos(p[2]) * veronese_nu1(p[0], p[1]) + std::sin(p[2]) * veronese_nu2(p[0], p[1]));
  };
  auto base = [](const Eigen::VectorXd& p) { return veronese_spherical(chart_y(p[0], p[1])); };
  VectorField point = [=](const Eigen::VectorXd& p) { return Eigen::VectorXd(ct * base(p) + st * nu(p)); };
  VectorField normal = [=](const Eigen::VectorXd& p) { return Eigen::VectorXd(-st * base(p) + ct * nu(p)); };
  const ParamDomain domain = append_axis(veronese_domain(), 0.0, 2.0 * kPi, true);

  auto line = [point, normal](const Eigen::VectorXd& p) {
    Eigen::VectorXd y1 = Eigen::VectorXd::Zero(7);
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(7);
    y1[0] = 1.0;
    y1.segment(1, 5) = point(p);
    y2.segment(1, 5) = normal(p);
    y2[6] = 1.0;
    return LieLine{LieVector(std::move(y1)), LieVector(std::move(y2))};
  };
  ImmersionOracle f{point, domain, 0.0, normal};
  return CartanHypersurface{t, f, normal, LegendreMap(4, domain, std::move(line), Provenance::ZooAnalytic)};
}

std::array<LieVector, 3> cartan_orthogonal_points(double t) {
  std::array<LieVector, 3> out;
  for (int k = 0; k < 3; ++k) {
    const double rho = k * kPi / 3.0 - t;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(7);
    p[0] = -std::sin(rho);
    p[6] = std::cos(rho);
    out[static_cast<std::size_t>(k)] = LieVector(std::move(p));
  }
  return out;
}

std::array<LieVector, 2> reference_timelike_pair() {
  Eigen::VectorXd w1 = Eigen::VectorXd::Zero(7);
  Eigen::VectorXd w2 = Eigen::VectorXd::Zero(7);
  w1[6] = 2.0;
  w2[0] = std::sqrt(3.0);
  w2[6] = 1.0;
  return {LieVector(std::move(w1)), LieVector(std::move(w2))};
}

std::string_view to_string(PinkallKind k) {
  switch (k) {
    case PinkallKind::Cylinder: return "cylinder";
    case PinkallKind::Revolution: return "revolution";
    case PinkallKind::Cone: return "cone";
    case PinkallKind::Tube: return "tube";
  }
  return "cylinder";
}

PinkallKind parse_pinkall_kind(const std::string& s) {
  if (s == "cylinder") return PinkallKind::Cylinder;
  if (s == "revolution") return PinkallKind::Revolution;
  if (s == "cone") return PinkallKind::Cone;
  if (s == "tube") return PinkallKind::Tube;
  throw Error(ErrorKind::InvalidArgument, "unknown construction '" + s + "'");
}

SurfaceData pinkall_construction(PinkallKind kind, const SurfaceData& s, const PinkallParams& params) {
  const auto f = s.f.eval;
  const auto unit_xi = [xi = s.xi](const Eigen::VectorXd& p) { return Eigen::VectorXd(xi(p).normalized()); };
  const ParamDomain& d = s.f.domain;
  const int k = d.dim();
  if (f(0.5 * (d.lo + d.hi)).size() != 3) throw Error(ErrorKind::InvalidConstruction, "base surface must lie in R^3");
  SurfaceData out;
  switch (kind) {
    case PinkallKind::Cylinder: {
      if (!(params.cylinder_half_length > 0)) throw Error(ErrorKind::InvalidConstruction, "empty cylinder");
      out.f.domain = append_axis(d, -params.cylinder_half_length, params.cylinder_half_length, false);
      out.f.eval = [f, k](const Eigen::VectorXd& p) {
        Eigen::VectorXd x(4);
        x << f(p.head(k)), p[k];
        return x;
      };
      out.xi = [unit_xi, k](const Eigen::VectorXd& p) { return pad(unit_xi(p.head(k)), 4); };
      break;
    }
    case PinkallKind::Revolution: {
      const double shift = params.revolution_shift;
      for (const auto& b : d.interior_grid(12)) {
        if (!(f(b)[2] + shift > 0)) {
          throw Error(ErrorKind::InvalidConstruction, "surface meets the plane of revolution");
        }
      }
      out.f.domain = append_axis(d, 0.0, 2.0 * kPi, true);
      out.f.eval = [f, k, shift](const Eigen::VectorXd& p) {
        const Eigen::VectorXd x = f(p.head(k));
        const double z = x[2] + shift;
        return vec({x[0], x[1], z * std::cos(p[k]), z * std::sin(p[k])});
      };
      out.xi = [unit_xi, k](const Eigen::VectorXd& p) {
        const Eigen::VectorXd n = unit_xi(p.head(k));
        return vec({n[0], n[1], n[2] * std::cos(p[k]), n[2] * std::sin(p[k])});
      };
      break;
    }
    case PinkallKind::Cone: {
      if (!(params.cone_min > 0) || !(params.cone_max > params.cone_min)) {
        throw Error(ErrorKind::InvalidConstruction, "cone needs 0 < min < max");
      }
      out.f.domain = append_axis(d, params.cone_min, params.cone_max, false);
      out.f.eval = [f, k](const Eigen::VectorXd& p) {
        return Eigen::VectorXd(p[k] * stereographic(f(p.head(k))));
      };
      out.xi = [f, unit_xi, k](const Eigen::VectorXd& p) {
        const Eigen::VectorXd b = p.head(k);
        return Eigen::VectorXd(stereographic_differential(f(b), unit_xi(b)).normalized());
      };
      break;
    }
    case PinkallKind::Tube: {
      const double eps = params.tube_radius;
      if (!(eps > 0)) throw Error(ErrorKind::InvalidConstruction, "tube radius must be positive");
      double kmax = 0.0;
      for (const auto& b : d.interior_grid(8)) {
        const ShapeData sd = shape_operator(s.f, s.xi, b);
        kmax = std::max(kmax, sd.shape.eigenvalues().cwiseAbs().maxCoeff());
      }
      if (!(eps * kmax < 1.0)) throw Error(ErrorKind::InvalidConstruction, "tube radius reaches the focal set");
      out.f.domain = append_axis(d, 0.2, 1.3, false);
      out.f.eval = [f, unit_xi, k, eps](const Eigen::VectorXd& p) {
        const Eigen::VectorXd b = p.head(k);
        Eigen::VectorXd x = pad(f(b), 4) + eps * std::cos(p[k]) * pad(unit_xi(b), 4);
        x[3] += eps * std::sin(p[k]);
        return x;
      };
      out.xi = [unit_xi, k](const Eigen::VectorXd& p) {
        Eigen::VectorXd n = std::cos(p[k]) * pad(unit_xi(p.head(k)), 4);
        n[3] = std::sin(p[k]);
        return n;
      };
      break;
    }
  }
  out.f.normal = out.xi;
  return out;
}

namespace {

// Columns v with <v_i, v_j> = +-delta_ij spanning the column space of basis; timelike first.
Eigen::MatrixXd adapted_basis(const Eigen::MatrixXd& basis, int* negatives) {
  const Eigen::MatrixXd j = metric(static_cast<int>(basis.rows()) - 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(basis.transpose() * j * basis);
  Eigen::MatrixXd out(basis.rows(), basis.cols());
  *negatives = 0;
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    const double lambda = es.eigenvalues()[i];
    if (std::abs(lambda) < 1e-8) throw Error(ErrorKind::TrackingLost, "focal subspace is degenerate");
    if (lambda < 0) ++*negatives;
    out.col(i) = basis * es.eigenvectors().col(i) / std::sqrt(std::abs(lambda));
  }
  return out;
}

Eigen::MatrixXd complement(const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd j = metric(static_cast<int>(basis.rows()) - 3);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.transpose() * j, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(basis.rows() - basis.cols());
}

Eigen::MatrixXd stack_columns(const std::vector<LieVector>& vs) {
  Eigen::MatrixXd m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i].coords();
  return m;
}

struct FocalPair {
  Eigen::MatrixXd e;      // Euclidean-orthonormal basis of the span of sphere `first`
  Eigen::MatrixXd e_perp;
  int first = 0;
  TrackedSpheres tracked;
};

FocalPair focal_pair(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples, int first) {
  FocalPair fp;
  fp.tracked = track_curvature_spheres(map, samples);
  if (fp.tracked.K.size() != 2) throw Error(ErrorKind::NotEquivalent, "a cyclide has exactly two curvature spheres");
  fp.first = first;
  const SpanSummary s = span_summary(fp.tracked.K[static_cast<std::size_t>(first)]);
  fp.e = stack_columns(s.basis);
  fp.e_perp = complement(fp.e);
  return fp;
}

double subspace_residual(const Eigen::MatrixXd& orthonormal, const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = x.normalized();
  return (u - orthonormal * (orthonormal.transpose() * u)).norm();
}

}  // namespace

CyclideEquivalence cyclide_equivalence(const LegendreMap& c1, const std::vector<Eigen::VectorXd>& samples1,
                                       const LegendreMap& c2, const std::vector<Eigen::VectorXd>& samples2) {
  if (c1.chart_dim() != c2.chart_dim()) throw Error(ErrorKind::NotEquivalent, "dimension mismatch");
  const FocalPair a = focal_pair(c1, samples1, 0);
  const auto& m1 = a.tracked.multiplicity;
  const TrackedSpheres t2 = track_curvature_spheres(c2, samples2);
  if (t2.multiplicity.size() != 2) throw Error(ErrorKind::NotEquivalent, "a cyclide has exactly two curvature spheres");
  int match = -1;
  for (int i = 0; i < 2 && match < 0; ++i) {
    if (t2.multiplicity[static_cast<std::size_t>(i)] == m1[0] &&
        t2.multiplicity[static_cast<std::size_t>(1 - i)] == m1[1]) {
      match = i;
    }
  }
  if (match < 0) throw Error(ErrorKind::NotEquivalent, "characteristics differ");
  const FocalPair b = focal_pair(c2, samples2, match);
  if (a.e.cols() != b.e.cols()) throw Error(ErrorKind::NotEquivalent, "focal span dimensions differ");

  int neg_a = 0, neg_b = 0, neg_ap = 0, neg_bp = 0;
  Eigen::MatrixXd fa(a.e.rows(), a.e.rows());
  Eigen::MatrixXd fb(b.e.rows(), b.e.rows());
  fa << adapted_basis(a.e, &neg_a), adapted_basis(a.e_perp, &neg_ap);
  fb << adapted_basis(b.e, &neg_b), adapted_basis(b.e_perp, &neg_bp);
  if (neg_a != neg_b || neg_ap != neg_bp) throw Error(ErrorKind::NotEquivalent, "focal span signatures differ");

  CyclideEquivalence out{LieTransform::from_matrix(fb * fa.inverse(), 1e-8), 0.0};
  const Eigen::MatrixXd& g = out.g.matrix();
  for (int i = 0; i < 2; ++i) {
    const Eigen::MatrixXd& target = i == 0 ? b.e : b.e_perp;
    for (const auto& k : a.tracked.K[static_cast<std::size_t>(i)]) {
      out.membership_residual =
          std::max(out.membership_residual, subspace_residual(target, Eigen::VectorXd(g * k.coords())));
    }
  }
  return out;
}

GeneratorSpec parse_generator(const std::string& text) {
  GeneratorSpec spec;
  spec.text = text;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const std::size_t comma = rest.find(',', pos);
    const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      const auto eq = item.find('=');
      const std::string key = eq == std::string::npos ? "" : item.substr(0, eq);
      const std::string val = eq == std::string::npos ? item : item.substr(eq + 1);
      double x = 0.0;
      const auto res = std::from_chars(val.data(), val.data() + val.size(), x);
      if (res.ec != std::errc() || res.ptr != val.data() + val.size()) {
        throw Error(ErrorKind::InvalidArgument, "bad generator parameter '" + item + "'");
      }
      if (key.empty()) {
        spec.positional.push_back(x);
      } else {
        spec.params[key] = x;
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return spec;
}

namespace {

double param(const GeneratorSpec& spec, const std::string& key, std::size_t position, double fallback) {
  if (auto it = spec.params.find(key); it != spec.params.end()) return it->second;
  if (position < spec.positional.size()) return spec.positional[position];
  return fallback;
}

Generated from_surface(const std::string& name, const SurfaceData& s, std::vector<int> grid,
                       std::map<std::string, double> params) {
  return Generated{name, s.lift(), s, std::move(grid), std::move(params)};
}

}  // namespace

std::vector<std::string> generator_names() {
  return {"torus",           "ellipsoid",   "sphere",           "plane",        "cyclide", "cartan",
          "veronese-bundle", "pinkall-cylinder", "pinkall-revolution", "pinkall-cone", "pinkall-tube"};
}

Generated make_generator(const GeneratorSpec& spec) {
  const std::string& name = spec.name;
  if (name == "torus") {
    const double a = param(spec, "a", 0, 2.0);
    const double b = param(spec, "b", 1, 1.0);
    return from_surface(name, torus(a, b), {20, 20}, {{"a", a}, {"b", b}});
  }
  if (name == "ellipsoid") {
    const double a = param(spec, "a", 0, 1.0);
    const double b = param(spec, "b", 1, 2.0);
    const double c = param(spec, "c", 2, 3.0);
    return from_surface(name, ellipsoid(a, b, c), {12, 12}, {{"a", a}, {"b", b}, {"c", c}});
  }
  if (name == "sphere") {
    const double r = param(spec, "r", 0, 1.0);
    return from_surface(name, ellipsoid(r, r, r), {8, 8}, {{"r", r}});
  }
  if (name == "plane") return from_surface(name, plane_patch(), {5, 5}, {});
  if (name == "cyclide") {
    const int p = static_cast<int>(param(spec, "p", 0, 1.0));
    const int q = static_cast<int>(param(spec, "q", 1, 1.0));
    const int n = static_cast<int>(param(spec, "n", 2, p + q + 1));
    const CyclideSpec cs = CyclideSpec::make(p, q, n);
    return Generated{name, cyclide(cs), std::nullopt, std::vector<int>(static_cast<std::size_t>(p + q), 8),
                     {{"p", p}, {"q", q}, {"n", n}}};
  }
  if (name == "cartan") {
    const double t = param(spec, "t", 0, kPi / 6.0);
    return Generated{name, cartan_hypersurface(t).map, std::nullopt, {10, 10, 10}, {{"t", t}}};
  }
  if (name == "veronese-bundle") {
    const VeroneseSurface v = veronese_surface();
    return Generated{name, lift_normal_bundle_s4(v.phi, v.nu1, v.nu2), std::nullopt, {10, 10, 10}, {}};
  }
  if (name.rfind("pinkall-", 0) == 0) {
    const PinkallKind kind = parse_pinkall_kind(name.substr(8));
    const double a = param(spec, "a", 99, 2.0);
    const double b = param(spec, "b", 99, 1.0);
    PinkallParams pp;
    pp.tube_radius = param(spec, "radius", 99, pp.tube_radius);
    pp.revolution_shift = param(spec, "shift", 99, pp.revolution_shift);
    std::map<std::string, double> resolved{{"a", a}, {"b", b}};
    if (kind == PinkallKind::Tube) resolved["radius"] = pp.tube_radius;
    if (kind == PinkallKind::Revolution) resolved["shift"] = pp.revolution_shift;
    return from_surface(name, pinkall_construction(kind, torus_outer_patch(a, b), pp), {8, 8, 4}, resolved);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown generator '" + name + "'");
}

}  // namespace liesphere
