#include "liesphere/legendre.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numbers>

#include "liesphere/numerics.hpp"

namespace liesphere {

ParamDomain ParamDomain::box(Eigen::VectorXd lo, Eigen::VectorXd hi, std::vector<bool> periodic) {
  if (lo.size() != hi.size() || lo.size() == 0) throw Error(ErrorKind::InvalidArgument, "domain bounds mismatch");
  if (periodic.empty()) periodic.assign(static_cast<std::size_t>(lo.size()), false);
  if (periodic.size() != static_cast<std::size_t>(lo.size())) {
    throw Error(ErrorKind::InvalidArgument, "periodic flags mismatch");
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) throw Error(ErrorKind::InvalidArgument, "empty domain");
  }
  return ParamDomain{std::move(lo), std::move(hi), std::move(periodic)};
}

double ParamDomain::extent() const { return (hi - lo).maxCoeff(); }

bool ParamDomain::contains(const Eigen::VectorXd& b) const {
  if (b.size() != lo.size()) return false;
  const double slack = 1e-12 * extent();
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (!std::isfinite(b[i])) return false;
    if (periodic[static_cast<std::size_t>(i)]) continue;
    if (b[i] < lo[i] - slack || b[i] > hi[i] + slack) return false;
  }
  return true;
}

Eigen::VectorXd ParamDomain::wrap(const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = b;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (!periodic[static_cast<std::size_t>(i)]) continue;
    const double period = hi[i] - lo[i];
    double r = std::fmod(b[i] - lo[i], period);
    if (r < 0) r += period;
    out[i] = lo[i] + r;
  }
  return out;
}

std::vector<Eigen::VectorXd> ParamDomain::interior_grid(int per_axis) const {
  const int k = dim();
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Eigen::VectorXd b(k);
    for (int i = 0; i < k; ++i) {
      b[i] = lo[i] + (idx[static_cast<std::size_t>(i)] + 0.5) / per_axis * (hi[i] - lo[i]);
    }
    pts.push_back(std::move(b));
    int i = k - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == per_axis) {
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return pts;
}

double ImmersionOracle::step() const { return fd_step > 0 ? fd_step : 1e-4 * domain.extent(); }

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::EuclideanLift: return "euclidean-lift";
    case Provenance::SphericalLift: return "spherical-lift";
    case Provenance::NormalBundleLift: return "normal-bundle-lift";
    case Provenance::ZooAnalytic: return "zoo-analytic";
    case Provenance::Transformed: return "transformed";
  }
  return "unknown";
}

LegendreMap::LegendreMap(int chart_dim, ParamDomain domain, LineFn line, Provenance provenance, double fd_step)
    : chart_dim_(chart_dim),
      domain_(std::move(domain)),
      line_(std::move(line)),
      provenance_(provenance),
      fd_step_(fd_step > 0 ? fd_step : 1e-4 * domain_.extent()) {}

namespace {

Eigen::VectorXd center_of(const ParamDomain& d) { return 0.5 * (d.lo + d.hi); }

double min_over_max_sv(const Eigen::MatrixXd& d) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0.0;
  return s[s.size() - 1] / s[0];
}

// Shared checks for lifts of hypersurfaces: regular differential, unit normal
// orthogonal to the image (and to the point itself on the sphere).
void validate_hypersurface(const ImmersionOracle& f, const VectorField& normal, const LiftOptions& opts,
                           bool spherical) {
  for (const auto& b : f.domain.interior_grid(opts.samples_per_axis)) {
    const Eigen::VectorXd x = f.eval(b);
    if (spherical && std::abs(x.norm() - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidArgument, "immersion does not lie on the unit sphere");
    }
    const Eigen::MatrixXd df = fd_jacobian(f.eval, b, f.step());
    if (df.cols() != x.size() - (spherical ? 2 : 1)) {
      throw Error(ErrorKind::InvalidArgument, "immersion is not of codimension one");
    }
    if (min_over_max_sv(df) < 1e-8) throw Error(ErrorKind::NotAnImmersion, "rank-deficient differential");
    const Eigen::VectorXd xi = normal(b);
    if (xi.size() != x.size()) throw Error(ErrorKind::InvalidArgument, "normal has the wrong dimension");
    if (std::abs(xi.norm() - 1.0) > opts.normal_tol) throw Error(ErrorKind::NotANormalField, "normal is not unit");
    const Eigen::VectorXd unit = xi.normalized();
    for (Eigen::Index j = 0; j < df.cols(); ++j) {
      if (std::abs(unit.dot(df.col(j))) > opts.normal_tol * df.col(j).norm()) {
        throw Error(ErrorKind::NotANormalField, "normal is not orthogonal to the tangent space");
      }
    }
    if (spherical && std::abs(unit.dot(x)) > opts.normal_tol) {
      throw Error(ErrorKind::NotANormalField, "normal is not tangent to the sphere");
    }
  }
}

}  // namespace

LegendreMap lift_euclidean(ImmersionOracle f, VectorField xi, const LiftOptions& opts) {
  if (opts.validate) validate_hypersurface(f, xi, opts, false);
  const int n = static_cast<int>(f.eval(center_of(f.domain)).size());
  auto line = [eval = f.eval, xi, n](const Eigen::VectorXd& b) {
    const Eigen::VectorXd x = eval(b);
    const Eigen::VectorXd nu = xi(b).normalized();
    const double xx = x.squaredNorm();
    const double h = x.dot(nu);
    Eigen::VectorXd y1 = Eigen::VectorXd::Zero(n + 3);
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(n + 3);
    y1[0] = (1.0 + xx) / 2.0;
    y1[1] = (1.0 - xx) / 2.0;
    y1.segment(2, n) = x;
    y2[0] = h;
    y2[1] = -h;
    y2.segment(2, n) = nu;
    y2[n + 2] = 1.0;
    return LieLine{LieVector(std::move(y1)), LieVector(std::move(y2))};
  };
  LegendreMap map(n, f.domain, std::move(line), Provenance::EuclideanLift, f.step());
  map.set_euclidean_source(EuclideanSource{std::move(f), std::move(xi)});
  return map;
}

LegendreMap lift_spherical(ImmersionOracle phi, VectorField eta, const LiftOptions& opts) {
  if (opts.validate) validate_hypersurface(phi, eta, opts, true);
  const int n = static_cast<int>(phi.eval(center_of(phi.domain)).size()) - 1;
  auto line = [eval = phi.eval, eta, n](const Eigen::VectorXd& b) {
    Eigen::VectorXd y1 = Eigen::VectorXd::Zero(n + 3);
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(n + 3);
    y1[0] = 1.0;
    y1.segment(1, n + 1) = eval(b);
    y2.segment(1, n + 1) = eta(b).normalized();
    y2[n + 2] = 1.0;
    return LieLine{LieVector(std::move(y1)), LieVector(std::move(y2))};
  };
  return LegendreMap(n, phi.domain, std::move(line), Provenance::SphericalLift, phi.step());
}

LegendreMap lift_normal_bundle_s4(ImmersionOracle phi, VectorField nu1, VectorField nu2, const LiftOptions& opts) {
  const int n = static_cast<int>(phi.eval(center_of(phi.domain)).size()) - 1;
  const int k = phi.domain.dim();
  if (k != n - 2) throw Error(ErrorKind::InvalidArgument, "normal-bundle lift needs a codimension-two surface");
  if (opts.validate) {
    for (const auto& b : phi.domain.interior_grid(opts.samples_per_axis)) {
      const Eigen::VectorXd x = phi.eval(b);
      const Eigen::VectorXd a = nu1(b);
      const Eigen::VectorXd c = nu2(b);
      Eigen::MatrixXd frame(x.size(), 3);
      frame << x, a, c;
      const double err = (frame.transpose() * frame - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
      if (err > opts.normal_tol) throw Error(ErrorKind::InvalidFrame, "point and normal frame are not orthonormal");
      const Eigen::MatrixXd df = fd_jacobian(phi.eval, b, phi.step());
      if (min_over_max_sv(df) < 1e-8) throw Error(ErrorKind::NotAnImmersion, "rank-deficient differential");
      for (Eigen::Index j = 0; j < df.cols(); ++j) {
        const double s = opts.normal_tol * df.col(j).norm();
        if (std::abs(a.dot(df.col(j))) > s || std::abs(c.dot(df.col(j))) > s) {
          throw Error(ErrorKind::InvalidFrame, "normal frame is not normal to the surface");
        }
      }
    }
  }
  Eigen::VectorXd lo(k + 1);
  Eigen::VectorXd hi(k + 1);
  lo << phi.domain.lo, 0.0;
  hi << phi.domain.hi, 2.0 * std::numbers::pi;
  std::vector<bool> periodic = phi.domain.periodic;
  periodic.push_back(true);
  auto line = [eval = phi.eval, nu1, nu2, n, k](const Eigen::VectorXd& b) {
    const Eigen::VectorXd u = b.head(k);
    const double th = b[k];
    Eigen::VectorXd y1 = Eigen::VectorXd::Zero(n + 3);
    Eigen::VectorXd y2 = Eigen::VectorXd::Zero(n + 3);
    y1[0] = 1.0;
    y1.segment(1, n + 1) = eval(u);
    y2.segment(1, n + 1) = std::cos(th) * nu1(u) + std::sin(th) * nu2(u);
    y2[n + 2] = 1.0;
    return LieLine{LieVector(std::move(y1)), LieVector(std::move(y2))};
  };
  auto domain = ParamDomain::box(lo, hi, periodic);
  return LegendreMap(n, domain, std::move(line), Provenance::NormalBundleLift, phi.step());
}

LegendreMap transformed(const LegendreMap& map, const LieTransform& g) {
  if (g.chart_dim() != map.chart_dim()) throw Error(ErrorKind::InvalidArgument, "transform dimension mismatch");
  auto line = [map, g](const Eigen::VectorXd& b) { return apply_line(g, map.line_at(b)); };
  return LegendreMap(map.chart_dim(), map.domain(), std::move(line), Provenance::Transformed, map.fd_step());
}

ProjectionFrame ProjectionFrame::standard(ProjectionKind kind, int chart_dim) {
  return ProjectionFrame{kind, Eigen::MatrixXd::Identity(chart_dim + 3, chart_dim + 3), 0.0};
}

ProjectionFrame ProjectionFrame::from_transform(ProjectionKind kind, const LieTransform& g) {
  return ProjectionFrame{kind, g.matrix(), 0.0};
}

ProjectionFrame ProjectionFrame::rotated(ProjectionKind kind, int chart_dim, double t) {
  ProjectionFrame f = standard(kind, chart_dim);
  const int last = chart_dim + 2;
  f.basis(0, 0) = std::cos(t);
  f.basis(last, 0) = std::sin(t);
  f.basis(0, last) = -std::sin(t);
  f.basis(last, last) = std::cos(t);
  f.angle = t;
  return f;
}

Eigen::VectorXd ProjectionFrame::coords(const Eigen::VectorXd& y) const {
  const Eigen::MatrixXd j = metric(chart_dim());
  return j * (basis.transpose() * (j * y));
}

ProjectedPoint project_line(const LieLine& line, const ProjectionFrame& frame, double tol) {
  const int n = frame.chart_dim();
  if (line.chart_dim() != n) throw Error(ErrorKind::InvalidArgument, "frame dimension mismatch");
  const Eigen::VectorXd c1 = frame.coords(line.y1.coords());
  const Eigen::VectorXd c2 = frame.coords(line.y2.coords());
  const int last = n + 2;
  const bool euclid = frame.kind == ProjectionKind::Euclidean;

  // Row 0: e_{n+3} weight. Row 1: weight along e_1 - e_2 (Euclidean) or e_1 (spherical).
  Eigen::Matrix2d m;
  m(0, 0) = c1[last];
  m(0, 1) = c2[last];
  m(1, 0) = euclid ? c1[0] + c1[1] : c1[0];
  m(1, 1) = euclid ? c2[0] + c2[1] : c2[0];
  const double det = m.determinant();
  if (!(std::abs(det) > tol * c1.norm() * c2.norm())) {
    throw Error(ErrorKind::ProjectionSingular, "line meets the projection's singular set");
  }
  const Eigen::Matrix2d inv = m.inverse();
  const Eigen::Vector2d pc = inv * Eigen::Vector2d(0.0, 1.0);
  const Eigen::Vector2d qc = inv * Eigen::Vector2d(1.0, 0.0);
  const Eigen::VectorXd pf = pc[0] * c1 + pc[1] * c2;
  const Eigen::VectorXd qf = qc[0] * c1 + qc[1] * c2;

  ProjectedPoint out;
  if (euclid) {
    out.point = pf.segment(2, n);
    out.normal = qf.segment(2, n);
  } else {
    out.point = pf.segment(1, n + 1);
    out.normal = qf.segment(1, n + 1);
  }
  out.p_lie = frame.basis * pf;
  out.q_lie = frame.basis * qf;
  return out;
}

ProjectionJet projection_jet(const LegendreMap& map, const Eigen::VectorXd& b, const ProjectionFrame& frame) {
  ProjectionJet jet;
  jet.value = project_line(map.line_at(b), frame);
  const Eigen::Index a = jet.value.point.size();
  auto stacked = [&](const Eigen::VectorXd& x) {
    const ProjectedPoint p = project_line(map.line_at(x), frame);
    Eigen::VectorXd v(2 * a);
    v << p.point, p.normal;
    return v;
  };
  const Eigen::MatrixXd d = fd_jacobian(stacked, b, map.fd_step());
  jet.d_point = d.topRows(a);
  jet.d_normal = d.bottomRows(a);
  return jet;
}

double regularity_ratio(const ProjectionJet& jet) { return min_over_max_sv(jet.d_point); }

namespace {

ProjectedImmersion make_projection(const LegendreMap& map, const ProjectionFrame& frame) {
  auto point = [map, frame](const Eigen::VectorXd& b) { return project_line(map.line_at(b), frame).point; };
  auto normal = [map, frame](const Eigen::VectorXd& b) { return project_line(map.line_at(b), frame).normal; };
  ImmersionOracle f{point, map.domain(), map.fd_step(), normal};
  return ProjectedImmersion{std::move(f), std::move(normal)};
}

}  // namespace

ProjectedImmersion euclidean_projection(const LegendreMap& map, const ProjectionFrame& frame) {
  if (frame.kind != ProjectionKind::Euclidean) throw Error(ErrorKind::InvalidFrame, "expected a Euclidean frame");
  return make_projection(map, frame);
}

ProjectedImmersion euclidean_projection(const LegendreMap& map) {
  return make_projection(map, ProjectionFrame::standard(ProjectionKind::Euclidean, map.chart_dim()));
}

ProjectedImmersion spherical_projection(const LegendreMap& map, const ProjectionFrame& frame) {
  if (frame.kind != ProjectionKind::Spherical) throw Error(ErrorKind::InvalidFrame, "expected a spherical frame");
  return make_projection(map, frame);
}

ProjectedImmersion spherical_projection(const LegendreMap& map) {
  return make_projection(map, ProjectionFrame::standard(ProjectionKind::Spherical, map.chart_dim()));
}

std::vector<ProjectionFrame> candidate_frames(const LegendreMap& map) {
  const int n = map.chart_dim();
  std::vector<ProjectionFrame> out;
  if (map.provenance() == Provenance::EuclideanLift) {
    out.push_back(ProjectionFrame::standard(ProjectionKind::Euclidean, n));
  }
  out.push_back(ProjectionFrame::standard(ProjectionKind::Spherical, n));
  for (int k = 1; k < 8; ++k) out.push_back(ProjectionFrame::spherical_rotated(n, k * std::numbers::pi / 8.0));
  return out;
}

ProjectionFrame choose_frame(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples) {
  constexpr double kAccept = 1e-3;
  const auto candidates = candidate_frames(map);
  double best_ratio = -1.0;
  std::size_t best = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& b : samples) {
      double r = 0.0;
      try {
        r = regularity_ratio(projection_jet(map, b, candidates[c]));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ProjectionSingular) throw;
      }
      worst = std::min(worst, r);
      if (worst < kAccept && worst <= best_ratio) break;
    }
    if (worst >= kAccept) return candidates[c];
    if (worst > best_ratio) {
      best_ratio = worst;
      best = c;
    }
  }
  if (best_ratio <= 1e-8) throw Error(ErrorKind::ProjectionSingular, "no regular projection frame on the samples");
  return candidates[best];
}

LegendreResiduals legendre_residuals(const LegendreMap& map, const Eigen::VectorXd& b) {
  if (!map.domain().contains(b)) throw Error(ErrorKind::OutOfDomain, "parameter point outside the domain");
  const LieLine line = map.line_at(b);
  const Eigen::VectorXd& y1 = line.y1.coords();
  const Eigen::VectorXd& y2 = line.y2.coords();
  LegendreResiduals r;
  r.quadric1 = std::abs(lie_inner(y1, y1)) / y1.squaredNorm();
  r.quadric2 = std::abs(lie_inner(y2, y2)) / y2.squaredNorm();
  r.orthogonality = std::abs(lie_inner(y1, y2)) / (y1.norm() * y2.norm());
  auto first = [&map](const Eigen::VectorXd& x) { return Eigen::VectorXd(map.line_at(x).y1.coords()); };
  const Eigen::MatrixXd dy1 = fd_jacobian(first, b, map.fd_step());
  for (Eigen::Index j = 0; j < dy1.cols(); ++j) {
    r.contact = std::max(r.contact, std::abs(lie_inner(Eigen::VectorXd(dy1.col(j)), y2)));
  }
  const ProjectionFrame frame = map.provenance() == Provenance::EuclideanLift
                                    ? ProjectionFrame::standard(ProjectionKind::Euclidean, map.chart_dim())
                                    : choose_frame(map, {b});
  const ProjectionJet jet = projection_jet(map, b, frame);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jet.d_point);
  r.regularity_sv = svd.singularValues()[svd.singularValues().size() - 1];
  return r;
}

}  // namespace liesphere
