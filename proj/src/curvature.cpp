#include "liesphere/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "liesphere/numerics.hpp"

namespace liesphere {

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void require_regular(const Eigen::MatrixXd& d_point) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d_point);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s[s.size() - 1] > 1e-8 * s[0])) {
    throw Error(ErrorKind::NotAnImmersion, "rank-deficient differential");
  }
}

ShapeData finish_shape(const Eigen::MatrixXd& tangent, const Eigen::MatrixXd& s) {
  ShapeData out;
  out.tangent = tangent;
  out.first_form = symmetrize(tangent.transpose() * tangent);
  const double scale = std::max(s.cwiseAbs().maxCoeff(), 1e-300);
  out.asymmetry = (s - s.transpose()).cwiseAbs().maxCoeff() / scale;
  if (s.cwiseAbs().maxCoeff() == 0.0) out.asymmetry = 0.0;
  out.shape = out.first_form.ldlt().solve(symmetrize(s));
  return out;
}

}  // namespace

ShapeData shape_from_jet(const Eigen::MatrixXd& d_point, const Eigen::MatrixXd& d_normal) {
  require_regular(d_point);
  return finish_shape(d_point, -(d_point.transpose() * d_normal));
}

ShapeData shape_operator(const ImmersionOracle& f, const VectorField& xi, const Eigen::VectorXd& b) {
  const double h = f.step();
  const Eigen::MatrixXd df = fd_jacobian(f.eval, b, h);
  auto unit = [&xi](const Eigen::VectorXd& x) { return Eigen::VectorXd(xi(x).normalized()); };
  const Eigen::MatrixXd dxi = fd_jacobian(unit, b, h);
  return shape_from_jet(df, dxi);
}

ShapeData shape_operator_hessian(const ImmersionOracle& f, const VectorField& xi, const Eigen::VectorXd& b) {
  const double h = f.step();
  const Eigen::MatrixXd df = fd_jacobian(f.eval, b, h);
  require_regular(df);
  // Second differences lose two orders to rounding; a wider stencil keeps them accurate.
  const auto hess = fd_hessians(f.eval, b, 10.0 * h);
  const Eigen::VectorXd nu = xi(b).normalized();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(df.cols(), df.cols());
  for (std::size_t c = 0; c < hess.size(); ++c) s += nu[static_cast<Eigen::Index>(c)] * hess[c];
  return finish_shape(df, s);
}

Eigen::MatrixXd orthonormal_tangent_frame(const Eigen::MatrixXd& first_form) {
  Eigen::LLT<Eigen::MatrixXd> llt(first_form);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::NotAnImmersion, "first fundamental form is not definite");
  const Eigen::MatrixXd l = llt.matrixL();
  return l.transpose().triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(first_form.rows(), first_form.cols()));
}

Eigen::MatrixXd lie_second_form(const LegendreMap& map, const Eigen::VectorXd& b) {
  if (map.provenance() != Provenance::EuclideanLift || !map.euclidean_source()) {
    throw Error(ErrorKind::UnsupportedProvenance, "lie_second_form needs a Euclidean lift");
  }
  const EuclideanSource& src = *map.euclidean_source();
  const int n = map.chart_dim();
  const double h = map.fd_step();
  const Eigen::VectorXd x = src.f.eval(b);
  const Eigen::MatrixXd df = fd_jacobian(src.f.eval, b, h);
  require_regular(df);
  const Eigen::MatrixXd c = orthonormal_tangent_frame(df.transpose() * df);
  const Eigen::MatrixXd e = df * c;
  auto y2 = [&map](const Eigen::VectorXd& p) { return Eigen::VectorXd(map.line_at(p).y2.coords()); };
  const Eigen::MatrixXd dy2 = fd_jacobian(y2, b, h) * c;

  const Eigen::Index k = df.cols();
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::VectorXd yi = Eigen::VectorXd::Zero(n + 3);
    const double s = x.dot(e.col(i));
    yi[0] = s;
    yi[1] = -s;
    yi.segment(2, n) = e.col(i);
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = lie_inner(Eigen::VectorXd(dy2.col(j)), yi);
  }
  return out;
}

std::vector<std::vector<int>> cluster_eigenvalues(const Eigen::VectorXd& ascending, double tol) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < ascending.size(); ++i) {
    if (i > 0) {
      const double a = ascending[i - 1];
      const double b = ascending[i];
      if (b - a <= tol * (1.0 + std::max(std::abs(a), std::abs(b)))) {
        clusters.back().push_back(i);
        continue;
      }
    }
    clusters.push_back({i});
  }
  return clusters;
}

CurvatureAnalysis curvature_spheres(const LegendreMap& map, const Eigen::VectorXd& b, const ProjectionFrame& frame,
                                    double cluster_tol) {
  const ProjectionJet jet = projection_jet(map, b, frame);
  const ShapeData shape = shape_from_jet(jet.d_point, jet.d_normal);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(shape.first_form * shape.shape),
                                                                shape.first_form);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "eigen-solver failed");

  CurvatureAnalysis out;
  out.frame = frame;
  out.eigenvalues = es.eigenvalues();
  out.first_form = shape.first_form;
  out.shape = shape.shape;
  out.asymmetry = shape.asymmetry;

  const auto clusters = cluster_eigenvalues(out.eigenvalues, cluster_tol);
  for (const auto& cl : clusters) {
    CurvatureSphere cs;
    cs.multiplicity = static_cast<int>(cl.size());
    double sum = 0.0;
    cs.principal_basis.resize(out.eigenvalues.size(), cs.multiplicity);
    for (int j = 0; j < cs.multiplicity; ++j) {
      sum += out.eigenvalues[cl[static_cast<std::size_t>(j)]];
      cs.principal_basis.col(j) = es.eigenvectors().col(cl[static_cast<std::size_t>(j)]);
    }
    cs.r = sum / cs.multiplicity;
    cs.K = LieVector(Eigen::VectorXd(cs.r * jet.value.p_lie + jet.value.q_lie));
    out.spheres.push_back(std::move(cs));
  }
  const std::size_t g = clusters.size();
  out.stable = cluster_eigenvalues(out.eigenvalues, 2.0 * cluster_tol).size() == g &&
               cluster_eigenvalues(out.eigenvalues, 0.5 * cluster_tol).size() == g;
  return out;
}

CurvatureAnalysis curvature_spheres(const LegendreMap& map, const Eigen::VectorXd& b, double cluster_tol) {
  return curvature_spheres(map, b, choose_frame(map, {b}), cluster_tol);
}

double lie_curvature(std::array<double, 4> rs) {
  std::sort(rs.begin(), rs.end());
  for (int i = 0; i < 3; ++i) {
    if (!(rs[static_cast<std::size_t>(i + 1)] > rs[static_cast<std::size_t>(i)])) {
      throw Error(ErrorKind::UndefinedCrossRatio, "principal curvatures must be distinct");
    }
  }
  return (rs[0] - rs[2]) * (rs[1] - rs[3]) / ((rs[0] - rs[3]) * (rs[1] - rs[2]));
}

double cross_ratio_on_line(const LieLine&, const std::array<Eigen::Vector2d, 4>& c) {
  auto bracket = [&c](int i, int j) {
    const auto& a = c[static_cast<std::size_t>(i)];
    const auto& b = c[static_cast<std::size_t>(j)];
    return a[0] * b[1] - a[1] * b[0];
  };
  const double num = bracket(0, 2) * bracket(1, 3);
  const double den = bracket(0, 3) * bracket(1, 2);
  const double eps = 1e-12;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double s = c[static_cast<std::size_t>(i)].norm() * c[static_cast<std::size_t>(j)].norm();
      if (!(std::abs(bracket(i, j)) > eps * s)) {
        throw Error(ErrorKind::UndefinedCrossRatio, "points on the line coincide");
      }
    }
  }
  return num / den;
}

Eigen::Vector2d line_coordinates(const LieLine& line, const LieVector& x, double* residual) {
  Eigen::MatrixXd basis(x.size(), 2);
  basis << line.y1.coords(), line.y2.coords();
  const Eigen::Vector2d c = basis.colPivHouseholderQr().solve(x.coords());
  if (residual) *residual = (basis * c - x.coords()).norm() / x.norm();
  return c;
}

double cross_ratio_of_points(const LieLine& line, const std::array<LieVector, 4>& points) {
  std::array<Eigen::Vector2d, 4> c;
  for (std::size_t i = 0; i < 4; ++i) c[i] = line_coordinates(line, points[i]);
  return cross_ratio_on_line(line, c);
}

}  // namespace liesphere
