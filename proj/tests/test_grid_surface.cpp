#include <cmath>
#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "liesphere/curvature.hpp"
#include "liesphere/dupin.hpp"
#include "liesphere/grid_surface.hpp"

using namespace liesphere;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

ErrorKind read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_grid(in);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::NumericalFailure;
}

}  // namespace

TEST(GeneralizedCross, MatchesCrossProductInR3) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
    Eigen::MatrixXd d(3, 2);
    d << a, b;
    EXPECT_LT((generalized_cross(d) - Eigen::VectorXd(a.cross(b))).norm(), 1e-12);
  }
}

TEST(GeneralizedCross, OrthogonalWithVolumeNorm) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int n : {4, 5}) {
    for (int i = 0; i < 50; ++i) {
      Eigen::MatrixXd d(n, n - 1);
      for (Eigen::Index r = 0; r < d.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.cols(); ++c) d(r, c) = g(rng);
      }
      const Eigen::VectorXd x = generalized_cross(d);
      EXPECT_LT((d.transpose() * x).cwiseAbs().maxCoeff(), 1e-10 * x.norm());
      EXPECT_NEAR(x.squaredNorm(), (d.transpose() * d).determinant(), 1e-9 * x.squaredNorm());
      Eigen::MatrixXd full(n, n);
      full << x, d;
      EXPECT_GT(full.determinant(), 0.0);
    }
  }
  EXPECT_THROW(generalized_cross(Eigen::MatrixXd::Zero(3, 3)), Error);
}

TEST(ReadGrid, ParsesCommentsAndLayout) {
  const std::string text =
      "# a 3x3 patch of a plane\n"
      "3 2 3 3\n"
      "0 0  0 0 1\n0 1  0 1 1\n0 2  0 2 1   # trailing comment\n"
      "1 0  1 0 1\n1 1  1 1 1\n1 2  1 2 1\n"
      "\n"
      "2 0  2 0 1\n2 1  2 1 1\n2 2  2 2 1\n";
  std::istringstream in(text);
  const SampledGrid g = read_grid(in);
  EXPECT_EQ(g.n, 3);
  ASSERT_EQ(g.axes.size(), 2u);
  EXPECT_EQ(g.axes[0], (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(g.axes[1], (std::vector<double>{0, 1, 2}));
  ASSERT_EQ(g.positions.size(), 9u);
  EXPECT_EQ(g.positions[5], vec({1, 2, 1}));
}

TEST(ReadGrid, RejectsMalformedInput) {
  EXPECT_EQ(read_error(""), ErrorKind::InvalidArgument);
  EXPECT_EQ(read_error("3\n"), ErrorKind::InvalidArgument);
  EXPECT_EQ(read_error("3 2 3 3\n0 0 0 0 0\n"), ErrorKind::InvalidArgument);
  // Not a tensor grid: the second knot differs between rows.
  EXPECT_EQ(read_error("3 2 2 2\n0 0 0 0 0\n0 1 0 1 0\n1 0.5 1 0 0\n1 1 1 1 0\n"), ErrorKind::InvalidArgument);
  // Knots must increase.
  EXPECT_EQ(read_error("2 1 3\n0 0 0\n2 1 0\n1 2 0\n"), ErrorKind::InvalidArgument);
  EXPECT_EQ(read_error("3 2 3 3\n0 0 0 0 x\n"), ErrorKind::InvalidArgument);
  EXPECT_THROW(read_grid_file("/nonexistent/grid.txt"), Error);
}

TEST(ReadGrid, WriteRoundTrip) {
  const auto t = torus(2, 1);
  const SampledGrid g = sample_grid(t.f, {linspace(0.1, 1.3, 5), linspace(-0.7, 0.9, 4)});
  std::stringstream ss;
  write_grid(ss, g);
  const SampledGrid back = read_grid(ss);
  EXPECT_EQ(back.n, g.n);
  EXPECT_EQ(back.axes, g.axes);
  ASSERT_EQ(back.positions.size(), g.positions.size());
  for (std::size_t i = 0; i < g.positions.size(); ++i) EXPECT_EQ(back.positions[i], g.positions[i]);
}

TEST(GridSurface, ValidatesShape) {
  ImmersionOracle curve;
  curve.domain = ParamDomain::box(vec({0}), vec({1}));
  curve.eval = [](const Eigen::VectorXd& b) { return vec({b[0], b[0] * b[0], 0.0}); };
  EXPECT_THROW(grid_surface(sample_grid(curve, {linspace(0, 1, 5)})), Error);
  const auto t = torus(2, 1);
  EXPECT_THROW(grid_surface(sample_grid(t.f, {linspace(0, 1, 2), linspace(0, 1, 5)})), Error);
}

TEST(GridSurface, ReproducesMultilinearData) {
  // Natural cubic splines reproduce functions that are linear in each variable.
  ImmersionOracle f;
  f.domain = ParamDomain::box(vec({-1, -1}), vec({1, 1}));
  f.eval = [](const Eigen::VectorXd& b) {
    return vec({b[0], b[1], 0.3 * b[0] - 0.2 * b[1] + 0.5 * b[0] * b[1]});
  };
  const auto s = grid_surface(sample_grid(f, {linspace(-1, 1, 5), {-1.0, -0.3, 0.4, 1.0}}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd b = vec({u(rng), u(rng)});
    EXPECT_LT((s.f.eval(b) - f.eval(b)).norm(), 1e-12);
    const Eigen::VectorXd expect_n = vec({-(0.3 + 0.5 * b[1]), -(-0.2 + 0.5 * b[0]), 1.0}).normalized();
    EXPECT_LT((s.xi(b) - expect_n).norm(), 1e-12);
  }
}

TEST(GridSurface, InterpolatesKnotsAndConverges) {
  const auto t = torus(2, 1);
  const auto axes = std::vector<std::vector<double>>{linspace(0.2, 1.4, 41), linspace(-0.6, 0.6, 41)};
  const SampledGrid g = sample_grid(t.f, axes);
  const auto s = grid_surface(g);
  EXPECT_LT((s.f.eval(vec({axes[0][7], axes[1][13]})) - g.positions[7 * 41 + 13]).norm(), 1e-12);
  // Interior midpoints, away from the natural end conditions.
  for (double a : {0.6, 0.8, 1.0}) {
    for (double v : {-0.2, 0.05, 0.3}) {
      const Eigen::VectorXd b = vec({a, v});
      EXPECT_LT((s.f.eval(b) - t.f.eval(b)).norm(), 1e-5);
      // d/du x d/dv points away from the core circle, opposite to the zoo's inward normal.
      EXPECT_LT((s.xi(b) + t.xi(b)).norm(), 1e-4);
      Eigen::VectorXd ev = shape_operator(s.f, s.xi, b).shape.eigenvalues().real();
      std::sort(ev.data(), ev.data() + 2);
      Eigen::Vector2d expect(-1.0, -std::cos(v) / (2 + std::cos(v)));
      EXPECT_LT((ev - Eigen::VectorXd(expect)).cwiseAbs().maxCoeff(), 1e-3);
    }
  }
}

TEST(GridSurface, SampledTorusKeepsTwoCurvatureSpheres) {
  const auto t = torus(2, 1);
  const auto s = grid_surface(sample_grid(t.f, {linspace(0.0, 2.0, 41), linspace(-1.0, 1.0, 41)}));
  const LegendreMap map = s.lift();
  for (const auto& b : grid_samples(ParamDomain::box(vec({0.5, -0.5}), vec({1.5, 0.5})), {3, 3})) {
    const auto ca = curvature_spheres(map, b);
    EXPECT_EQ(ca.g(), 2);
    EXPECT_LT(legendre_residuals(map, b).contact, 1e-6);
  }
}
