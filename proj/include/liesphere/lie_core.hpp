#pragma once

// Indefinite linear algebra on R^{n+3} with the signature-(n+1,2) form
//   <x,y> = -x_1 y_1 + x_2 y_2 + ... + x_{n+2} y_{n+2} - x_{n+3} y_{n+3}.
// Coordinates are 0-based in code: e_1 is index 0 and e_{n+3} is index n+2.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "liesphere/error.hpp"

namespace liesphere {

inline constexpr double kQuadricTol = 1e-8;
inline constexpr double kRankTol = 1e-6;

/// Homogeneous coordinate vector in R^{n+3}_2.
class LieVector {
 public:
  LieVector() = default;
  explicit LieVector(Eigen::VectorXd coords);
  LieVector(std::initializer_list<double> coords);

  /// The standard basis vector with 0-based index `index`.
  static LieVector basis(int chart_dim, int index);
  static LieVector zero(int chart_dim);

  int chart_dim() const { return static_cast<int>(coords_.size()) - 3; }
  int size() const { return static_cast<int>(coords_.size()); }
  const Eigen::VectorXd& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  double norm() const { return coords_.norm(); }
  bool is_zero() const { return coords_.isZero(0.0); }

  LieVector normalized() const;

  friend LieVector operator+(const LieVector& a, const LieVector& b);
  friend LieVector operator-(const LieVector& a, const LieVector& b);
  friend LieVector operator*(double s, const LieVector& a);
  friend LieVector operator-(const LieVector& a);

 private:
  Eigen::VectorXd coords_;
};

/// Projective line on the quadric spanned by two representatives.
/// Only `line_through` validates; other producers report residuals instead.
struct LieLine {
  LieVector y1;
  LieVector y2;

  int chart_dim() const { return y1.chart_dim(); }
};

/// Element of O(n+1,2), stored with G^T J G = J.
class LieTransform {
 public:
  /// Accepts any projective representative (G^T J G = cJ, c > 0) and rescales it.
  static LieTransform from_matrix(const Eigen::MatrixXd& g, double tol = kQuadricTol);
  static LieTransform identity(int chart_dim);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int chart_dim() const { return static_cast<int>(matrix_.rows()) - 3; }

  LieTransform inverse() const;
  LieTransform operator*(const LieTransform& rhs) const;

 private:
  explicit LieTransform(Eigen::MatrixXd m) : matrix_(std::move(m)) {}
  Eigen::MatrixXd matrix_;
};

struct Signature {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;

  friend bool operator==(const Signature&, const Signature&) = default;
};

struct SpanSummary {
  int dim = 0;
  std::vector<LieVector> basis;  // Euclidean-orthonormal
  Signature signature;
  double smallest_retained = 0.0;  // singular values relative to the largest
  double largest_discarded = 0.0;
};

/// The diagonal metric J = diag(-1, 1, ..., 1, -1).
Eigen::MatrixXd metric(int chart_dim);

double lie_inner(const LieVector& x, const LieVector& y);
double lie_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// |<x,x>| <= tol * |x|^2.
bool on_quadric(const LieVector& x, double tol = kQuadricTol);

/// Validated line through two orthogonal quadric points. Representatives are kept as given.
LieLine line_through(const LieVector& x, const LieVector& y, double tol = kQuadricTol);

bool is_lie_transform(const Eigen::MatrixXd& g, double tol = kQuadricTol);
bool is_moebius(const LieTransform& g, double tol = kQuadricTol);

LieVector apply(const LieTransform& g, const LieVector& x);
LieLine apply_line(const LieTransform& g, const LieLine& line);

/// exp(A) for A = J K, K skew with entries uniform in [-scale, scale]; deterministic in seed.
LieTransform random_lie_transform(std::uint64_t seed, int chart_dim, double scale);

/// Matrix exponential by scaling and squaring with a Taylor core.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

/// Rank, orthonormal basis and restricted-form signature of the span of the samples.
SpanSummary span_summary(const std::vector<LieVector>& samples, double tol = kRankTol);

/// min over sign of |x/|x| -+ y/|y||; zero iff [x] = [y].
double projective_distance(const LieVector& x, const LieVector& y);

/// Signature of the restriction of the form to the column span of an orthonormal basis.
Signature restricted_signature(const Eigen::MatrixXd& basis, double zero_tol = kRankTol);

}  // namespace liesphere
