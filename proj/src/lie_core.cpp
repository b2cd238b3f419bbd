#include "liesphere/lie_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace liesphere {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::NotAContactLine: return "not-a-contact-line";
    case ErrorKind::DegenerateLine: return "degenerate-line";
    case ErrorKind::NotASphere: return "not-a-sphere";
    case ErrorKind::NotANormalField: return "not-a-normal-field";
    case ErrorKind::NotAnImmersion: return "not-an-immersion";
    case ErrorKind::InvalidFrame: return "invalid-frame";
    case ErrorKind::ProjectionSingular: return "projection-singular";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::UnsupportedProvenance: return "unsupported-provenance";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::UndefinedCrossRatio: return "undefined-cross-ratio";
    case ErrorKind::PathTruncated: return "path-truncated";
    case ErrorKind::TrackingLost: return "tracking-lost";
    case ErrorKind::SelfIntersectingSpec: return "self-intersecting-spec";
    case ErrorKind::DegenerateTube: return "degenerate-tube";
    case ErrorKind::InvalidConstruction: return "invalid-construction";
    case ErrorKind::NotEquivalent: return "not-equivalent";
  }
  return "unknown";
}

LieVector::LieVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  if (coords_.size() < 5) {
    throw Error(ErrorKind::InvalidArgument,
                "LieVector needs at least 5 coordinates (chart dimension >= 2), got " +
                    std::to_string(coords_.size()));
  }
}

LieVector::LieVector(std::initializer_list<double> coords)
    : LieVector(Eigen::Map<const Eigen::VectorXd>(coords.begin(),
                                                  static_cast<Eigen::Index>(coords.size()))) {}

LieVector LieVector::basis(int chart_dim, int index) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(chart_dim + 3);
  if (index < 0 || index >= v.size()) {
    throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  }
  v[index] = 1.0;
  return LieVector(std::move(v));
}

LieVector LieVector::zero(int chart_dim) { return LieVector(Eigen::VectorXd::Zero(chart_dim + 3)); }

LieVector LieVector::normalized() const {
  const double nrm = coords_.norm();
  if (nrm == 0.0) throw Error(ErrorKind::InvalidArgument, "cannot normalize the zero vector");
  return LieVector(coords_ / nrm);
}

LieVector operator+(const LieVector& a, const LieVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  return LieVector(a.coords_ + b.coords_);
}

LieVector operator-(const LieVector& a, const LieVector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  return LieVector(a.coords_ - b.coords_);
}

LieVector operator*(double s, const LieVector& a) { return LieVector(s * a.coords_); }

LieVector operator-(const LieVector& a) { return LieVector(-a.coords_); }

Eigen::MatrixXd metric(int chart_dim) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(chart_dim + 3);
  d[0] = -1.0;
  d[chart_dim + 2] = -1.0;
  return d.asDiagonal();
}

double lie_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::InvalidArgument, "lie_inner: dimension mismatch");
  }
  const Eigen::Index last = x.size() - 1;
  double s = -x[0] * y[0] - x[last] * y[last];
  for (Eigen::Index k = 1; k < last; ++k) s += x[k] * y[k];
  return s;
}

double lie_inner(const LieVector& x, const LieVector& y) { return lie_inner(x.coords(), y.coords()); }

bool on_quadric(const LieVector& x, double tol) {
  const double n2 = x.coords().squaredNorm();
  if (n2 == 0.0) throw Error(ErrorKind::InvalidArgument, "on_quadric: zero vector");
  return std::abs(lie_inner(x, x)) <= tol * n2;
}

LieLine line_through(const LieVector& x, const LieVector& y, double tol) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "line_through: dimension mismatch");
  if (x.is_zero() || y.is_zero()) throw Error(ErrorKind::DegenerateLine, "zero representative");

  Eigen::MatrixXd stack(2, x.size());
  stack.row(0) = x.coords().normalized().transpose();
  stack.row(1) = y.coords().normalized().transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
  if (svd.singularValues()[1] <= tol * svd.singularValues()[0]) {
    throw Error(ErrorKind::DegenerateLine, "representatives are linearly dependent");
  }
  if (!on_quadric(x, tol) || !on_quadric(y, tol)) {
    throw Error(ErrorKind::NotAContactLine, "a representative is off the quadric");
  }
  if (std::abs(lie_inner(x, y)) > tol * x.norm() * y.norm()) {
    throw Error(ErrorKind::NotAContactLine, "representatives are not orthogonal");
  }
  return LieLine{x, y};
}

namespace {

// Returns c with G^T J G ~ c J, or NaN if no such multiple exists within tol.
double form_multiplier(const Eigen::MatrixXd& g, double tol) {
  if (g.rows() != g.cols() || g.rows() < 5) return std::numeric_limits<double>::quiet_NaN();
  const int n = static_cast<int>(g.rows()) - 3;
  const Eigen::MatrixXd j = metric(n);
  const Eigen::MatrixXd m = g.transpose() * j * g;
  const double c = (j * m).trace() / static_cast<double>(g.rows());
  const double resid = (m - c * j).cwiseAbs().maxCoeff();
  // Rounding in G^T J G scales with the entries of G^T G, not with c.
  const double ref = (g.transpose() * g).cwiseAbs().maxCoeff();
  if (!(resid <= tol * ref) || c <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return c;
}

}  // namespace

bool is_lie_transform(const Eigen::MatrixXd& g, double tol) {
  return !std::isnan(form_multiplier(g, tol));
}

LieTransform LieTransform::from_matrix(const Eigen::MatrixXd& g, double tol) {
  const double c = form_multiplier(g, tol);
  if (std::isnan(c)) throw Error(ErrorKind::InvalidArgument, "matrix does not preserve the Lie quadric");
  return LieTransform(g / std::sqrt(c));
}

LieTransform LieTransform::identity(int chart_dim) {
  return LieTransform(Eigen::MatrixXd::Identity(chart_dim + 3, chart_dim + 3));
}

LieTransform LieTransform::inverse() const {
  const Eigen::MatrixXd j = metric(chart_dim());
  return LieTransform(j * matrix_.transpose() * j);
}

LieTransform LieTransform::operator*(const LieTransform& rhs) const {
  if (rhs.matrix_.rows() != matrix_.rows()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  return LieTransform(matrix_ * rhs.matrix_);
}

bool is_moebius(const LieTransform& g, double tol) {
  const Eigen::Index last = g.matrix().rows() - 1;
  const Eigen::VectorXd image = g.matrix().col(last);
  const double nrm = image.norm();
  Eigen::VectorXd off = image;
  off[last] = 0.0;
  return off.norm() <= tol * nrm;
}

LieVector apply(const LieTransform& g, const LieVector& x) {
  if (x.size() != g.matrix().rows()) throw Error(ErrorKind::InvalidArgument, "apply: dimension mismatch");
  return LieVector(g.matrix() * x.coords());
}

LieLine apply_line(const LieTransform& g, const LieLine& line) {
  return LieLine{apply(g, line.y1), apply(g, line.y2)};
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
  const Eigen::Index d = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Eigen::MatrixXd b = a / std::ldexp(1.0, squarings);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
  for (int k = 1; k < 64; ++k) {
    term = term * b / static_cast<double>(k);
    const Eigen::MatrixXd next = sum + term;
    // Stop once adding the term no longer changes the partial sum.
    if ((next - sum).cwiseAbs().maxCoeff() <= std::numeric_limits<double>::epsilon() * 0.25 *
                                                   next.cwiseAbs().maxCoeff()) {
      sum = next;
      break;
    }
    sum = next;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

LieTransform random_lie_transform(std::uint64_t seed, int chart_dim, double scale) {
  if (!(scale >= 0.0)) throw Error(ErrorKind::InvalidArgument, "scale must be non-negative");
  const int d = chart_dim + 3;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double v = scale * dist(rng);
      k(i, j) = v;
      k(j, i) = -v;
    }
  }
  // A = J K satisfies A^T J + J A = 0, so exp(A) preserves the form.
  const Eigen::MatrixXd a = metric(chart_dim) * k;
  return LieTransform::from_matrix(matrix_exponential(a), 1e-10);
}

Signature restricted_signature(const Eigen::MatrixXd& basis, double zero_tol) {
  Signature sig;
  if (basis.cols() == 0) return sig;
  const int n = static_cast<int>(basis.rows()) - 3;
  const Eigen::MatrixXd gram = basis.transpose() * metric(n) * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev > zero_tol) {
      ++sig.n_plus;
    } else if (ev < -zero_tol) {
      ++sig.n_minus;
    } else {
      ++sig.n_zero;
    }
  }
  return sig;
}

SpanSummary span_summary(const std::vector<LieVector>& samples, double tol) {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "span_summary: no samples");
  const Eigen::Index d = samples.front().size();
  Eigen::MatrixXd stack(static_cast<Eigen::Index>(samples.size()), d);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != d) throw Error(ErrorKind::InvalidArgument, "span_summary: dimension mismatch");
    const double nrm = samples[i].norm();
    if (nrm == 0.0) throw Error(ErrorKind::InvalidArgument, "span_summary: zero sample");
    stack.row(static_cast<Eigen::Index>(i)) = samples[i].coords().transpose() / nrm;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double top = sv[0];
  SpanSummary out;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > tol * top) ++out.dim;
  }
  out.smallest_retained = sv[out.dim - 1] / top;
  out.largest_discarded = out.dim < sv.size() ? sv[out.dim] / top : 0.0;

  const Eigen::MatrixXd basis = svd.matrixV().leftCols(out.dim);
  for (Eigen::Index c = 0; c < basis.cols(); ++c) out.basis.emplace_back(basis.col(c));
  out.signature = restricted_signature(basis, tol);
  return out;
}

double projective_distance(const LieVector& x, const LieVector& y) {
  const Eigen::VectorXd a = x.coords().normalized();
  const Eigen::VectorXd b = y.coords().normalized();
  return std::min((a - b).norm(), (a + b).norm());
}

}  // namespace liesphere
