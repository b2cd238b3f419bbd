#pragma once

// Legendre maps b -> [Y1(b), Y_{n+3}(b)] built from immersions, and their
// Euclidean and spherical projections.

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "liesphere/lie_core.hpp"

namespace liesphere {

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Axis-aligned parameter box. Periodic axes wrap with period hi - lo.
struct ParamDomain {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<bool> periodic;

  static ParamDomain box(Eigen::VectorXd lo, Eigen::VectorXd hi, std::vector<bool> periodic = {});

  int dim() const { return static_cast<int>(lo.size()); }
  double extent() const;
  bool contains(const Eigen::VectorXd& b) const;
  Eigen::VectorXd wrap(const Eigen::VectorXd& b) const;
  /// Regular interior grid with `per_axis` cell-centred samples on each axis.
  std::vector<Eigen::VectorXd> interior_grid(int per_axis) const;
};

struct ImmersionOracle {
  VectorField eval;
  ParamDomain domain;
  double fd_step = 0.0;  // 0 selects 1e-4 * domain extent
  VectorField normal;    // optional

  double step() const;
};

enum class Provenance { EuclideanLift, SphericalLift, NormalBundleLift, ZooAnalytic, Transformed };

std::string_view to_string(Provenance p);

struct EuclideanSource {
  ImmersionOracle f;
  VectorField xi;
};

class LegendreMap {
 public:
  using LineFn = std::function<LieLine(const Eigen::VectorXd&)>;

  LegendreMap(int chart_dim, ParamDomain domain, LineFn line, Provenance provenance, double fd_step = 0.0);

  int dim() const { return domain_.dim(); }
  int chart_dim() const { return chart_dim_; }
  const ParamDomain& domain() const { return domain_; }
  double fd_step() const { return fd_step_; }
  Provenance provenance() const { return provenance_; }

  /// Evaluates the line; no domain check, so stencils may step slightly outside.
  LieLine line_at(const Eigen::VectorXd& b) const { return line_(b); }

  const std::optional<EuclideanSource>& euclidean_source() const { return source_; }
  void set_euclidean_source(EuclideanSource s) { source_ = std::move(s); }

 private:
  int chart_dim_;
  ParamDomain domain_;
  LineFn line_;
  Provenance provenance_;
  double fd_step_;
  std::optional<EuclideanSource> source_;
};

struct LiftOptions {
  bool validate = true;
  double normal_tol = 1e-6;
  int samples_per_axis = 5;
};

LegendreMap lift_euclidean(ImmersionOracle f, VectorField xi, const LiftOptions& opts = {});
LegendreMap lift_spherical(ImmersionOracle phi, VectorField eta, const LiftOptions& opts = {});

/// Lift of a codimension-two surface phi: M -> S^n over its unit normal bundle,
/// parametrized by (u, theta) with theta in [0, 2pi).
LegendreMap lift_normal_bundle_s4(ImmersionOracle phi, VectorField nu1, VectorField nu2,
                                  const LiftOptions& opts = {});

/// Pointwise image G * lambda(b).
LegendreMap transformed(const LegendreMap& map, const LieTransform& g);

enum class ProjectionKind { Euclidean, Spherical };

/// A J-orthonormal basis whose columns play the roles of e_1, ..., e_{n+3}.
struct ProjectionFrame {
  ProjectionKind kind = ProjectionKind::Euclidean;
  Eigen::MatrixXd basis;
  double angle = 0.0;  // rotation in the (e_1, e_{n+3}) plane, for reporting

  static ProjectionFrame standard(ProjectionKind kind, int chart_dim);
  static ProjectionFrame from_transform(ProjectionKind kind, const LieTransform& g);
  /// Standard frame rotated by t in the (e_1, e_{n+3}) plane: e_1' = cos t e_1 + sin t e_{n+3}.
  static ProjectionFrame rotated(ProjectionKind kind, int chart_dim, double t);
  static ProjectionFrame spherical_rotated(int chart_dim, double t) {
    return rotated(ProjectionKind::Spherical, chart_dim, t);
  }

  int chart_dim() const { return static_cast<int>(basis.rows()) - 3; }
  Eigen::VectorXd coords(const Eigen::VectorXd& y) const;
};

/// The projection of one line. `p_lie` is the normalized point sphere
/// (Euclidean: e_1-e_2 weight one; spherical: e_1 weight one) and `q_lie`
/// the normalized member through e_{n+3}, both in standard coordinates.
struct ProjectedPoint {
  Eigen::VectorXd point;
  Eigen::VectorXd normal;
  Eigen::VectorXd p_lie;
  Eigen::VectorXd q_lie;
};

ProjectedPoint project_line(const LieLine& line, const ProjectionFrame& frame, double tol = 1e-10);

struct ProjectionJet {
  ProjectedPoint value;
  Eigen::MatrixXd d_point;   // ambient x parameter
  Eigen::MatrixXd d_normal;
};

ProjectionJet projection_jet(const LegendreMap& map, const Eigen::VectorXd& b, const ProjectionFrame& frame);

/// sigma_min / sigma_max of d_point; 0 when the projection is not an immersion.
double regularity_ratio(const ProjectionJet& jet);

struct ProjectedImmersion {
  ImmersionOracle f;
  VectorField normal;
};

ProjectedImmersion euclidean_projection(const LegendreMap& map, const ProjectionFrame& frame);
ProjectedImmersion euclidean_projection(const LegendreMap& map);
ProjectedImmersion spherical_projection(const LegendreMap& map, const ProjectionFrame& frame);
ProjectedImmersion spherical_projection(const LegendreMap& map);

/// Frames tried in order: the natural one for the provenance, then spherical
/// frames rotated by k*pi/8.
std::vector<ProjectionFrame> candidate_frames(const LegendreMap& map);

/// First candidate frame whose projection is regular (ratio >= 1e-3) at every
/// sample, otherwise the best one. Throws projection-singular if none is usable.
ProjectionFrame choose_frame(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples);

struct LegendreResiduals {
  double quadric1 = 0.0;       // |<Y1,Y1>| / |Y1|^2
  double quadric2 = 0.0;
  double orthogonality = 0.0;  // |<Y1,Y2>| / (|Y1||Y2|)
  double contact = 0.0;        // max_j |<dY1/db_j, Y2>|, raw representatives
  double regularity_sv = 0.0;  // least singular value of the projected differential
};

LegendreResiduals legendre_residuals(const LegendreMap& map, const Eigen::VectorXd& b);

}  // namespace liesphere
