#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "liesphere/curvature.hpp"
#include "liesphere/legendre.hpp"

namespace liesphere {

struct LeafPath {
  std::vector<Eigen::VectorXd> points;
  int sphere_index = 0;
  int multiplicity = 1;
  double arclength = 0.0;   // parameter-space length actually traced
  std::string stop_reason;  // empty when the requested length was reached
  ProjectionFrame frame;
};

struct LeafOptions {
  double cluster_tol = kClusterTol;
  std::optional<ProjectionFrame> frame;  // default: chosen at b0
  std::uint64_t seed = 0;                // in-leaf walks only
};

/// RK4 along the unit principal direction of a simple curvature sphere.
/// A negative arclength traces the opposite direction.
LeafPath integrate_curvature_line(const LegendreMap& map, const Eigen::VectorXd& b0, int sphere_index,
                                  double arclength, double step, const LeafOptions& opts = {});

/// Path inside the leaf of a curvature sphere of any multiplicity, following
/// the projection of a seeded direction onto the principal space.
LeafPath walk_curvature_leaf(const LegendreMap& map, const Eigen::VectorXd& b0, int sphere_index, double arclength,
                             double step, const LeafOptions& opts = {});

/// max over the path of the projective distance between K(b) and K(b0).
double dupin_deviation(const LegendreMap& map, const LeafPath& path, double cluster_tol = kClusterTol);

enum class DupinVerdict { ProperDupin, DupinMixedG, NotDupin, Inconclusive };
std::string_view to_string(DupinVerdict v);

struct DupinOptions {
  double cluster_tol = kClusterTol;
  double dupin_tol = 1e-5;     // deviation below this: constant along leaves
  double not_dupin_tol = 1e-3; // deviation above this: not Dupin
  double leaf_length = 1.0;
  double leaf_step = 0.02;
  int leaf_seeds = 8;
  std::uint64_t seed = 0;
};

struct PointRecord {
  Eigen::VectorXd b;
  int g = 0;
  bool stable = true;
  bool fallback_frame = false;
  std::vector<double> r;
  std::vector<int> multiplicity;
};

struct SphereDeviation {
  int index = 0;
  int multiplicity = 1;
  double max_deviation = 0.0;
  int leaves = 0;
};

struct DupinReport {
  std::vector<PointRecord> points;
  std::vector<SphereDeviation> spheres;
  int g = 0;
  bool g_constant = true;
  bool all_stable = true;
  double max_deviation = 0.0;
  DupinVerdict verdict = DupinVerdict::Inconclusive;
  ProjectionFrame frame;
  std::vector<std::string> notes;
};

/// Cell-centred samples: counts[i] points along axis i.
std::vector<Eigen::VectorXd> grid_samples(const ParamDomain& domain, const std::vector<int>& counts);

DupinReport dupin_verify(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                         const DupinOptions& opts = {});

/// Curvature spheres at every sample in one fixed frame, labelled by continuity
/// with the nearest earlier sample (the first sample orders them by ascending r).
struct TrackedSpheres {
  std::vector<std::vector<LieVector>> K;  // K[i][s]: sphere i at sample s, unit Euclidean norm
  std::vector<int> multiplicity;
  std::vector<std::vector<double>> angles;  // arccot r in the frame, same layout as K
  ProjectionFrame frame;
};

TrackedSpheres track_curvature_spheres(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                       double cluster_tol = kClusterTol);

SpanSummary focal_span(const LegendreMap& map, int sphere_index, const std::vector<Eigen::VectorXd>& samples,
                       double rank_tol = kRankTol);

struct ReducibilityResult {
  bool reducible = false;
  int witness_index = -1;  // sphere whose span has dimension <= n + 1
  std::vector<SpanSummary> spans;
  std::vector<int> multiplicity;
};

ReducibilityResult reducibility_test(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                     double rank_tol = kRankTol);

struct CriterionWitness {
  std::vector<LieVector> points;       // P_i, scaled to <P_i, P_i> = -4
  std::array<LieVector, 2> line_basis; // Euclidean-orthonormal basis of the timelike plane
  Eigen::Matrix2d gram;                // <P_a, P_b> on the first independent pair
  double residual = 0.0;               // max |<K_i(b), P_i>| for unit K_i and <P_i,P_i> = -1
};

enum class CriterionVerdict { Witness, NoWitness, Indeterminate };
std::string_view to_string(CriterionVerdict v);

struct CriterionOptions {
  double cluster_tol = kClusterTol;
  double null_tol = 1e-6;     // relative singular-value cut for the null spaces N_i
  double residual_tol = 1e-6; // witnesses must beat this
  double margin = 1e-6;       // negative-definiteness margin of the Gram
};

struct CriterionResult {
  CriterionVerdict verdict = CriterionVerdict::Indeterminate;
  std::optional<CriterionWitness> witness;
  std::vector<int> null_dims;
  double certified_bound = 0.0;  // NoWitness: lower bound on the RMS residual of any timelike P
  std::string note;
};

CriterionResult isoparametric_criterion(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                        const CriterionOptions& opts = {});

/// sqrt(min P^T H P) over <P,P> = -1 with H = (M J)^T (M J) / m, M the stacked unit samples.
/// Every timelike P then has RMS residual at least this value against the samples.
double timelike_residual_bound(const std::vector<LieVector>& samples);

}  // namespace liesphere
