#include "liesphere/dupin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace liesphere {

namespace {

constexpr double kMaxTurn = 5.0 * 3.14159265358979323846 / 180.0;

struct Stop {
  std::string reason;
};

struct FieldValue {
  Eigen::VectorXd dir;
  double r = 0.0;
};

// Unit direction at b, sign-aligned with ref; throws Stop when the tracked branch is lost.
using DirectionField = std::function<FieldValue(const Eigen::VectorXd& b, const Eigen::VectorXd& ref, double r)>;

int nearest_branch(const CurvatureAnalysis& ca, double r) {
  int best = 0;
  for (int i = 1; i < ca.g(); ++i) {
    if (std::abs(ca.spheres[static_cast<std::size_t>(i)].r - r) <
        std::abs(ca.spheres[static_cast<std::size_t>(best)].r - r)) {
      best = i;
    }
  }
  return best;
}

CurvatureAnalysis analyse_or_stop(const LegendreMap& map, const Eigen::VectorXd& b, const ProjectionFrame& frame,
                                  double tol) {
  try {
    return curvature_spheres(map, b, frame, tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ProjectionSingular || e.kind() == ErrorKind::NotAnImmersion) {
      throw Stop{"projection-singular"};
    }
    throw;
  }
}

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = a.normalized().dot(b.normalized());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

void trace(const LegendreMap& map, LeafPath& path, double length, double step, const Eigen::VectorXd& start_dir,
           double r0, const DirectionField& field) {
  double remaining = std::abs(length);
  Eigen::VectorXd b = path.points.front();
  Eigen::VectorXd prev = start_dir;
  double r = r0;
  while (remaining > 1e-12) {
    double s = std::min(step, remaining);
    bool accepted = false;
    Eigen::VectorXd next;
    FieldValue k1;
    try {
      k1 = field(b, prev, r);
      for (int attempt = 0; attempt < 6 && !accepted; ++attempt) {
        const FieldValue k2 = field(b + 0.5 * s * k1.dir, k1.dir, k1.r);
        const FieldValue k3 = field(b + 0.5 * s * k2.dir, k2.dir, k2.r);
        const FieldValue k4 = field(b + s * k3.dir, k3.dir, k3.r);
        next = b + s / 6.0 * (k1.dir + 2.0 * k2.dir + 2.0 * k3.dir + k4.dir);
        if (angle_between(next - b, prev) < kMaxTurn && angle_between(k4.dir, k1.dir) < kMaxTurn) {
          accepted = true;
        } else {
          s *= 0.5;
        }
      }
    } catch (const Stop& stop) {
      path.stop_reason = stop.reason;
      return;
    }
    if (!accepted) {
      path.stop_reason = "tracking";
      return;
    }
    if (!map.domain().contains(next)) {
      path.stop_reason = "boundary";
      return;
    }
    path.arclength += (next - b).norm();
    remaining -= s;
    prev = (next - b).normalized();
    r = k1.r;
    b = next;
    path.points.push_back(b);
  }
}

LeafPath start_path(const LegendreMap& map, const Eigen::VectorXd& b0, int sphere_index, const LeafOptions& opts,
                    CurvatureAnalysis& ca0) {
  if (!map.domain().contains(b0)) throw Error(ErrorKind::OutOfDomain, "leaf start outside the domain");
  LeafPath path;
  path.frame = opts.frame ? *opts.frame : choose_frame(map, {b0});
  ca0 = curvature_spheres(map, b0, path.frame, opts.cluster_tol);
  if (sphere_index < 0 || sphere_index >= ca0.g()) {
    throw Error(ErrorKind::InvalidArgument, "sphere index out of range");
  }
  path.sphere_index = sphere_index;
  path.multiplicity = ca0.spheres[static_cast<std::size_t>(sphere_index)].multiplicity;
  path.points.push_back(b0);
  return path;
}

}  // namespace

LeafPath integrate_curvature_line(const LegendreMap& map, const Eigen::VectorXd& b0, int sphere_index,
                                  double arclength, double step, const LeafOptions& opts) {
  CurvatureAnalysis ca0;
  LeafPath path = start_path(map, b0, sphere_index, opts, ca0);
  const CurvatureSphere& s0 = ca0.spheres[static_cast<std::size_t>(sphere_index)];
  if (s0.multiplicity != 1) {
    throw Error(ErrorKind::PathTruncated, "curvature sphere is not simple at the start point");
  }
  const double tol = opts.cluster_tol;
  const ProjectionFrame frame = path.frame;
  DirectionField field = [&map, frame, tol](const Eigen::VectorXd& b, const Eigen::VectorXd& ref, double r) {
    const CurvatureAnalysis ca = analyse_or_stop(map, b, frame, tol);
    const auto& s = ca.spheres[static_cast<std::size_t>(nearest_branch(ca, r))];
    if (s.multiplicity != 1) throw Stop{"collision"};
    Eigen::VectorXd v = s.principal_basis.col(0).normalized();
    if (v.dot(ref) < 0) v = -v;
    return FieldValue{v, s.r};
  };
  Eigen::VectorXd d0 = s0.principal_basis.col(0).normalized();
  if (arclength < 0) d0 = -d0;
  trace(map, path, arclength, step, d0, s0.r, field);
  return path;
}

LeafPath walk_curvature_leaf(const LegendreMap& map, const Eigen::VectorXd& b0, int sphere_index, double arclength,
                             double step, const LeafOptions& opts) {
  CurvatureAnalysis ca0;
  LeafPath path = start_path(map, b0, sphere_index, opts, ca0);
  const CurvatureSphere& s0 = ca0.spheres[static_cast<std::size_t>(sphere_index)];
  const int m = s0.multiplicity;

  auto project = [](const Eigen::MatrixXd& e, const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return e * (e.transpose() * e).ldlt().solve(e.transpose() * w);
  };
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd w(map.dim());
  Eigen::VectorXd d0;
  for (int tries = 0; tries < 16; ++tries) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    w.normalize();
    d0 = project(s0.principal_basis, w);
    if (d0.norm() > 0.2) break;
  }
  d0.normalize();
  if (arclength < 0) d0 = -d0;

  const double tol = opts.cluster_tol;
  const ProjectionFrame frame = path.frame;
  DirectionField field = [&map, frame, tol, m, w, project](const Eigen::VectorXd& b, const Eigen::VectorXd& ref,
                                                           double r) {
    const CurvatureAnalysis ca = analyse_or_stop(map, b, frame, tol);
    const auto& s = ca.spheres[static_cast<std::size_t>(nearest_branch(ca, r))];
    if (s.multiplicity != m) throw Stop{"collision"};
    Eigen::VectorXd v = project(s.principal_basis, w);
    if (v.norm() < 1e-3) throw Stop{"walk-degenerate"};
    v.normalize();
    if (v.dot(ref) < 0) v = -v;
    return FieldValue{v, s.r};
  };
  trace(map, path, arclength, step, d0, s0.r, field);
  return path;
}

double dupin_deviation(const LegendreMap& map, const LeafPath& path, double cluster_tol) {
  if (path.points.empty()) throw Error(ErrorKind::InvalidArgument, "empty leaf path");
  const CurvatureAnalysis ca0 = curvature_spheres(map, path.points.front(), path.frame, cluster_tol);
  if (path.sphere_index >= ca0.g()) throw Error(ErrorKind::InvalidArgument, "sphere index out of range");
  const CurvatureSphere& s0 = ca0.spheres[static_cast<std::size_t>(path.sphere_index)];
  double r = s0.r;
  double worst = 0.0;
  for (std::size_t p = 1; p < path.points.size(); ++p) {
    const CurvatureAnalysis ca = curvature_spheres(map, path.points[p], path.frame, cluster_tol);
    const auto& s = ca.spheres[static_cast<std::size_t>(nearest_branch(ca, r))];
    worst = std::max(worst, projective_distance(s.K, s0.K));
    r = s.r;
  }
  return worst;
}

std::string_view to_string(DupinVerdict v) {
  switch (v) {
    case DupinVerdict::ProperDupin: return "proper-Dupin";
    case DupinVerdict::DupinMixedG: return "Dupin-mixed-g";
    case DupinVerdict::NotDupin: return "not-Dupin";
    case DupinVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<Eigen::VectorXd> grid_samples(const ParamDomain& domain, const std::vector<int>& counts) {
  const int k = domain.dim();
  if (static_cast<int>(counts.size()) != k) throw Error(ErrorKind::InvalidArgument, "grid rank mismatch");
  for (int c : counts) {
    if (c < 1) throw Error(ErrorKind::InvalidArgument, "grid counts must be positive");
  }
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Eigen::VectorXd b(k);
    for (int i = 0; i < k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      b[i] = domain.lo[i] + (idx[ui] + 0.5) / counts[ui] * (domain.hi[i] - domain.lo[i]);
    }
    pts.push_back(std::move(b));
    int i = k - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == counts[static_cast<std::size_t>(i)]) {
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return pts;
}

namespace {

std::vector<Eigen::VectorXd> spread_subset(const std::vector<Eigen::VectorXd>& samples, std::size_t count) {
  if (samples.size() <= count) return samples;
  std::vector<Eigen::VectorXd> out;
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back(samples[(2 * j + 1) * samples.size() / (2 * count)]);
  }
  return out;
}

bool is_projection_failure(const Error& e) {
  return e.kind() == ErrorKind::ProjectionSingular || e.kind() == ErrorKind::NotAnImmersion;
}

}  // namespace

DupinReport dupin_verify(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                         const DupinOptions& opts) {
  DupinReport rep;
  if (samples.empty()) {
    rep.notes.push_back("no samples");
    return rep;
  }
  rep.frame = choose_frame(map, spread_subset(samples, 32));

  std::vector<std::optional<CurvatureAnalysis>> analyses;
  std::map<int, int> g_counts;
  bool failures = false;
  for (const auto& b : samples) {
    PointRecord rec;
    rec.b = b;
    std::optional<CurvatureAnalysis> ca;
    try {
      ca = curvature_spheres(map, b, rep.frame, opts.cluster_tol);
    } catch (const Error& e) {
      if (!is_projection_failure(e)) throw;
      try {
        ca = curvature_spheres(map, b, opts.cluster_tol);
        rec.fallback_frame = true;
      } catch (const Error& e2) {
        if (!is_projection_failure(e2)) throw;
      }
    }
    if (ca) {
      rec.g = ca->g();
      rec.stable = ca->stable;
      for (const auto& s : ca->spheres) {
        rec.r.push_back(s.r);
        rec.multiplicity.push_back(s.multiplicity);
      }
      ++g_counts[rec.g];
      rep.all_stable = rep.all_stable && rec.stable;
    } else {
      failures = true;
    }
    analyses.push_back(std::move(ca));
    rep.points.push_back(std::move(rec));
  }
  if (failures) rep.notes.push_back("curvature spheres unavailable at some samples");
  rep.g_constant = g_counts.size() == 1;
  int best_count = -1;
  for (const auto& [g, count] : g_counts) {
    if (count > best_count) {
      best_count = count;
      rep.g = g;
    }
  }

  const std::size_t seeds = std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.leaf_seeds, 1)),
                                                  samples.size());
  std::map<int, SphereDeviation> per_sphere;
  std::uint64_t walk_seed = opts.seed * 7919u + 1u;
  for (std::size_t j = 0; j < seeds; ++j) {
    const std::size_t at = (2 * j + 1) * samples.size() / (2 * seeds);
    const auto& ca = analyses[at];
    if (!ca) continue;
    const ProjectionFrame frame = rep.points[at].fallback_frame ? ca->frame : rep.frame;
    for (int i = 0; i < ca->g(); ++i) {
      const int m = ca->spheres[static_cast<std::size_t>(i)].multiplicity;
      for (double sign : {1.0, -1.0}) {
        LeafOptions lo{opts.cluster_tol, frame, walk_seed++};
        try {
          const double len = sign * 0.5 * opts.leaf_length;
          const LeafPath path = m == 1 ? integrate_curvature_line(map, samples[at], i, len, opts.leaf_step, lo)
                                       : walk_curvature_leaf(map, samples[at], i, len, opts.leaf_step, lo);
          if (!path.stop_reason.empty()) {
            rep.notes.push_back("leaf at sample " + std::to_string(at) + " sphere " + std::to_string(i) +
                                " stopped: " + path.stop_reason);
          }
          if (path.points.size() < 2) continue;
          const double dev = dupin_deviation(map, path, opts.cluster_tol);
          auto& sd = per_sphere[i];
          sd.index = i;
          sd.multiplicity = m;
          sd.max_deviation = std::max(sd.max_deviation, dev);
          ++sd.leaves;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::PathTruncated && !is_projection_failure(e)) throw;
          rep.notes.push_back("leaf at sample " + std::to_string(at) + " sphere " + std::to_string(i) + ": " +
                              e.what());
        }
      }
    }
  }
  int leaves = 0;
  for (const auto& [i, sd] : per_sphere) {
    rep.spheres.push_back(sd);
    rep.max_deviation = std::max(rep.max_deviation, sd.max_deviation);
    leaves += sd.leaves;
  }

  if (leaves == 0) {
    rep.verdict = DupinVerdict::Inconclusive;
    rep.notes.push_back("no leaves traced");
  } else if (rep.max_deviation > opts.not_dupin_tol) {
    rep.verdict = DupinVerdict::NotDupin;
  } else if (rep.max_deviation <= opts.dupin_tol) {
    rep.verdict = rep.g_constant && !failures ? DupinVerdict::ProperDupin : DupinVerdict::DupinMixedG;
  } else {
    rep.verdict = DupinVerdict::Inconclusive;
  }
  return rep;
}

namespace {

double param_distance(const ParamDomain& d, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double sum = 0.0;
  for (int i = 0; i < d.dim(); ++i) {
    double diff = std::abs(a[i] - b[i]);
    if (d.periodic[static_cast<std::size_t>(i)]) {
      const double period = d.hi[i] - d.lo[i];
      diff = std::fmod(diff, period);
      diff = std::min(diff, period - diff);
    }
    sum += diff * diff;
  }
  return sum;
}

// r as a point of the projective line, seen as a circle of length pi.
double line_angle(double r) { return std::atan2(1.0, r); }

double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, std::numbers::pi - d);
}

}  // namespace

// Within one sample the spheres are sorted by r, but r runs over the projective
// line, so the order is only cyclic: a sphere passing the point sphere of the
// frame jumps from +inf to -inf. Each sample therefore takes the cyclic shift
// that best matches its nearest already-labelled sample, comparing arccot r.
TrackedSpheres track_curvature_spheres(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                       double cluster_tol) {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
  TrackedSpheres out;
  try {
    out.frame = choose_frame(map, spread_subset(samples, 32));
  } catch (const Error& e) {
    throw Error(ErrorKind::TrackingLost, std::string("no usable projection frame: ") + e.what());
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    CurvatureAnalysis ca;
    try {
      ca = curvature_spheres(map, samples[s], out.frame, cluster_tol);
    } catch (const Error& e) {
      if (!is_projection_failure(e)) throw;
      throw Error(ErrorKind::TrackingLost, "projection frame singular at sample " + std::to_string(s));
    }
    const std::size_t g = ca.spheres.size();
    if (s == 0) {
      out.K.resize(g);
      for (const auto& sp : ca.spheres) out.multiplicity.push_back(sp.multiplicity);
      out.angles.resize(g);
      for (std::size_t i = 0; i < g; ++i) {
        out.K[i].push_back(ca.spheres[i].K.normalized());
        out.angles[i].push_back(line_angle(ca.spheres[i].r));
      }
      continue;
    }
    if (g != out.K.size()) {
      throw Error(ErrorKind::TrackingLost, "curvature-sphere count changes at sample " + std::to_string(s));
    }
    std::vector<double> angles;
    for (const auto& sp : ca.spheres) angles.push_back(line_angle(sp.r));
    std::size_t near = 0;
    double near_d = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < s; ++p) {
      const double d = param_distance(map.domain(), samples[s], samples[p]);
      if (d < near_d) {
        near_d = d;
        near = p;
      }
    }
    std::size_t best_shift = g;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g; ++k) {
      bool same_mult = true;
      double cost = 0.0;
      for (std::size_t i = 0; i < g; ++i) {
        const auto& sp = ca.spheres[(i + k) % g];
        if (sp.multiplicity != out.multiplicity[i]) same_mult = false;
        cost += circle_distance(angles[(i + k) % g], out.angles[i][near]);
      }
      if (same_mult && cost < best_cost) {
        best_cost = cost;
        best_shift = k;
      }
    }
    if (best_shift == g) {
      throw Error(ErrorKind::TrackingLost, "curvature-sphere multiplicities change at sample " + std::to_string(s));
    }
    for (std::size_t i = 0; i < g; ++i) {
      out.K[i].push_back(ca.spheres[(i + best_shift) % g].K.normalized());
      out.angles[i].push_back(angles[(i + best_shift) % g]);
    }
  }
  return out;
}

SpanSummary focal_span(const LegendreMap& map, int sphere_index, const std::vector<Eigen::VectorXd>& samples,
                       double rank_tol) {
  const TrackedSpheres t = track_curvature_spheres(map, samples);
  if (sphere_index < 0 || sphere_index >= static_cast<int>(t.K.size())) {
    throw Error(ErrorKind::InvalidArgument, "sphere index out of range");
  }
  return span_summary(t.K[static_cast<std::size_t>(sphere_index)], rank_tol);
}

ReducibilityResult reducibility_test(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                     double rank_tol) {
  const TrackedSpheres t = track_curvature_spheres(map, samples);
  ReducibilityResult out;
  out.multiplicity = t.multiplicity;
  const int limit = map.chart_dim() + 1;
  for (std::size_t i = 0; i < t.K.size(); ++i) {
    out.spans.push_back(span_summary(t.K[i], rank_tol));
    if (!out.reducible && out.spans.back().dim <= limit) {
      out.reducible = true;
      out.witness_index = static_cast<int>(i);
    }
  }
  return out;
}

std::string_view to_string(CriterionVerdict v) {
  switch (v) {
    case CriterionVerdict::Witness: return "witness";
    case CriterionVerdict::NoWitness: return "no-witness";
    case CriterionVerdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

double timelike_residual_bound(const std::vector<LieVector>& samples) {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
  const int d = samples.front().size();
  const Eigen::MatrixXd j = metric(d - 3);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), d);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    m.row(static_cast<Eigen::Index>(s)) = samples[s].coords().normalized().transpose();
  }
  const Eigen::MatrixXd a = m * j;
  Eigen::MatrixXd h = a.transpose() * a / static_cast<double>(samples.size());
  const double eps = 1e-14 * std::max(h.trace(), 1.0);
  h += eps * Eigen::MatrixXd::Identity(d, d);
  // J x = nu H x; timelike minimizers of x^T H x on <x,x> = -1 have value -1/nu, nu < 0.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(j, h);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "eigen-solver failed");
  const double nu = es.eigenvalues().minCoeff();
  if (!(nu < 0)) throw Error(ErrorKind::NumericalFailure, "form has no timelike directions");
  Eigen::VectorXd x = es.eigenvectors().col(0);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] == nu) x = es.eigenvectors().col(i);
  }
  x /= std::sqrt(-lie_inner(x, x));
  return std::sqrt((a * x).squaredNorm() / static_cast<double>(samples.size()));
}

namespace {

struct NullSpace {
  Eigen::MatrixXd basis;  // Euclidean-orthonormal columns
  Eigen::VectorXd most_timelike;
  double min_eig = 0.0;   // smallest eigenvalue of the restricted form
};

NullSpace restricted(const Eigen::MatrixXd& basis) {
  NullSpace ns;
  ns.basis = basis;
  if (basis.cols() == 0) return ns;
  const Eigen::MatrixXd j = metric(static_cast<int>(basis.rows()) - 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(basis.transpose() * j * basis);
  ns.min_eig = es.eigenvalues()[0];
  ns.most_timelike = basis * es.eigenvectors().col(0);
  return ns;
}

Eigen::MatrixXd null_basis(const Eigen::MatrixXd& a, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? s[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tol * top) ++rank;
  }
  return svd.matrixV().rightCols(a.cols() - rank);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

double residual_against(const std::vector<LieVector>& k, const Eigen::VectorXd& p) {
  const Eigen::VectorXd unit = p / std::sqrt(std::abs(lie_inner(p, p)));
  double worst = 0.0;
  for (const auto& x : k) worst = std::max(worst, std::abs(lie_inner(x.coords(), unit)));
  return worst;
}

std::optional<CriterionWitness> assemble(const std::vector<Eigen::VectorXd>& ps, const TrackedSpheres& t,
                                         const CriterionOptions& opts) {
  const Eigen::Index d = ps.front().size();
  Eigen::MatrixXd stack(d, static_cast<Eigen::Index>(ps.size()));
  for (std::size_t i = 0; i < ps.size(); ++i) stack.col(static_cast<Eigen::Index>(i)) = ps[i].normalized();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s.size() < 2 || !(s[1] > kRankTol * s[0])) return std::nullopt;
  if (s.size() > 2 && s[2] > kRankTol * s[0]) return std::nullopt;
  const Eigen::MatrixXd q = svd.matrixU().leftCols(2);
  const Eigen::MatrixXd j = metric(static_cast<int>(d) - 3);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> plane(Eigen::Matrix2d(q.transpose() * j * q));
  if (!(plane.eigenvalues()[1] < -opts.margin)) return std::nullopt;

  CriterionWitness w;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double len2 = -lie_inner(ps[i], ps[i]);
    if (!(len2 > 0)) return std::nullopt;
    w.points.emplace_back(Eigen::VectorXd(2.0 * ps[i] / std::sqrt(len2)));
    w.residual = std::max(w.residual, residual_against(t.K[i], ps[i]));
  }
  if (!(w.residual < opts.residual_tol)) return std::nullopt;
  w.line_basis = {LieVector(Eigen::VectorXd(q.col(0))), LieVector(Eigen::VectorXd(q.col(1)))};

  // First pair of independent points; orient the second so the off-diagonal entry is negative.
  const Eigen::VectorXd& a = w.points[0].coords();
  for (std::size_t i = 1; i < w.points.size(); ++i) {
    Eigen::VectorXd b = w.points[i].coords();
    const double cross = lie_inner(a, b);
    if (std::abs(std::abs(cross) - 4.0) < 1e-6) continue;  // parallel to the first point
    if (cross > 0) b = -b;
    w.gram << lie_inner(a, a), lie_inner(a, b), lie_inner(b, a), lie_inner(b, b);
    return w;
  }
  return std::nullopt;
}

}  // namespace

CriterionResult isoparametric_criterion(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                        const CriterionOptions& opts) {
  const TrackedSpheres t = track_curvature_spheres(map, samples, opts.cluster_tol);
  const int d = map.chart_dim() + 3;
  const Eigen::MatrixXd j = metric(map.chart_dim());
  CriterionResult out;

  std::vector<NullSpace> nulls;
  for (const auto& ks : t.K) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(ks.size()), d);
    for (std::size_t s = 0; s < ks.size(); ++s) m.row(static_cast<Eigen::Index>(s)) = ks[s].coords().transpose();
    nulls.push_back(restricted(null_basis(m * j, opts.null_tol)));
    out.null_dims.push_back(static_cast<int>(nulls.back().basis.cols()));
  }

  bool impossible = false;
  for (std::size_t i = 0; i < nulls.size(); ++i) {
    if (nulls[i].basis.cols() == 0 || !(nulls[i].min_eig < -opts.margin)) {
      impossible = true;
      out.certified_bound = std::max(out.certified_bound, timelike_residual_bound(t.K[i]));
    }
  }
  if (impossible) {
    out.verdict = CriterionVerdict::NoWitness;
    out.note = "some curvature-sphere family is orthogonal to no timelike point";
    return out;
  }

  const std::size_t g = nulls.size();
  const bool all_simple = std::all_of(nulls.begin(), nulls.end(), [](const NullSpace& n) {
    return n.basis.cols() == 1;
  });
  if (all_simple) {
    std::vector<Eigen::VectorXd> ps;
    for (const auto& n : nulls) ps.push_back(n.basis.col(0));
    if (auto w = assemble(ps, t, opts)) {
      out.verdict = CriterionVerdict::Witness;
      out.witness = std::move(w);
    } else {
      out.verdict = CriterionVerdict::NoWitness;
      out.note = "the unique orthogonal points do not lie on a timelike line";
    }
    return out;
  }

  // Pencil search: most timelike v1 in N_a, a timelike v2 in N_b orthogonal to v1,
  // then every other N_i must meet span(v1, v2).
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t b = 0; b < g; ++b) {
      if (a == b) continue;
      const Eigen::VectorXd v1 = nulls[a].most_timelike;
      const Eigen::RowVectorXd constraint = (j * v1).transpose() * nulls[b].basis;
      Eigen::MatrixXd sub = nulls[b].basis * null_basis(constraint, 1e-10);
      if (sub.cols() == 0) continue;
      const NullSpace nb = restricted(orthonormalize(sub));
      if (!(nb.min_eig < -opts.margin)) continue;
      const Eigen::VectorXd v2 = nb.most_timelike;
      Eigen::MatrixXd plane(d, 2);
      plane << v1.normalized(), v2.normalized();
      const Eigen::MatrixXd q = orthonormalize(plane);

      std::vector<Eigen::VectorXd> ps(g);
      ps[a] = v1;
      ps[b] = v2;
      bool ok = true;
      for (std::size_t i = 0; i < g && ok; ++i) {
        if (i == a || i == b) continue;
        Eigen::MatrixXd joint(d, nulls[i].basis.cols() + 2);
        joint << nulls[i].basis, q;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(joint, Eigen::ComputeFullV);
        const Eigen::Index last = joint.cols() - 1;
        if (!(svd.singularValues()[last] < 1e-6)) {
          ok = false;
          break;
        }
        const Eigen::VectorXd coeff = svd.matrixV().col(last);
        ps[i] = nulls[i].basis * coeff.head(nulls[i].basis.cols());
      }
      if (!ok) continue;
      if (auto w = assemble(ps, t, opts)) {
        out.verdict = CriterionVerdict::Witness;
        out.witness = std::move(w);
        return out;
      }
    }
  }
  out.verdict = CriterionVerdict::Indeterminate;
  out.note = "pencil search found no timelike line meeting every orthogonal space";
  return out;
}

}  // namespace liesphere
