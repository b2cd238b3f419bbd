#include "liesphere/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace liesphere {

namespace {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json span_json(const SpanSummary& s) {
  return json{{"dim", s.dim},
              {"signature", {s.signature.n_plus, s.signature.n_minus, s.signature.n_zero}},
              {"smallest_retained", s.smallest_retained},
              {"largest_discarded", s.largest_discarded}};
}

bool is_projection_failure(const Error& e) {
  return e.kind() == ErrorKind::ProjectionSingular || e.kind() == ErrorKind::NotAnImmersion;
}

}  // namespace

json to_json(const PointRecord& p) {
  return json{{"b", vec_json(p.b)},     {"g", p.g},
              {"r", p.r},               {"multiplicity", p.multiplicity},
              {"stable", p.stable},     {"fallback_frame", p.fallback_frame}};
}

json to_json(const ProjectionFrame& f) {
  return json{{"kind", f.kind == ProjectionKind::Euclidean ? "euclidean" : "spherical"}, {"angle", f.angle}};
}

json to_json(const DupinReport& r) {
  json spheres = json::array();
  for (const auto& s : r.spheres) {
    spheres.push_back(json{{"index", s.index},
                           {"multiplicity", s.multiplicity},
                           {"max_deviation", s.max_deviation},
                           {"leaves", s.leaves}});
  }
  return json{{"verdict", std::string(to_string(r.verdict))},
              {"g", r.g},
              {"g_constant", r.g_constant},
              {"all_stable", r.all_stable},
              {"max_deviation", r.max_deviation},
              {"spheres", spheres},
              {"frame", to_json(r.frame)},
              {"notes", r.notes}};
}

json to_json(const ReducibilityResult& r) {
  json spans = json::array();
  for (const auto& s : r.spans) spans.push_back(span_json(s));
  return json{{"verdict", r.reducible ? "reducible" : "not-reducible"},
              {"reducible", r.reducible},
              {"witness_index", r.witness_index},
              {"multiplicity", r.multiplicity},
              {"spans", spans}};
}

json to_json(const CriterionResult& r) {
  json out{{"verdict", std::string(to_string(r.verdict))},
           {"null_dims", r.null_dims},
           {"certified_bound", r.certified_bound},
           {"note", r.note}};
  if (r.witness) {
    const auto& w = *r.witness;
    json pts = json::array();
    for (const auto& p : w.points) pts.push_back(vec_json(p.coords()));
    out["witness"] = json{{"points", pts},
                          {"line_basis", {vec_json(w.line_basis[0].coords()), vec_json(w.line_basis[1].coords())}},
                          {"gram", {{w.gram(0, 0), w.gram(0, 1)}, {w.gram(1, 0), w.gram(1, 1)}}},
                          {"residual", w.residual}};
  }
  return out;
}

std::vector<PointRecord> point_records(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                       double cluster_tol) {
  std::vector<PointRecord> out;
  if (samples.empty()) return out;
  std::vector<Eigen::VectorXd> sub;
  for (std::size_t j = 0; j < std::min<std::size_t>(32, samples.size()); ++j) {
    sub.push_back(samples[(2 * j + 1) * samples.size() / (2 * std::min<std::size_t>(32, samples.size()))]);
  }
  const ProjectionFrame frame = choose_frame(map, sub);
  for (const auto& b : samples) {
    PointRecord rec;
    rec.b = b;
    std::optional<CurvatureAnalysis> ca;
    try {
      ca = curvature_spheres(map, b, frame, cluster_tol);
    } catch (const Error& e) {
      if (!is_projection_failure(e)) throw;
      try {
        ca = curvature_spheres(map, b, cluster_tol);
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
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<double> curvature_spread(const std::vector<PointRecord>& points) {
  if (points.empty()) return {};
  const auto& m0 = points.front().multiplicity;
  for (const auto& p : points) {
    if (p.g == 0 || p.multiplicity != m0) return {};
  }
  std::vector<double> out;
  const double count = static_cast<double>(points.size());
  for (std::size_t i = 0; i < m0.size(); ++i) {
    double mean = 0.0;
    for (const auto& p : points) mean += p.r[i];
    mean /= count;
    double var = 0.0;
    for (const auto& p : points) var += (p.r[i] - mean) * (p.r[i] - mean);
    out.push_back(std::sqrt(var / count));
  }
  return out;
}

AnalysisOutcome run_analysis(const LegendreMap& map, const AnalysisInput& input, const AnalysisSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  bool want_dupin = false;
  bool want_reduce = false;
  bool want_isopara = false;
  for (const auto& c : settings.criteria) {
    if (c == "dupin") {
      want_dupin = true;
    } else if (c == "reduce") {
      want_reduce = true;
    } else if (c == "isopara") {
      want_isopara = true;
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown criterion '" + c + "'");
    }
  }
  if (static_cast<int>(settings.grid.size()) != map.dim()) {
    throw Error(ErrorKind::InvalidArgument, "grid needs " + std::to_string(map.dim()) + " axes");
  }

  AnalysisOutcome out;
  json& rep = out.report;
  rep["schema_version"] = kSchemaVersion;
  rep["tool_version"] = kToolVersion;
  json in{{"kind", input.kind}, {"id", input.id}};
  if (!input.params.empty()) in["params"] = input.params;
  rep["input"] = in;
  DupinOptions dopts = settings.dupin;
  dopts.seed = settings.seed;
  rep["settings"] = json{{"grid", settings.grid},
                         {"criteria", settings.criteria},
                         {"seed", settings.seed},
                         {"fd_step", map.fd_step()},
                         {"cluster_tol", dopts.cluster_tol},
                         {"dupin_tol", dopts.dupin_tol},
                         {"not_dupin_tol", dopts.not_dupin_tol},
                         {"leaf_length", dopts.leaf_length},
                         {"leaf_step", dopts.leaf_step},
                         {"leaf_seeds", dopts.leaf_seeds},
                         {"rank_tol", settings.rank_tol},
                         {"null_tol", settings.criterion.null_tol},
                         {"residual_tol", settings.criterion.residual_tol}};
  rep["chart_dim"] = map.chart_dim();
  rep["provenance"] = std::string(to_string(map.provenance()));
  json verdicts = json::object();
  std::ostringstream summary;
  summary << "analyze " << input.id << ":";

  const auto samples = grid_samples(map.domain(), settings.grid);
  try {
    std::vector<PointRecord> points;
    if (want_dupin) {
      const DupinReport dr = dupin_verify(map, samples, dopts);
      points = dr.points;
      verdicts["dupin"] = to_json(dr);
    } else {
      points = point_records(map, samples, dopts.cluster_tol);
    }
    json pj = json::array();
    for (const auto& p : points) pj.push_back(to_json(p));
    rep["points"] = pj;
    int g = points.empty() ? 0 : points.front().g;
    bool g_constant = true;
    for (const auto& p : points) g_constant = g_constant && p.g == g;
    const auto spread = curvature_spread(points);
    rep["summary"] = json{{"g", g}, {"g_constant", g_constant}, {"samples", points.size()}, {"r_stddev", spread}};
    summary << " g=" << g << (g_constant ? "" : " (varies)");
    if (want_dupin) summary << " dupin=" << verdicts["dupin"]["verdict"].get<std::string>();
  } catch (const Error& e) {
    if (!is_projection_failure(e) && e.kind() != ErrorKind::NumericalFailure) throw;
    out.numerical_failure = true;
    rep["error"] = e.what();
  }

  if (!out.numerical_failure && want_reduce) {
    try {
      verdicts["reducibility"] = to_json(reducibility_test(map, samples, settings.rank_tol));
      summary << " reduce=" << verdicts["reducibility"]["verdict"].get<std::string>();
    } catch (const Error& e) {
      verdicts["reducibility"] = json{{"verdict", "error"}, {"error", e.what()}};
      summary << " reduce=error";
    }
  }
  if (!out.numerical_failure && want_isopara) {
    CriterionOptions copts = settings.criterion;
    copts.cluster_tol = dopts.cluster_tol;
    try {
      verdicts["isoparametric"] = to_json(isoparametric_criterion(map, samples, copts));
      summary << " isopara=" << verdicts["isoparametric"]["verdict"].get<std::string>();
    } catch (const Error& e) {
      verdicts["isoparametric"] = json{{"verdict", "error"}, {"error", e.what()}};
      summary << " isopara=error";
    }
  }
  rep["verdicts"] = verdicts;
  if (out.numerical_failure) summary << " numerical-failure";
  if (settings.timing) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    rep["timing"] = json{{"total_seconds", dt.count()}};
  }
  out.summary = summary.str();
  return out;
}

}  // namespace liesphere
