#pragma once

// Analysis driver and its JSON report. Keys are emitted in sorted order and
// numbers in shortest round-trip form, so identical inputs give identical bytes.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "liesphere/dupin.hpp"
#include "liesphere/legendre.hpp"

namespace liesphere {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct AnalysisInput {
  std::string kind;  // "generator" or "grid-file"
  std::string id;    // generator name or file path
  std::map<std::string, double> params;
};

struct AnalysisSettings {
  std::vector<int> grid;
  std::vector<std::string> criteria{"dupin"};  // any of dupin, reduce, isopara
  DupinOptions dupin;
  CriterionOptions criterion;
  double rank_tol = kRankTol;
  std::uint64_t seed = 0;
  bool timing = false;
};

struct AnalysisOutcome {
  nlohmann::json report;
  std::string summary;
  bool numerical_failure = false;
};

/// Throws invalid-argument for unknown criteria or a grid of the wrong rank.
AnalysisOutcome run_analysis(const LegendreMap& map, const AnalysisInput& input, const AnalysisSettings& settings);

nlohmann::json to_json(const PointRecord& p);
nlohmann::json to_json(const DupinReport& r);
nlohmann::json to_json(const ReducibilityResult& r);
nlohmann::json to_json(const CriterionResult& r);
nlohmann::json to_json(const ProjectionFrame& f);

/// Point records without leaf walks, in one frame chosen over the samples.
std::vector<PointRecord> point_records(const LegendreMap& map, const std::vector<Eigen::VectorXd>& samples,
                                       double cluster_tol);

/// Population standard deviation of each principal curvature over the samples,
/// or an empty vector when g or the multiplicities vary.
std::vector<double> curvature_spread(const std::vector<PointRecord>& points);

}  // namespace liesphere
