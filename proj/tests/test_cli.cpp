#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "liesphere/cli.hpp"
#include "liesphere/report.hpp"
#include "liesphere/zoo.hpp"

using namespace liesphere;
using nlohmann::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "liesphere");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("liesphere_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json golden(const std::string& name) {
  std::ifstream in(std::string(LIESPHERE_GOLDEN_DIR) + "/" + name + ".json");
  EXPECT_TRUE(in.good()) << name;
  return json::parse(in);
}

// Structural equality with a tolerance on floating-point leaves.
void expect_json_near(const json& a, const json& b, const std::string& path = "") {
  if (a.is_number_float() || b.is_number_float()) {
    ASSERT_TRUE(a.is_number() && b.is_number()) << path;
    const double x = a.get<double>(), y = b.get<double>();
    EXPECT_LE(std::abs(x - y), 1e-8 + 1e-6 * std::max(std::abs(x), std::abs(y))) << path;
    return;
  }
  ASSERT_EQ(a.type(), b.type()) << path;
  if (a.is_object()) {
    ASSERT_EQ(a.size(), b.size()) << path;
    for (auto it = a.begin(); it != a.end(); ++it) {
      ASSERT_TRUE(b.contains(it.key())) << path << "/" << it.key();
      expect_json_near(it.value(), b[it.key()], path + "/" + it.key());
    }
  } else if (a.is_array()) {
    ASSERT_EQ(a.size(), b.size()) << path;
    for (std::size_t i = 0; i < a.size(); ++i) expect_json_near(a[i], b[i], path + "/" + std::to_string(i));
  } else {
    EXPECT_EQ(a, b) << path;
  }
}

json analyze_report(const std::vector<std::string>& args) {
  const auto p = temp_path("report.json");
  std::vector<std::string> full = args;
  full.push_back("--out");
  full.push_back(p.string());
  const CliRun r = run(full);
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(slurp(p));
}

}  // namespace

TEST(CliEncode, PointCoordinates) {
  const CliRun r = run({"encode", "--point", "1,0,0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1 0 1 0 0 0\n");
}

TEST(CliEncode, JsonMode) {
  const CliRun r = run({"--json", "encode", "--sphere", "0,0,0:1"});
  EXPECT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["coords"], (std::vector<double>{0, 1, 0, 0, 0, 1}));
  EXPECT_EQ(run({"encode", "--point", "1,0,0", "--plane", "0,0,1:0"}).code, 2);
}

TEST(CliDecode, InfinityAndElements) {
  EXPECT_EQ(run({"decode", "--coords", "1,-1,0,0,0,0"}).out, "infinity\n");
  const CliRun p = run({"--json", "decode", "--coords", "1,0,1,0,0,0"});
  EXPECT_EQ(json::parse(p.out)["type"], "point");
  EXPECT_EQ(json::parse(p.out)["point"], (std::vector<double>{1, 0, 0}));
  const CliRun bad = run({"decode", "--coords", "1,0,0,0,0,0"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("not-a-sphere"), std::string::npos);
}

TEST(CliContact, SphereAndPlane) {
  EXPECT_EQ(run({"contact", "--sphere", "0,0,0:1", "--plane", "0,0,1:-1"}).out, "contact: true\n");
  EXPECT_EQ(run({"contact", "--sphere", "0,0,0:1", "--plane", "0,0,1:1"}).out, "contact: false\n");
  // A point on the sphere touches it; the same point does not touch the concentric sphere of radius 2.
  EXPECT_EQ(run({"contact", "--point", "0,0,1", "--sphere", "0,0,0:1"}).out, "contact: true\n");
  EXPECT_EQ(run({"contact", "--point", "0,0,1", "--sphere", "0,0,0:2"}).out, "contact: false\n");
  EXPECT_EQ(run({"contact", "--point", "0,0,1"}).code, 2);
  EXPECT_EQ(run({"contact", "--point", "0,0,1", "--point", "0,1"}).code, 2);
}

TEST(CliExitCodes, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "nosuch"}).code, 2);
  EXPECT_EQ(run({"analyze"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "torus", "--criteria", "dupin,bogus"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "torus:a=1,b=1"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "cartan:t=0"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "torus", "--grid", "4x4x4"}).code, 2);
  EXPECT_EQ(run({"analyze", "--grid-file", "/nonexistent/grid.txt"}).code, 2);
  EXPECT_EQ(run({"export-mesh", "--gen", "torus", "--frame", "sideways"}).code, 2);
}

TEST(CliExitCodes, EmptyMesh) {
  // With two rows along the first axis, the second row is the singular row of
  // the standard Euclidean frame, so every cell touches a skipped vertex.
  const CliRun r = run({"export-mesh", "--gen", "cyclide:p=1,q=1,n=3", "--frame", "euclidean", "--res", "2x8"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("8 of 16"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(AnalysisDriver, NumericalFailureGivesPartialReport) {
  const LegendreMap base = torus(2, 1).lift();
  const LegendreMap broken(base.chart_dim(), base.domain(), [base](const Eigen::VectorXd& b) {
    if (b[0] > 3.0) throw Error(ErrorKind::NumericalFailure, "synthetic breakdown");
    return base.line_at(b);
  }, base.provenance());
  AnalysisSettings s;
  s.grid = {4, 4};
  s.criteria = {"dupin", "reduce"};
  const AnalysisOutcome out = run_analysis(broken, {"generator", "broken", {}}, s);
  EXPECT_TRUE(out.numerical_failure);
  EXPECT_NE(out.report["error"].get<std::string>().find("synthetic"), std::string::npos);
  EXPECT_TRUE(out.report.contains("settings"));
  EXPECT_FALSE(out.report.contains("points"));
  EXPECT_NE(out.summary.find("numerical-failure"), std::string::npos);
}

TEST(CliAnalyze, EllipsoidIsNotDupin) {
  const json j = analyze_report({"analyze", "--gen", "ellipsoid:1,2,3"});
  EXPECT_EQ(j["verdicts"]["dupin"]["verdict"], "not-Dupin");
  EXPECT_EQ(j["input"]["params"]["c"], 3.0);
}

TEST(CliAnalyze, SummaryLineAndReportFile) {
  const auto p = temp_path("summary.json");
  const CliRun r = run({"analyze", "--gen", "cyclide:p=1,q=1,n=3", "--criteria", "dupin,reduce", "--out", p.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "analyze cyclide: g=2 dupin=proper-Dupin reduce=reducible\n");
  EXPECT_EQ(json::parse(slurp(p))["verdicts"]["reducibility"]["verdict"], "reducible");
}

TEST(CliAnalyze, ConfigFileSuppliesDefaults) {
  const auto cfg = temp_path("config.toml");
  std::ofstream(cfg) << "[analyze]\ngrid = \"3x3\"\ncriteria = \"dupin,reduce\"\n";
  const json j = analyze_report({"--config", cfg.string(), "analyze", "--gen", "torus:a=2,b=1"});
  EXPECT_EQ(j["settings"]["grid"], (std::vector<int>{3, 3}));
  EXPECT_TRUE(j["verdicts"].contains("reducibility"));
  // Flags override the file.
  const json k = analyze_report({"--config", cfg.string(), "analyze", "--gen", "torus:a=2,b=1", "--grid", "4x5"});
  EXPECT_EQ(k["settings"]["grid"], (std::vector<int>{4, 5}));
}

TEST(CliAnalyze, GridFileInput) {
  const auto grid = temp_path("grid.txt");
  {
    std::ofstream out(grid);
    out.precision(17);
    out << "# torus patch\n3 2 49 49\n";
    for (int i = 0; i < 49; ++i) {
      for (int j = 0; j < 49; ++j) {
        const double u = 0.2 + 1.2 * i / 48.0, v = -0.6 + 1.2 * j / 48.0;
        const double r = 2 + std::cos(v);
        out << u << ' ' << v << ' ' << r * std::cos(u) << ' ' << r * std::sin(u) << ' ' << std::sin(v) << '\n';
      }
    }
  }
  const json j = analyze_report({"analyze", "--grid-file", grid.string(), "--grid", "3x3"});
  EXPECT_EQ(j["input"]["kind"], "grid-file");
  EXPECT_EQ(j["summary"]["g"], 2);
  for (const auto& p : j["points"]) {
    std::vector<double> r = p["r"];
    std::sort(r.begin(), r.end());
    const double v = p["b"][1];
    // Outward normal of the spline patch: curvatures -1 and -cos v / (2 + cos v).
    EXPECT_NEAR(r[0], -1.0, 1e-3);
    EXPECT_NEAR(r[1], -std::cos(v) / (2 + std::cos(v)), 1e-3);
  }
}

TEST(CliGolden, TorusReport) {
  const json g = golden("torus");
  expect_json_near(analyze_report({"analyze", "--gen", "torus:a=2,b=1", "--criteria", "dupin,reduce,isopara"}), g);
  // The stored radii are the principal curvatures cos v / (2 + cos v) and 1.
  for (const auto& p : g["points"]) {
    const double v = p["b"][1];
    std::vector<double> r = p["r"];
    std::vector<double> expect{std::cos(v) / (2 + std::cos(v)), 1.0};
    std::sort(expect.begin(), expect.end());
    EXPECT_NEAR(r[0], expect[0], 1e-8);
    EXPECT_NEAR(r[1], expect[1], 1e-8);
  }
  EXPECT_EQ(g["verdicts"]["dupin"]["verdict"], "proper-Dupin");
}

TEST(CliGolden, CyclideReport) {
  const json g = golden("cyclide");
  expect_json_near(analyze_report({"analyze", "--gen", "cyclide:p=1,q=1,n=3", "--criteria", "dupin,reduce,isopara"}), g);
  EXPECT_EQ(g["summary"]["g"], 2);
  EXPECT_EQ(g["verdicts"]["dupin"]["verdict"], "proper-Dupin");
  EXPECT_EQ(g["verdicts"]["reducibility"]["verdict"], "reducible");
}

TEST(CliGolden, CartanReport) {
  const json g = golden("cartan");
  expect_json_near(
      analyze_report({"analyze", "--gen", "cartan:t=0.5235987755982988", "--criteria", "dupin,reduce,isopara"}), g);
  EXPECT_EQ(g["summary"]["g"], 3);
  EXPECT_EQ(g["verdicts"]["reducibility"]["verdict"], "not-reducible");
  // cot(k pi/3 - pi/6) for k = 0, 1, 2.
  const double s3 = std::sqrt(3.0);
  for (const auto& p : g["points"]) {
    std::vector<double> r = p["r"];
    std::sort(r.begin(), r.end());
    EXPECT_NEAR(r[0], -s3, 1e-7);
    EXPECT_NEAR(r[1], 0.0, 1e-7);
    EXPECT_NEAR(r[2], s3, 1e-7);
  }
  const auto& gram = g["verdicts"]["isoparametric"]["witness"]["gram"];
  const double scale = -gram[0][0].get<double>() / 4.0;
  EXPECT_GT(scale, 0.0);
  EXPECT_NEAR(gram[0][1].get<double>() / scale, -2.0, 1e-6);
  EXPECT_NEAR(gram[1][0].get<double>() / scale, -2.0, 1e-6);
  EXPECT_NEAR(gram[1][1].get<double>() / scale, -4.0, 1e-6);
}

TEST(CliDeterminism, ReportsAndMeshesAreByteIdentical) {
  const auto a = temp_path("det_a.json");
  const auto b = temp_path("det_b.json");
  for (const auto& p : {a, b}) {
    ASSERT_EQ(run({"--seed", "7", "analyze", "--gen", "cartan:t=0.4", "--grid", "5x5x5", "--criteria",
                   "dupin,reduce,isopara", "--out", p.string()})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(a), slurp(b));
  const CliRun m1 = run({"export-mesh", "--gen", "torus:a=2,b=1", "--res", "16x16"});
  const CliRun m2 = run({"export-mesh", "--gen", "torus:a=2,b=1", "--res", "16x16"});
  EXPECT_EQ(m1.code, 0);
  EXPECT_EQ(m1.out, m2.out);
}

TEST(CliExportMesh, TorusAndSkippedCells) {
  const auto obj = temp_path("torus.obj");
  const CliRun t = run({"export-mesh", "--gen", "torus:a=2,b=1", "--res", "64x64", "--out", obj.string()});
  EXPECT_EQ(t.code, 0);
  EXPECT_EQ(t.out, "export-mesh torus: vertices=4096 faces=4096 skipped_vertices=0 skipped_faces=0\n");
  const std::string text = slurp(obj);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2 + 4096 * 3);

  const CliRun c = run({"export-mesh", "--gen", "cyclide:p=1,q=1,n=3", "--frame", "euclidean", "--out", obj.string()});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("skipped_vertices=64 skipped_faces=128"), std::string::npos);
  EXPECT_NE(c.err.find("skipped 64"), std::string::npos);

  const CliRun k = run({"export-mesh", "--gen", "cartan:t=0.5235987755982988", "--res", "12x12", "--stereo"});
  EXPECT_EQ(k.code, 0);
  EXPECT_EQ(k.out.rfind("# liesphere cartan", 0), 0u);
}
