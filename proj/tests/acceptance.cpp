// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "contact_pairs.hpp"
#include "liesphere/cli.hpp"
#include "liesphere/curvature.hpp"
#include "liesphere/dupin.hpp"
#include "liesphere/report.hpp"
#include "liesphere/zoo.hpp"

using namespace liesphere;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

// ---- 1: contact equivalence ------------------------------------------------

Outcome contact_equivalence() {
  std::mt19937_64 rng(2024);
  int agree = 0, total = 0;
  std::vector<int> combos(16, 0);
  double worst_touching = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const int n = 2 + i % 3;
    const auto pair = contact_pairs::random_pair(rng, n);
    const LieVector a = encode(pair.a, n), b = encode(pair.b, n);
    const bool lie = oriented_contact_lie(a, b, 1e-9);
    const bool euc = oriented_contact_euclidean(pair.a, pair.b);
    agree += (lie == euc && euc == pair.contact) ? 1 : 0;
    ++combos[static_cast<std::size_t>(pair.combo)];
    ++total;
    if (pair.contact) {
      worst_touching =
          std::max(worst_touching, std::abs(lie_inner(a, b)) / (a.coords().norm() * b.coords().norm()));
    }
  }
  Outcome o;
  o.pass = agree == total && worst_touching < 1e-9 &&
           std::all_of(combos.begin(), combos.end(), [](int c) { return c > 0; });
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree, max touching residual " +
             fmt("%.2e", worst_touching);
  return o;
}

// ---- 2: h = -A on random polynomial graphs -----------------------------------

// w = sum a_i x_i + x^T Q x / 2 + sum_{ijk} c_ijk x_i x_j x_k over m variables.
struct PolyGraph {
  int m = 2;
  Eigen::VectorXd a;
  Eigen::MatrixXd q;
  std::vector<double> c;  // m^3, symmetric

  double cubic(int i, int j, int k) const { return c[static_cast<std::size_t>((i * m + j) * m + k)]; }
  double value(const Eigen::VectorXd& x) const {
    double w = a.dot(x) + 0.5 * x.dot(q * x);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) w += cubic(i, j, k) * x[i] * x[j] * x[k];
    return w;
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = a + q * x;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) g[i] += 3 * cubic(i, j, k) * x[j] * x[k];
    return g;
  }
  Eigen::MatrixXd hess(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd h = q;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) h(i, j) += 6 * cubic(i, j, k) * x[k];
    return h;
  }
  SurfaceData surface() const {
    const PolyGraph p = *this;
    ImmersionOracle f;
    f.domain = ParamDomain::box(Eigen::VectorXd::Constant(m, -0.5), Eigen::VectorXd::Constant(m, 0.5));
    f.eval = [p](const Eigen::VectorXd& x) {
      Eigen::VectorXd out(p.m + 1);
      out << x, p.value(x);
      return out;
    };
    VectorField xi = [p](const Eigen::VectorXd& x) {
      Eigen::VectorXd n(p.m + 1);
      n << -p.grad(x), 1.0;
      return Eigen::VectorXd(n.normalized());
    };
    return SurfaceData{f, xi};
  }
};

PolyGraph random_poly(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(-1, 1);
  PolyGraph p;
  p.m = m;
  p.a = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) p.a[i] = 0.5 * u(rng);
  Eigen::MatrixXd q(m, m);
  for (int i = 0; i < m * m; ++i) q(i / m, i % m) = u(rng);
  p.q = q + q.transpose();
  std::vector<double> raw(static_cast<std::size_t>(m * m * m));
  for (double& x : raw) x = 0.5 * u(rng);
  p.c.assign(raw.size(), 0.0);
  // Symmetrize over the six permutations.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const int idx[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
        double s = 0;
        for (const auto& t : idx) s += raw[static_cast<std::size_t>((t[0] * m + t[1]) * m + t[2])];
        p.c[static_cast<std::size_t>((i * m + j) * m + k)] = s / 6.0;
      }
  return p;
}

Outcome second_form_identity() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  int graphs = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int m = trial % 2 == 0 ? 2 : 3;
    const PolyGraph p = random_poly(rng, m);
    const SurfaceData s = p.surface();
    const LegendreMap map = s.lift();
    ++graphs;
    for (const auto& b : s.f.domain.interior_grid(2)) {
      // Analytic shape operator: g = I + grad grad^T, II = Hess / W, A = g^{-1} II.
      const Eigen::VectorXd gr = p.grad(b);
      const double w = std::sqrt(1.0 + gr.squaredNorm());
      const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(m, m) + gr * gr.transpose();
      const Eigen::MatrixXd a = g.ldlt().solve(p.hess(b) / w);
      const Eigen::MatrixXd l = g.llt().matrixL();
      const Eigen::MatrixXd c = l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));
      const Eigen::MatrixXd a_ortho = c.inverse() * a * c;
      const Eigen::MatrixXd h = lie_second_form(map, b);
      worst = std::max(worst, (h + a_ortho).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-5, std::to_string(graphs) + " graphs in R^3 and R^4, max |h + A| " + fmt("%.2e", worst)};
}

// ---- 3: cyclide structure ----------------------------------------------------

Outcome cyclide_structure() {
  Outcome o;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {3, 1}, {2, 2}}) {
    const int n = p + q + 1;
    const LegendreMap c = cyclide(CyclideSpec::make(p, q, n));
    const auto samples = grid_samples(c.domain(), std::vector<int>(static_cast<std::size_t>(c.dim()), 4));
    bool ok = true;
    for (const auto& b : samples) {
      const auto ca = curvature_spheres(c, b);
      std::vector<int> mult;
      for (const auto& s : ca.spheres) mult.push_back(s.multiplicity);
      std::sort(mult.begin(), mult.end());
      ok = ok && ca.g() == 2 && mult == std::vector<int>{std::min(p, q), std::max(p, q)};
    }
    const auto r = reducibility_test(c, samples);
    std::string spans;
    for (std::size_t i = 0; i < r.spans.size(); ++i) {
      // The family of multiplicity p is [e1 + u], u in S^q, spanning q + 2 dimensions.
      const int other = r.multiplicity[i] == p ? q : p;
      const auto& s = r.spans[i];
      ok = ok && s.dim == other + 2 && s.signature == Signature{other + 1, 1, 0};
      spans += " " + std::to_string(s.dim) + "(" + std::to_string(s.signature.n_plus) + "," +
               std::to_string(s.signature.n_minus) + ")";
    }
    ok = ok && r.spans.size() == 2;
    o.pass = o.pass && ok;
    o.detail += "(" + std::to_string(p) + "," + std::to_string(q) + "):" + spans + (ok ? "" : " BAD") + "; ";
  }
  return o;
}

// ---- 4: Dupin verification -----------------------------------------------------

Outcome dupin_verification() {
  Outcome o;
  for (const std::string id : {"torus:a=2,b=1", "pinkall-cylinder", "pinkall-revolution", "pinkall-cone",
                               "pinkall-tube"}) {
    const auto g = make_generator(parse_generator(id));
    const auto rep = dupin_verify(g.map, grid_samples(g.map.domain(), g.default_grid));
    const bool ok = rep.verdict == DupinVerdict::ProperDupin && rep.max_deviation < 1e-4;
    o.pass = o.pass && ok;
    o.detail += id + " " + std::string(to_string(rep.verdict)) + " " + fmt("%.1e", rep.max_deviation) + "; ";
  }
  const auto e = make_generator(parse_generator("ellipsoid:1,2,3"));
  const auto rep = dupin_verify(e.map, grid_samples(e.map.domain(), e.default_grid));
  const bool ok = rep.verdict == DupinVerdict::NotDupin && rep.max_deviation > 1e-2;
  o.pass = o.pass && ok;
  o.detail += "ellipsoid " + std::string(to_string(rep.verdict)) + " " + fmt("%.1e", rep.max_deviation);
  return o;
}

// ---- 5: Lie invariance ----------------------------------------------------------

std::size_t nearest(const std::vector<CurvatureSphere>& spheres, const LieVector& x) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < spheres.size(); ++j) {
    if (projective_distance(spheres[j].K, x) < projective_distance(spheres[best].K, x)) best = j;
  }
  return best;
}

Outcome lie_invariance() {
  const LegendreMap tor = torus(2, 1).lift();
  const LegendreMap ell = ellipsoid(1, 2, 3).lift();
  const LegendreMap cyc = cyclide(CyclideSpec::make(1, 1, 3));
  const auto cart = cartan_hypersurface(kPi / 6);
  const auto s2 = grid_samples(tor.domain(), {4, 4});
  const auto s_ell = grid_samples(ell.domain(), {4, 4});
  const auto s_cyc = grid_samples(cyc.domain(), {6, 6});
  const auto s_cart = grid_samples(cart.map.domain(), {5, 5, 5});

  const auto base_tor = dupin_verify(tor, s2);
  const auto base_ell = dupin_verify(ell, s_ell);
  const bool base_cyc = reducibility_test(cyc, s_cyc).reducible;
  const bool base_cart = reducibility_test(cart.map, s_cart).reducible;
  const auto cr_samples = grid_samples(cart.map.domain(), {2, 2, 2});

  // Cross-ratio of the three curvature spheres and the point sphere Y1.
  std::vector<double> base_cr;
  for (const auto& b : cr_samples) {
    const LieLine line = cart.map.line_at(b);
    const auto ca = curvature_spheres(cart.map, b);
    base_cr.push_back(cross_ratio_of_points(line, {ca.spheres[0].K, ca.spheres[1].K, ca.spheres[2].K, line.y1}));
  }

  Outcome o;
  double worst_cr = 0.0;
  int mismatches = 0;
  // Radii -sqrt 3, 0, sqrt 3 and the point sphere at r = infinity: (r1 - r3) / (r2 - r3) = 2.
  for (double cr : base_cr) worst_cr = std::max(worst_cr, std::abs(cr - 2.0));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g3 = random_lie_transform(seed, 3, 0.3);
    const auto g4 = random_lie_transform(seed, 4, 0.3);
    const auto mt = dupin_verify(transformed(tor, g3), s2);
    const auto me = dupin_verify(transformed(ell, g3), s_ell);
    mismatches += mt.verdict != base_tor.verdict || mt.g != base_tor.g;
    mismatches += me.verdict != base_ell.verdict || me.g != base_ell.g;
    mismatches += reducibility_test(transformed(cyc, g3), s_cyc).reducible != base_cyc;
    const LegendreMap moved = transformed(cart.map, g4);
    mismatches += reducibility_test(moved, s_cart).reducible != base_cart;
    for (std::size_t i = 0; i < cr_samples.size(); ++i) {
      const auto& b = cr_samples[i];
      const LieLine orig = cart.map.line_at(b);
      const auto ca0 = curvature_spheres(cart.map, b);
      const auto ca = curvature_spheres(moved, b);
      if (ca.g() != 3) {
        ++mismatches;
        continue;
      }
      std::array<LieVector, 4> pts;
      for (std::size_t k = 0; k < 3; ++k) pts[k] = ca.spheres[nearest(ca.spheres, apply(g4, ca0.spheres[k].K))].K;
      pts[3] = apply(g4, orig.y1);
      worst_cr = std::max(worst_cr, std::abs(cross_ratio_of_points(moved.line_at(b), pts) - base_cr[i]));
    }
  }
  o.pass = mismatches == 0 && worst_cr < 1e-9;
  o.detail = "10 transforms: " + std::to_string(mismatches) + " verdict/g mismatches, max cross-ratio drift " +
             fmt("%.2e", worst_cr) + " (base " + fmt("%.6f", base_cr.front()) + ")";
  return o;
}

// ---- 6: Veronese identities ----------------------------------------------------

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix3d a;
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  Eigen::Matrix3d q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

Outcome veronese_identities() {
  std::mt19937_64 rng(5);
  Eigen::VectorXd e45 = Eigen::VectorXd::Zero(5);
  e45[3] = e45[4] = 1.0;
  double alg = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = f_frames(random_rotation(rng));
    alg = std::max(alg, (s.frame.F[0] + s.frame.F[1] + s.frame.F[2] - e45).cwiseAbs().maxCoeff());
    alg = std::max(alg, (s.Z3 + s.Z4 + s.Z5).cwiseAbs().maxCoeff());
  }
  std::normal_distribution<double> g;
  const double h = 1e-4;
  double diff = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Matrix3d a0 = random_rotation(rng);
    const Eigen::Vector3d w(g(rng), g(rng), g(rng));
    Eigen::Matrix3d omega;
    omega << 0, w[2], -w[1], -w[2], 0, w[0], w[1], -w[0], 0;
    const Eigen::Vector3d th = maurer_cartan_theta(omega);
    auto at = [&](double t) { return f_frames(Eigen::Matrix3d(matrix_exponential(t * omega)) * a0); };
    const auto s0 = at(0), sp = at(h), sm = at(-h);
    const Eigen::VectorXd dF1 = (sp.frame.F[0] - sm.frame.F[0]) / (2 * h);
    diff = std::max(diff, (dF1 - (-s0.frame.G31 * th[1] + s0.frame.G12 * th[2])).cwiseAbs().maxCoeff());
  }
  return {alg < 1e-12 && diff < 1e-5,
          "sum identities " + fmt("%.1e", alg) + " over 1000 rotations, dF1 " + fmt("%.1e", diff) + " over 100 subgroups"};
}

// ---- 7: Cartan hypersurface ------------------------------------------------------

Outcome cartan_hypersurface_check() {
  Outcome o;
  for (double t : {kPi / 12, kPi / 6, kPi / 4}) {
    const auto c = cartan_hypersurface(t);
    const auto samples = grid_samples(c.map.domain(), {20, 20, 20});
    const auto rep = dupin_verify(c.map, samples);
    bool ok = rep.verdict == DupinVerdict::ProperDupin && rep.g_constant && rep.g == 3;
    const auto spread = curvature_spread(rep.points);
    double worst_sd = spread.size() == 3 ? 0.0 : 1.0;
    for (double sd : spread) worst_sd = std::max(worst_sd, sd);
    ok = ok && worst_sd < 1e-5;
    const auto red = reducibility_test(c.map, samples);
    ok = ok && !red.reducible;
    const auto crit = isoparametric_criterion(c.map, samples);
    double gram_err = 1.0;
    if (crit.verdict == CriterionVerdict::Witness && crit.witness) {
      Eigen::Matrix2d target;
      target << -4, -2, -2, -4;
      gram_err = (crit.witness->gram - target).cwiseAbs().maxCoeff();
    }
    ok = ok && gram_err < 1e-4;
    o.pass = o.pass && ok;
    o.detail += "t=" + fmt("%.4f", t) + " g=" + std::to_string(rep.g) + " sd " + fmt("%.1e", worst_sd) + " " +
                std::string(to_string(rep.verdict)) + (red.reducible ? " reducible" : " not-reducible") +
                " gram " + fmt("%.1e", gram_err) + "; ";
  }
  return o;
}

// ---- 8: reducibility discrimination -------------------------------------------

std::vector<Eigen::VectorXd> jittered(const ParamDomain& d, const std::vector<int>& counts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  std::vector<Eigen::VectorXd> out = grid_samples(d, counts);
  for (auto& b : out) {
    for (int i = 0; i < d.dim(); ++i) {
      const double cell = (d.hi[i] - d.lo[i]) / counts[static_cast<std::size_t>(i)];
      b[i] += (u(rng) - 0.5) * cell;
    }
  }
  return out;
}

Outcome reducibility_discrimination() {
  struct Case {
    std::string name;
    LegendreMap map;
    std::vector<int> grid;
    bool expect;
  };
  std::vector<Case> cases;
  for (const std::string kind : {"cylinder", "revolution", "cone", "tube"}) {
    const auto g = make_generator(parse_generator("pinkall-" + kind));
    cases.push_back({"pinkall-" + kind, g.map, {4, 4, 3}, true});
  }
  for (double t : {0.5, kPi / 6}) cases.push_back({"cartan", cartan_hypersurface(t).map, {5, 5, 5}, false});
  cases.push_back({"cyclide(1,1)", cyclide(CyclideSpec::make(1, 1, 3)), {6, 6}, true});
  cases.push_back({"cyclide(2,1)", cyclide(CyclideSpec::make(2, 1, 4)), {4, 4, 4}, true});
  int agree = 0, total = 0;
  std::string wrong;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const auto& c : cases) {
      const bool red = reducibility_test(c.map, jittered(c.map.domain(), c.grid, seed)).reducible;
      ++total;
      if (red == c.expect) {
        ++agree;
      } else {
        wrong += " " + c.name + "@" + std::to_string(seed);
      }
    }
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " verdicts agree" + wrong};
}

// ---- 9: cyclide equivalence ---------------------------------------------------

Outcome cyclide_equivalence_check() {
  double worst = 0.0;
  int runs = 0;
  bool all_lie = true;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}}) {
    const int n = p + q + 1;
    const LegendreMap c = cyclide(CyclideSpec::make(p, q, n));
    const auto s = grid_samples(c.domain(), std::vector<int>(static_cast<std::size_t>(c.dim()), p + q == 2 ? 6 : 4));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const LegendreMap moved = transformed(c, random_lie_transform(seed, n, 0.4));
      const auto eq = cyclide_equivalence(c, s, moved, s);
      all_lie = all_lie && is_lie_transform(eq.g.matrix());
      worst = std::max(worst, eq.membership_residual);
      ++runs;
    }
  }
  return {worst < 1e-6 && all_lie, std::to_string(runs) + " images, max membership residual " + fmt("%.2e", worst)};
}

// ---- 10: determinism ------------------------------------------------------------

std::string run_to_file(const std::vector<std::string>& args, const std::filesystem::path& out) {
  std::vector<std::string> full{"liesphere"};
  full.insert(full.end(), args.begin(), args.end());
  full.push_back("--out");
  full.push_back(out.string());
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());
  std::ostringstream so, se;
  if (run_cli(static_cast<int>(argv.size()), argv.data(), so, se) != 0) return "exit-error";
  std::ifstream in(out, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  int identical = 0, total = 0;
  for (const std::vector<std::string> args :
       {std::vector<std::string>{"analyze", "--gen", "torus:a=2,b=1", "--criteria", "dupin,reduce,isopara"},
        std::vector<std::string>{"--seed", "3", "analyze", "--gen", "cartan:t=0.5236", "--grid", "6x6x6",
                                 "--criteria", "dupin,reduce,isopara"},
        std::vector<std::string>{"analyze", "--gen", "pinkall-tube", "--criteria", "dupin,reduce"},
        std::vector<std::string>{"export-mesh", "--gen", "cyclide:p=1,q=1,n=3", "--frame", "euclidean"}}) {
    const std::string a = run_to_file(args, dir / "liesphere_accept_a");
    const std::string b = run_to_file(args, dir / "liesphere_accept_b");
    ++total;
    identical += (a == b && a != "exit-error" && !a.empty()) ? 1 : 0;
  }
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) + " outputs byte-identical"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;  // 0: no runtime bound
  };
  const std::vector<Criterion> criteria{
      {1, "contact equivalence", contact_equivalence, 5},
      {2, "second fundamental form identity", second_form_identity, 30},
      {3, "cyclide structure", cyclide_structure, 60},
      {4, "Dupin verification", dupin_verification, 120},
      {5, "Lie invariance", lie_invariance, 0},
      {6, "Veronese identities", veronese_identities, 0},
      {7, "Cartan hypersurface", cartan_hypersurface_check, 600},
      {8, "reducibility discrimination", reducibility_discrimination, 0},
      {9, "cyclide equivalence", cyclide_equivalence_check, 0},
      {10, "determinism", determinism, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs >= c.budget_seconds) {
      o.pass = false;
      o.detail += " [over the " + fmt("%.0f", c.budget_seconds) + " s budget]";
    }
    std::printf("criterion %2d %-34s %s  %s (%.1f s)\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
