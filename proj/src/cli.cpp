#include "liesphere/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "liesphere/grid_surface.hpp"
#include "liesphere/mesh_export.hpp"
#include "liesphere/report.hpp"
#include "liesphere/sphere_model.hpp"
#include "liesphere/zoo.hpp"

namespace liesphere {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEmpty = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, x);
  if (s.empty() || res.ec != std::errc() || res.ptr != end) throw UsageError("bad number '" + s + "'");
  return x;
}

Eigen::VectorXd parse_vector(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.empty()) throw UsageError("empty vector");
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(parts[i]);
  return v;
}

// "x,y,z:s" -> (vector, scalar)
std::pair<Eigen::VectorXd, double> parse_with_scalar(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw UsageError("expected 'v1,v2,...:value' in '" + s + "'");
  return {parse_vector(s.substr(0, colon)), parse_double(s.substr(colon + 1))};
}

std::vector<int> parse_grid(const std::string& s, int dim) {
  std::vector<int> out;
  for (const auto& p : split(s, 'x')) {
    const double v = parse_double(p);
    if (v < 1 || v != std::floor(v)) throw UsageError("bad grid count '" + p + "'");
    out.push_back(static_cast<int>(v));
  }
  if (out.size() == 1 && dim > 1) out.assign(static_cast<std::size_t>(dim), out.front());
  if (static_cast<int>(out.size()) != dim) {
    throw UsageError("grid '" + s + "' needs " + std::to_string(dim) + " counts");
  }
  return out;
}

std::string join_numbers(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_number(v[i]);
  }
  return s;
}

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

struct ElementArgs {
  std::vector<std::string> points;
  std::vector<std::string> spheres;
  std::vector<std::string> planes;
  std::vector<std::string> coords;
  int infinity = 0;
  int dim = 3;

  void add_to(CLI::App* app, bool multi) {
    auto take = [&](const char* name, std::vector<std::string>* v, const char* help) {
      auto* opt = app->add_option(name, *v, help);
      if (!multi) opt->expected(1);
    };
    take("--point", &points, "point x1,...,xn");
    take("--sphere", &spheres, "oriented sphere c1,...,cn:r (signed radius, positive = inward normal)");
    take("--plane", &planes, "oriented plane n1,...,nn:h for {u . n = h}");
    if (multi) app->add_option("--coords", coords, "quadric coordinates y1,...,y_{n+3}");
    app->add_flag("--infinity", infinity, "the point at infinity");
    app->add_option("--dim", dim, "ambient dimension for --infinity")->check(CLI::PositiveNumber);
  }

  // Elements as Lie vectors; spatial elements first, in option-group order.
  std::vector<LieVector> vectors() const {
    std::vector<SphereElement> elems;
    for (const auto& p : points) elems.emplace_back(PointElement{parse_vector(p)});
    for (const auto& s : spheres) {
      auto [c, r] = parse_with_scalar(s);
      if (r == 0.0) throw UsageError("sphere radius must be nonzero; use --point");
      elems.emplace_back(SphereElementData{c, r});
    }
    for (const auto& s : planes) {
      auto [nrm, h] = parse_with_scalar(s);
      const double len = nrm.norm();
      if (!(len > 0)) throw UsageError("plane normal must be nonzero");
      elems.emplace_back(PlaneElement{nrm / len, h / len});
    }
    int n = dim;
    for (const auto& e : elems) {
      if (element_dim(e) > 0) n = element_dim(e);
    }
    std::vector<LieVector> out;
    for (const auto& e : elems) {
      if (element_dim(e) != n) throw UsageError("elements live in different dimensions");
      out.push_back(encode(e, n));
    }
    for (int i = 0; i < infinity; ++i) out.push_back(encode(InfinityElement{}, n));
    for (const auto& c : coords) {
      LieVector y(parse_vector(c));
      if (y.size() < 4) throw UsageError("coordinates need at least 4 entries");
      if (!on_quadric(y)) throw UsageError("coordinates are not on the Lie quadric");
      out.push_back(y);
    }
    return out;
  }
};

nlohmann::json element_json(const SphereElement& e) {
  return std::visit(
      [](const auto& x) -> nlohmann::json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, InfinityElement>) {
          return {{"type", "infinity"}};
        } else if constexpr (std::is_same_v<T, PointElement>) {
          return {{"type", "point"}, {"point", vec_json(x.u)}};
        } else if constexpr (std::is_same_v<T, SphereElementData>) {
          return {{"type", "sphere"}, {"center", vec_json(x.center)}, {"radius", x.radius}};
        } else {
          return {{"type", "plane"}, {"normal", vec_json(x.normal)}, {"offset", x.offset}};
        }
      },
      e);
}

std::string element_text(const SphereElement& e) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, InfinityElement>) {
          return "infinity";
        } else if constexpr (std::is_same_v<T, PointElement>) {
          return "point " + join_numbers(x.u);
        } else if constexpr (std::is_same_v<T, SphereElementData>) {
          return "sphere center " + join_numbers(x.center) + " radius " + format_number(x.radius);
        } else {
          return "plane normal " + join_numbers(x.normal) + " offset " + format_number(x.offset);
        }
      },
      e);
}

struct Source {
  std::optional<LegendreMap> map;
  AnalysisInput input;
  std::vector<int> default_grid;
};

Source load_source(const std::string& gen, const std::string& grid_file) {
  Source s;
  if (!gen.empty() && !grid_file.empty()) throw UsageError("give either --gen or --grid-file, not both");
  if (!gen.empty()) {
    Generated g = make_generator(parse_generator(gen));
    s.input = AnalysisInput{"generator", g.name, g.params};
    s.default_grid = g.default_grid;
    s.map.emplace(std::move(g.map));
  } else if (!grid_file.empty()) {
    const SurfaceData surf = grid_surface(read_grid_file(grid_file));
    s.input = AnalysisInput{"grid-file", grid_file, {}};
    s.map.emplace(surf.lift());
    s.default_grid.assign(static_cast<std::size_t>(s.map->dim()), 8);
  } else {
    throw UsageError("one of --gen or --grid-file is required");
  }
  return s;
}

ProjectionFrame parse_frame(const std::string& text, int chart_dim) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  ProjectionKind k;
  if (kind == "euclidean") {
    k = ProjectionKind::Euclidean;
  } else if (kind == "spherical") {
    k = ProjectionKind::Spherical;
  } else {
    throw UsageError("frame must be auto, euclidean[:t] or spherical[:t]");
  }
  if (colon == std::string::npos) return ProjectionFrame::standard(k, chart_dim);
  return ProjectionFrame::rotated(k, chart_dim, parse_double(text.substr(colon + 1)));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lie sphere geometry toolkit"};
  app.name("liesphere");
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();
  bool json_mode = false;
  std::uint64_t seed = 0;
  app.add_flag("--json", json_mode, "machine-readable output");
  app.add_option("--seed", seed, "seed for every random choice");

  ElementArgs enc_args;
  auto* enc = app.add_subcommand("encode", "Lie quadric coordinates of a point, sphere or plane");
  enc_args.add_to(enc, false);

  std::string dec_coords;
  auto* dec = app.add_subcommand("decode", "point, sphere or plane of quadric coordinates");
  dec->add_option("--coords", dec_coords, "y1,...,y_{n+3}")->required();

  ElementArgs con_args;
  auto* con = app.add_subcommand("contact", "oriented contact of two elements");
  con_args.add_to(con, true);

  std::string gen;
  std::string grid_file;
  std::string grid_text;
  std::string criteria_text = "dupin";
  std::string out_path;
  AnalysisSettings settings;
  bool timing = false;
  auto* ana = app.add_subcommand("analyze", "curvature spheres, Dupin and structural criteria");
  ana->add_option("--gen", gen, "generator, e.g. torus:a=2,b=1");
  ana->add_option("--grid-file", grid_file, "sampled hypersurface grid file");
  ana->add_option("--grid", grid_text, "sample counts, e.g. 20x20");
  ana->add_option("--criteria", criteria_text, "comma list of dupin, reduce, isopara");
  ana->add_option("--out", out_path, "report path (default: standard output)");
  ana->add_option("--cluster-tol", settings.dupin.cluster_tol, "eigenvalue clustering tolerance");
  ana->add_option("--dupin-tol", settings.dupin.dupin_tol, "leaf deviation accepted as constant");
  ana->add_option("--not-dupin-tol", settings.dupin.not_dupin_tol, "leaf deviation rejected as not Dupin");
  ana->add_option("--leaf-seeds", settings.dupin.leaf_seeds, "samples that seed leaf walks");
  ana->add_flag("--timing", timing, "include wall-clock timing in the report");

  std::string mgen;
  std::string mgrid_file;
  std::string res_text = "64x64";
  std::string frame_text = "auto";
  std::string slice_text;
  std::string mout;
  bool stereo = false;
  auto* mesh = app.add_subcommand("export-mesh", "OBJ mesh of a projected surface");
  mesh->add_option("--gen", mgen, "generator, e.g. cyclide:p=1,q=1,n=3");
  mesh->add_option("--grid-file", mgrid_file, "sampled hypersurface grid file");
  mesh->add_option("--res", res_text, "vertex counts along the first two axes, e.g. 64x64");
  mesh->add_option("--frame", frame_text, "auto, euclidean[:t] or spherical[:t]");
  mesh->add_option("--slice", slice_text, "values of the remaining parameters, comma separated");
  mesh->add_flag("--stereo", stereo, "stereographic flattening of spherical projections");
  mesh->add_option("--out", mout, "OBJ path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*enc) {
      const auto v = enc_args.vectors();
      if (v.size() != 1) throw UsageError("encode takes exactly one element");
      if (json_mode) {
        out << nlohmann::json{{"coords", vec_json(v[0].coords())}}.dump() << '\n';
      } else {
        out << join_numbers(v[0].coords()) << '\n';
      }
      return 0;
    }
    if (*dec) {
      const LieVector y(parse_vector(dec_coords));
      if (y.size() < 4) throw UsageError("coordinates need at least 4 entries");
      const SphereElement e = decode(y);
      out << (json_mode ? element_json(e).dump() : element_text(e)) << '\n';
      return 0;
    }
    if (*con) {
      const auto v = con_args.vectors();
      if (v.size() != 2) throw UsageError("contact needs exactly two elements");
      if (v[0].size() != v[1].size()) throw UsageError("elements live in different dimensions");
      const bool c = oriented_contact_lie(v[0], v[1]);
      if (json_mode) {
        out << nlohmann::json{{"contact", c}, {"inner", lie_inner(v[0], v[1])}}.dump() << '\n';
      } else {
        out << "contact: " << (c ? "true" : "false") << '\n';
      }
      return 0;
    }
    if (*ana) {
      Source src = load_source(gen, grid_file);
      settings.grid = grid_text.empty() ? src.default_grid : parse_grid(grid_text, src.map->dim());
      settings.criteria = split(criteria_text, ',');
      settings.seed = seed;
      settings.timing = timing;
      const AnalysisOutcome res = run_analysis(*src.map, src.input, settings);
      const std::string text = res.report.dump(2) + "\n";
      if (out_path.empty()) {
        out << text;
      } else {
        write_text_file(out_path, text);
        out << res.summary << '\n';
      }
      if (res.numerical_failure) {
        err << "numerical failure: " << res.report.value("error", std::string()) << '\n';
        return kExitNumerical;
      }
      return 0;
    }
    if (*mesh) {
      Source src = load_source(mgen, mgrid_file);
      MeshOptions mo;
      mo.resolution = parse_grid(res_text, 2);
      if (frame_text != "auto") mo.frame = parse_frame(frame_text, src.map->chart_dim());
      mo.stereo = stereo;
      if (!slice_text.empty()) {
        const Eigen::VectorXd s = parse_vector(slice_text);
        mo.slice.assign(s.data(), s.data() + s.size());
      }
      const Mesh m = build_mesh(*src.map, mo);
      const std::string comment = "liesphere " + src.input.id;
      if (m.faces.empty()) {
        err << "empty mesh: projection singular at " << m.skipped_vertices << " of " << m.grid_vertices
            << " vertices\n";
        return kExitEmpty;
      }
      std::ostringstream obj;
      write_obj(obj, m, comment);
      if (mout.empty()) {
        out << obj.str();
      } else {
        write_text_file(mout, obj.str());
        out << "export-mesh " << src.input.id << ": vertices=" << m.vertices.size() << " faces=" << m.faces.size()
            << " skipped_vertices=" << m.skipped_vertices << " skipped_faces=" << m.skipped_faces << '\n';
      }
      if (m.skipped_vertices > 0) err << "skipped " << m.skipped_vertices << " singular vertices\n";
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::InvalidArgument:
      case ErrorKind::NotASphere:
      case ErrorKind::SelfIntersectingSpec:
      case ErrorKind::DegenerateTube:
      case ErrorKind::InvalidConstruction:
      case ErrorKind::NotAnImmersion:
      case ErrorKind::NotANormalField:
        return kExitUsage;
      default:
        return kExitNumerical;
    }
  }
  return kExitUsage;
}

}  // namespace liesphere
