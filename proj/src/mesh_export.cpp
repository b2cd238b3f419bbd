#include "liesphere/mesh_export.hpp"

#include <charconv>
#include <cmath>

#include "liesphere/sphere_model.hpp"

namespace liesphere {

namespace {

Eigen::Vector3d first_three(const Eigen::VectorXd& v) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(3, v.size()); ++i) out[i] = v[i];
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // no negative zero
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Mesh build_mesh(const LegendreMap& map, const MeshOptions& opts) {
  const ParamDomain& d = map.domain();
  if (d.dim() < 2) throw Error(ErrorKind::InvalidArgument, "mesh export needs at least two parameters");
  if (opts.resolution.size() != 2 || opts.resolution[0] < 2 || opts.resolution[1] < 2) {
    throw Error(ErrorKind::InvalidArgument, "mesh resolution must be two counts >= 2");
  }
  Eigen::VectorXd base = 0.5 * (d.lo + d.hi);
  if (!opts.slice.empty()) {
    if (static_cast<int>(opts.slice.size()) != d.dim() - 2) {
      throw Error(ErrorKind::InvalidArgument, "slice needs " + std::to_string(d.dim() - 2) + " values");
    }
    for (int i = 2; i < d.dim(); ++i) base[i] = opts.slice[static_cast<std::size_t>(i) - 2];
  }
  const int nu = opts.resolution[0];
  const int nv = opts.resolution[1];
  const bool pu = d.periodic[0];
  const bool pv = d.periodic[1];
  auto coord = [&](int axis, int i, int count, bool periodic) {
    const double span = d.hi[axis] - d.lo[axis];
    return d.lo[axis] + span * i / (periodic ? count : count - 1);
  };

  Mesh mesh;
  if (opts.frame) {
    mesh.frame = *opts.frame;
  } else if (map.provenance() == Provenance::EuclideanLift) {
    mesh.frame = ProjectionFrame::standard(ProjectionKind::Euclidean, map.chart_dim());
  } else {
    std::vector<Eigen::VectorXd> samples;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        Eigen::VectorXd b = base;
        b[0] = d.lo[0] + (i + 0.5) / 6.0 * (d.hi[0] - d.lo[0]);
        b[1] = d.lo[1] + (j + 0.5) / 6.0 * (d.hi[1] - d.lo[1]);
        samples.push_back(b);
      }
    }
    mesh.frame = choose_frame(map, samples);
  }
  const bool spherical = mesh.frame.kind == ProjectionKind::Spherical;

  std::vector<int> index(static_cast<std::size_t>(nu * nv), -1);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      Eigen::VectorXd b = base;
      b[0] = coord(0, i, nu, pu);
      b[1] = coord(1, j, nv, pv);
      Eigen::VectorXd x;
      Eigen::VectorXd nrm;
      try {
        const ProjectedPoint p = project_line(map.line_at(b), mesh.frame);
        x = p.point;
        nrm = p.normal;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ProjectionSingular) throw;
        continue;
      }
      if (spherical && opts.stereo) {
        const double denom = 1.0 + x[0];
        if (!(std::abs(denom) > 1e-9)) continue;
        const Eigen::VectorXd u = x.tail(x.size() - 1) / denom;
        const Eigen::VectorXd du =
            nrm.tail(nrm.size() - 1) / denom - x.tail(x.size() - 1) * (nrm[0] / (denom * denom));
        x = u;
        nrm = du;
      }
      if (!x.allFinite() || !nrm.allFinite()) continue;
      Eigen::Vector3d n3 = first_three(nrm);
      if (n3.norm() > 0) n3.normalize();
      index[static_cast<std::size_t>(i * nv + j)] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(first_three(x));
      mesh.normals.push_back(n3);
    }
  }
  mesh.grid_vertices = nu * nv;
  mesh.skipped_vertices = mesh.grid_vertices - static_cast<int>(mesh.vertices.size());

  const int cu = pu ? nu : nu - 1;
  const int cv = pv ? nv : nv - 1;
  for (int i = 0; i < cu; ++i) {
    for (int j = 0; j < cv; ++j) {
      const int i1 = (i + 1) % nu;
      const int j1 = (j + 1) % nv;
      std::array<int, 4> q{index[static_cast<std::size_t>(i * nv + j)], index[static_cast<std::size_t>(i1 * nv + j)],
                           index[static_cast<std::size_t>(i1 * nv + j1)], index[static_cast<std::size_t>(i * nv + j1)]};
      if (q[0] < 0 || q[1] < 0 || q[2] < 0 || q[3] < 0) {
        ++mesh.skipped_faces;
        continue;
      }
      // Counterclockwise when seen from the side the vertex normals point to.
      const auto& v = mesh.vertices;
      const Eigen::Vector3d fn = (v[static_cast<std::size_t>(q[2])] - v[static_cast<std::size_t>(q[0])])
                                     .cross(v[static_cast<std::size_t>(q[3])] - v[static_cast<std::size_t>(q[1])]);
      Eigen::Vector3d avg = Eigen::Vector3d::Zero();
      for (int k : q) avg += mesh.normals[static_cast<std::size_t>(k)];
      if (fn.dot(avg) < 0) std::swap(q[1], q[3]);
      mesh.faces.push_back(q);
    }
  }
  return mesh;
}

void write_obj(std::ostream& out, const Mesh& mesh, const std::string& comment) {
  out << "# " << comment << '\n';
  out << "# vertices " << mesh.vertices.size() << " faces " << mesh.faces.size() << " skipped_vertices "
      << mesh.skipped_vertices << '\n';
  for (const auto& v : mesh.vertices) {
    out << "v " << format_number(v[0]) << ' ' << format_number(v[1]) << ' ' << format_number(v[2]) << '\n';
  }
  for (const auto& n : mesh.normals) {
    out << "vn " << format_number(n[0]) << ' ' << format_number(n[1]) << ' ' << format_number(n[2]) << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << 'f';
    for (int k : f) out << ' ' << k + 1 << "//" << k + 1;
    out << '\n';
  }
}

}  // namespace liesphere
