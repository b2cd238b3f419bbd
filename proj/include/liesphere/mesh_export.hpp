#pragma once

// Quad meshes of projected Legendre maps over the first two parameter axes.

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liesphere/legendre.hpp"

namespace liesphere {

struct MeshOptions {
  std::vector<int> resolution{64, 64};
  std::optional<ProjectionFrame> frame;  // default: standard Euclidean for Euclidean lifts, else choose_frame
  bool stereo = false;                   // spherical frames: map S^n to R^n before dropping to R^3
  std::vector<double> slice;             // values of the axes beyond the second; default mid-domain
};

struct Mesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector3d> normals;
  std::vector<std::array<int, 4>> faces;  // 0-based, counterclockwise seen from the normal side
  int grid_vertices = 0;
  int skipped_vertices = 0;
  int skipped_faces = 0;
  ProjectionFrame frame;
};

Mesh build_mesh(const LegendreMap& map, const MeshOptions& opts);

/// Text OBJ with 1-based "f v//vn" quads.
void write_obj(std::ostream& out, const Mesh& mesh, const std::string& comment);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

}  // namespace liesphere
