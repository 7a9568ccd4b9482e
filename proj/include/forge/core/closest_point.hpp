#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "forge/core/mesh.hpp"

namespace forge {

struct SurfaceHit {
  Vec3 point;
  std::uint32_t face_index = 0;
  std::array<double, 3> barycentric{1.0, 0.0, 0.0};
  double distance = 0.0;
  double squared_distance = 0.0;
};

/// Exact closest point on triangle (a, b, c) to p, as barycentric weights.
/// Degenerate triangles fall back to the closest of their edges.
std::array<double, 3> closest_barycentric(const Vec3& p, const Vec3& a, const Vec3& b,
                                          const Vec3& c);

/// Closest point on one face of `mesh`.
SurfaceHit closest_point_on_face(const Vec3& p, const TriMesh& mesh, std::uint32_t face);

/// Reference query: exhaustive loop over every face, lowest face index wins ties.
/// Throws Error(kInvalidArgument) "no surface" for a mesh without faces.
SurfaceHit closest_point_on_mesh(const Vec3& p, const TriMesh& mesh);

/// Point on `mesh` face `face` at the given barycentric weights.
Vec3 surface_point(const TriMesh& mesh, std::uint32_t face, const std::array<double, 3>& bary);

/// Bounding-volume hierarchy over the faces of an owned mesh. Queries return
/// exactly what the brute-force reference returns, ties included.
class MeshIndex {
 public:
  explicit MeshIndex(TriMesh mesh);

  const TriMesh& mesh() const { return mesh_; }
  SurfaceHit closest(const Vec3& p) const;
  SurfaceHit closest_brute_force(const Vec3& p) const { return closest_point_on_mesh(p, mesh_); }

 private:
  struct Node {
    Aabb box;
    std::uint32_t begin = 0, end = 0;  // range in order_ for leaves
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, const std::vector<Vec3>& centers);

  TriMesh mesh_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace forge
