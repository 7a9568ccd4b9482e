#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "forge/core/transform.hpp"
#include "forge/core/vec.hpp"

namespace forge {

using Face = std::array<std::uint32_t, 3>;

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  // Set when a truncating deformation may have collapsed faces onto a plane.
  bool truncated = false;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }

  /// Throws Error(kInvalidArgument) on out-of-range or repeated face indices.
  void validate() const;
  double face_area(std::size_t f) const;
  double total_area() const;

  /// Appends `other`, rebasing its face indices.
  void append(const TriMesh& other);
};

struct PointCloud {
  std::vector<Vec3> points;
  // Optional per-point source tags (e.g. the face a sample was drawn from).
  std::vector<std::int32_t> tags;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct Aabb {
  Vec3 lo{1e300, 1e300, 1e300};
  Vec3 hi{-1e300, -1e300, -1e300};

  void extend(const Vec3& p) {
    lo = cwise_min(lo, p);
    hi = cwise_max(hi, p);
  }
  void extend(const Aabb& b) {
    lo = cwise_min(lo, b.lo);
    hi = cwise_max(hi, b.hi);
  }
  bool valid() const { return lo.x <= hi.x; }
  Vec3 center() const { return (lo + hi) * 0.5; }
  Vec3 extent() const { return hi - lo; }
  double squared_distance(const Vec3& p) const;
};

Aabb bounding_box(const std::vector<Vec3>& points);
Vec3 centroid(const std::vector<Vec3>& points);

TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& t);
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

/// Axis-aligned cube with the given half extent, 8 vertices, 12 faces.
/// Faces 2k and 2k+1 cover one side of the cube.
TriMesh make_box(const Vec3& half_extent);

}  // namespace forge
