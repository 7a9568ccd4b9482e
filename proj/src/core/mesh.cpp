#include "forge/core/mesh.hpp"

#include <string>

#include "forge/core/error.hpp"

namespace forge {

void TriMesh::validate() const {
  const auto n = vertices.size();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    for (auto idx : face) {
      if (idx >= n) {
        throw Error(ErrorKind::kInvalidArgument,
                    "face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                        " but mesh has " + std::to_string(n) + " vertices");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw Error(ErrorKind::kInvalidArgument, "face " + std::to_string(f) + " repeats a vertex");
    }
  }
}

double TriMesh::face_area(std::size_t f) const {
  const Face& t = faces[f];
  const Vec3& a = vertices[t[0]];
  return 0.5 * norm(cross(vertices[t[1]] - a, vertices[t[2]] - a));
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) sum += face_area(f);
  return sum;
}

void TriMesh::append(const TriMesh& other) {
  const auto base = static_cast<std::uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  faces.reserve(faces.size() + other.faces.size());
  for (const Face& f : other.faces) faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  truncated = truncated || other.truncated;
}

double Aabb::squared_distance(const Vec3& p) const {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (p[i] < lo[i]) {
      d += (lo[i] - p[i]) * (lo[i] - p[i]);
    } else if (p[i] > hi[i]) {
      d += (p[i] - hi[i]) * (p[i] - hi[i]);
    }
  }
  return d;
}

Aabb bounding_box(const std::vector<Vec3>& points) {
  Aabb box;
  for (const Vec3& p : points) box.extend(p);
  return box;
}

Vec3 centroid(const std::vector<Vec3>& points) {
  Vec3 sum;
  for (const Vec3& p : points) sum += p;
  return points.empty() ? sum : sum / static_cast<double>(points.size());
}

TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& t) {
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = t.apply(v);
  return out;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  PointCloud out = cloud;
  for (Vec3& p : out.points) p = t.apply(p);
  return out;
}

TriMesh make_box(const Vec3& h) {
  TriMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back({(i & 1) ? h.x : -h.x, (i & 2) ? h.y : -h.y, (i & 4) ? h.z : -h.z});
  }
  // -x, +x, -y, +y, -z, +z; outward winding
  m.faces = {{0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}, {0, 1, 5}, {0, 5, 4},
             {2, 6, 7}, {2, 7, 3}, {0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}};
  return m;
}

}  // namespace forge
