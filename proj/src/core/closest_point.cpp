#include "forge/core/closest_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "forge/core/error.hpp"

namespace forge {
namespace {

constexpr std::uint32_t kLeafSize = 4;

std::array<double, 2> closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return {1.0, 0.0};
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return {1.0 - t, t};
}

std::array<double, 3> degenerate_barycentric(const Vec3& p, const Vec3& a, const Vec3& b,
                                             const Vec3& c) {
  const auto ab = closest_on_segment(p, a, b);
  const auto bc = closest_on_segment(p, b, c);
  const auto ca = closest_on_segment(p, c, a);
  const std::array<std::array<double, 3>, 3> cand = {
      std::array<double, 3>{ab[0], ab[1], 0.0}, std::array<double, 3>{0.0, bc[0], bc[1]},
      std::array<double, 3>{ca[1], 0.0, ca[0]}};
  std::array<double, 3> best = cand[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& w : cand) {
    const double d = squared_norm(p - (a * w[0] + b * w[1] + c * w[2]));
    if (d < best_d) {
      best_d = d;
      best = w;
    }
  }
  return best;
}

}  // namespace

std::array<double, 3> closest_barycentric(const Vec3& p, const Vec3& a, const Vec3& b,
                                          const Vec3& c) {
  // Voronoi-region walk over vertices, edges, then the face interior.
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {1.0, 0.0, 0.0};

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return {0.0, 1.0, 0.0};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {1.0 - v, v, 0.0};
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return {0.0, 0.0, 1.0};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {1.0 - w, 0.0, w};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {0.0, 1.0 - w, w};
  }

  const double sum = va + vb + vc;
  if (!(sum > 0.0) || !std::isfinite(sum)) return degenerate_barycentric(p, a, b, c);
  const double v = vb / sum;
  const double w = vc / sum;
  return {std::max(0.0, 1.0 - v - w), v, w};
}

Vec3 surface_point(const TriMesh& mesh, std::uint32_t face, const std::array<double, 3>& w) {
  const Face& f = mesh.faces[face];
  return mesh.vertices[f[0]] * w[0] + mesh.vertices[f[1]] * w[1] + mesh.vertices[f[2]] * w[2];
}

SurfaceHit closest_point_on_face(const Vec3& p, const TriMesh& mesh, std::uint32_t face) {
  const Face& f = mesh.faces[face];
  SurfaceHit hit;
  hit.face_index = face;
  hit.barycentric =
      closest_barycentric(p, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
  hit.point = surface_point(mesh, face, hit.barycentric);
  hit.squared_distance = squared_norm(p - hit.point);
  hit.distance = std::sqrt(hit.squared_distance);
  return hit;
}

SurfaceHit closest_point_on_mesh(const Vec3& p, const TriMesh& mesh) {
  if (mesh.faces.empty()) throw Error(ErrorKind::kInvalidArgument, "no surface: mesh has no faces");
  SurfaceHit best = closest_point_on_face(p, mesh, 0);
  for (std::uint32_t f = 1; f < mesh.faces.size(); ++f) {
    SurfaceHit h = closest_point_on_face(p, mesh, f);
    if (h.squared_distance < best.squared_distance) best = h;
  }
  return best;
}

MeshIndex::MeshIndex(TriMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.faces.empty()) throw Error(ErrorKind::kInvalidArgument, "no surface: mesh has no faces");
  const auto n = static_cast<std::uint32_t>(mesh_.faces.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centers(n);
  for (std::uint32_t f = 0; f < n; ++f) {
    const Face& t = mesh_.faces[f];
    centers[f] = (mesh_.vertices[t[0]] + mesh_.vertices[t[1]] + mesh_.vertices[t[2]]) / 3.0;
  }
  nodes_.reserve(2 * n / kLeafSize + 2);
  build(0, n, centers);
}

std::int32_t MeshIndex::build(std::uint32_t begin, std::uint32_t end,
                              const std::vector<Vec3>& centers) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb center_box;
  for (std::uint32_t i = begin; i < end; ++i) {
    const Face& t = mesh_.faces[order_[i]];
    for (auto v : t) box.extend(mesh_.vertices[v]);
    center_box.extend(centers[order_[i]]);
  }
  // Pad so rounding in the barycentric reconstruction never escapes the box.
  const double pad = 1e-12 * (1.0 + norm(box.extent()) + norm(box.center()));
  box.lo = box.lo - Vec3{pad, pad, pad};
  box.hi = box.hi + Vec3{pad, pad, pad};
  nodes_[id].box = box;
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  const Vec3 ext = center_box.extent();
  int axis = 0;
  if (ext.y > ext[axis]) axis = 1;
  if (ext.z > ext[axis]) axis = 2;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = centers[a][axis], cb = centers[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const std::int32_t left = build(begin, mid, centers);
  const std::int32_t right = build(mid, end, centers);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

SurfaceHit MeshIndex::closest(const Vec3& p) const {
  SurfaceHit best;
  best.squared_distance = std::numeric_limits<double>::infinity();
  best.face_index = std::numeric_limits<std::uint32_t>::max();

  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(p) > best.squared_distance) continue;
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t f = order_[i];
        SurfaceHit h = closest_point_on_face(p, mesh_, f);
        if (h.squared_distance < best.squared_distance ||
            (h.squared_distance == best.squared_distance && f < best.face_index)) {
          best = h;
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance(p);
    const double dr = nodes_[node.right].box.squared_distance(p);
    // push the farther child first so the nearer one is visited next
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return best;
}

}  // namespace forge
