#include "forge/core/loss.hpp"

#include "forge/core/error.hpp"

namespace forge {

Point2MeshObjective::Point2MeshObjective(PointCloud target, std::size_t mesh_samples,
                                         std::uint64_t seed)
    : target_(std::move(target)), mesh_samples_(mesh_samples), seed_(seed) {
  if (target_.empty()) throw Error(ErrorKind::kInvalidArgument, "point2mesh loss: empty target cloud");
  if (mesh_samples_ == 0) throw Error(ErrorKind::kInvalidArgument, "point2mesh loss: mesh_samples must be >= 1");
  for (std::size_t i = 0; i < target_.size(); ++i) {
    if (!is_finite(target_.points[i])) {
      throw Error(ErrorKind::kInvalidArgument, "point2mesh loss: target point " + std::to_string(i) + " is not finite");
    }
  }
  target_index_ = std::make_unique<PointIndex>(target_.points);
}

Point2MeshTerms Point2MeshObjective::evaluate(const TriMesh& mesh,
                                              std::vector<Vec3>* vertex_gradient) const {
  if (vertex_gradient) vertex_gradient->assign(mesh.vertices.size(), Vec3{});
  Point2MeshTerms terms;

  const MeshIndex index(mesh);
  const double inv_n = 1.0 / static_cast<double>(target_.size());
  for (const Vec3& x : target_.points) {
    const SurfaceHit hit = index.closest(x);
    terms.target_to_mesh += hit.squared_distance;
    if (vertex_gradient) {
      const Vec3 g = (hit.point - x) * (2.0 * inv_n);
      const Face& f = mesh.faces[hit.face_index];
      for (int k = 0; k < 3; ++k) (*vertex_gradient)[f[k]] += g * hit.barycentric[k];
    }
  }
  terms.target_to_mesh *= inv_n;

  const auto samples = sample_surface_detailed(mesh, mesh_samples_, seed_);
  const double inv_m = 1.0 / static_cast<double>(samples.size());
  for (const SurfaceSample& s : samples) {
    const auto nn = target_index_->nearest(s.point);
    terms.mesh_to_target += nn.squared_distance;
    if (vertex_gradient) {
      const Vec3 g = (s.point - target_.points[nn.index]) * (2.0 * inv_m);
      const Face& f = mesh.faces[s.face];
      for (int k = 0; k < 3; ++k) (*vertex_gradient)[f[k]] += g * s.barycentric[k];
    }
  }
  terms.mesh_to_target *= inv_m;
  terms.value = terms.target_to_mesh + terms.mesh_to_target;
  return terms;
}

double point2mesh_loss(const PointCloud& target, const TriMesh& mesh, std::size_t mesh_samples,
                       std::uint64_t seed) {
  return Point2MeshObjective(target, mesh_samples, seed).evaluate(mesh).value;
}

}  // namespace forge
