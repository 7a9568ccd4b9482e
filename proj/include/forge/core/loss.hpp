#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "forge/core/closest_point.hpp"
#include "forge/core/point_index.hpp"
#include "forge/core/sampling.hpp"

namespace forge {

/// Both halves of the symmetric point-to-mesh distance.
struct Point2MeshTerms {
  double value = 0.0;           // target_to_mesh + mesh_to_target
  double target_to_mesh = 0.0;  // mean squared distance, target point -> closest surface point
  double mesh_to_target = 0.0;  // mean squared distance, surface sample -> nearest target point
};

/// Loss against one fixed target cloud, evaluated for many candidate meshes.
///
/// The target term is exact (point-to-triangle); the mesh term uses
/// `mesh_samples` area-weighted samples drawn with `seed`, so repeated
/// evaluations of the same mesh give bit-identical values. Gradients treat
/// the closest-point barycentrics and the sample barycentrics as constants,
/// which is exact for the target term wherever the closest point is unique.
class Point2MeshObjective {
 public:
  Point2MeshObjective(PointCloud target, std::size_t mesh_samples, std::uint64_t seed);

  /// `vertex_gradient`, when non-null, receives dLoss/dVertex for every vertex.
  Point2MeshTerms evaluate(const TriMesh& mesh, std::vector<Vec3>* vertex_gradient = nullptr) const;

  const PointCloud& target() const { return target_; }

 private:
  PointCloud target_;
  std::unique_ptr<PointIndex> target_index_;
  std::size_t mesh_samples_;
  std::uint64_t seed_;
};

/// Convenience wrapper building a one-shot objective.
double point2mesh_loss(const PointCloud& target, const TriMesh& mesh, std::size_t mesh_samples,
                       std::uint64_t seed);

}  // namespace forge
