#pragma once

#include <string>
#include <vector>

#include "forge/core/mesh.hpp"
#include "forge/templates/registry.hpp"

namespace forge {

struct ConceptInstance {
  std::string template_id;
  std::vector<double> continuous;
  std::vector<int> discrete;
  RigidTransform pose;

  friend bool operator==(const ConceptInstance&, const ConceptInstance&) = default;
};

/// Instance at the template's default parameters and identity pose.
ConceptInstance default_instance(const TemplateRegistry& registry, std::string_view template_id);

/// Throws Error(kNotFound) for an unknown template, Error(kInvalidArgument)
/// for a length mismatch and Error(kOutOfBounds) naming the first offending
/// parameter.
void validate_instance(const TemplateRegistry& registry, const ConceptInstance& instance);

/// A concept node reached during expansion (the root included).
struct ExpandedConcept {
  std::string path;  // "" for the root, "lid", "lid/knob", ...
  std::string template_id;
  std::vector<double> params;
  std::vector<int> discrete;
  RigidTransform world;
};

/// A leaf geometry instance of an expansion.
struct ExpandedLeaf {
  std::string path;
  std::string template_id;
  std::vector<double> params;
  RigidTransform world;
  TriMesh mesh;  // world coordinates
  std::uint32_t face_begin = 0, face_end = 0;      // range in the merged mesh
  std::uint32_t vertex_begin = 0, vertex_end = 0;  // range in the merged mesh
};

/// Per-vertex 3 x K derivatives of merged-mesh vertices with respect to the
/// root's continuous parameters followed by the six pose coordinates
/// (translation x, y, z; rotation vector x, y, z applied on the left of the
/// current rotation).
struct ParamJacobian {
  std::size_t vertex_count = 0;
  std::size_t param_count = 0;
  std::vector<double> data;

  double& at(std::size_t vertex, int axis, std::size_t param) {
    return data[(vertex * 3 + static_cast<std::size_t>(axis)) * param_count + param];
  }
  double at(std::size_t vertex, int axis, std::size_t param) const {
    return data[(vertex * 3 + static_cast<std::size_t>(axis)) * param_count + param];
  }
};

struct Expansion {
  std::vector<ExpandedConcept> concepts;
  std::vector<ExpandedLeaf> leaves;
  TriMesh merged;
  // Clamped member parameters, one message per offending value.
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
  /// Index into `leaves` of the leaf owning merged face `face`.
  std::size_t leaf_of_face(std::uint32_t face) const;
};

struct ExpandOptions {
  int resolution = 24;
  bool with_jacobian = false;
  // Throw on any clamped member parameter instead of recording it.
  bool strict = true;
};

/// Recursive expansion of an instance. The root instance is always validated
/// strictly; member parameters produced by constraint maps are clamped to
/// their bounds and reported unless `strict`.
Expansion expand(const TemplateRegistry& registry, const ConceptInstance& instance,
                 const ExpandOptions& options, ParamJacobian* jacobian = nullptr);

TriMesh instantiate_geometry(const TemplateRegistry& registry, std::string_view id,
                             std::span<const double> params, int resolution);

/// Strict expansion; throws Error(kOutOfBounds) naming offending members.
Expansion instantiate_concept(const TemplateRegistry& registry, const ConceptInstance& instance,
                              int resolution);

struct InstanceWithJacobian {
  Expansion expansion;
  ParamJacobian jacobian;
};

InstanceWithJacobian instantiate_with_jacobian(const TemplateRegistry& registry,
                                               const ConceptInstance& instance, int resolution,
                                               bool strict = true);

/// Left-multiplies the pose rotation by exp(rotation_vector) and adds the
/// translation delta: the exact counterpart of the pose Jacobian columns.
RigidTransform perturb_pose(const RigidTransform& pose, const Vec3& translation_delta,
                            const Vec3& rotation_vector);

}  // namespace forge
