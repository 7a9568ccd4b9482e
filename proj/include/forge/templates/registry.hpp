#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/core/mesh.hpp"
#include "forge/templates/params.hpp"

namespace forge {

/// A parameterized primitive: a default instance per tessellation resolution
/// and a differentiable vertex map that deforms it.
struct GeometryTemplateDef {
  using VertexMap = std::function<Vec3(const Vec3& rest, std::span<const double> params)>;
  using VertexMapJet = std::function<Vec3T<GeoJet>(const Vec3& rest, std::span<const GeoJet> params)>;

  std::string id;
  std::vector<std::string> tags;
  std::vector<ParamSpec> params;
  std::function<TriMesh(int resolution)> default_instance;
  VertexMap vertex_map;
  VertexMapJet vertex_map_jet;
  // True when the vertex map may collapse faces onto a plane (e.g. clipping).
  std::function<bool(std::span<const double>)> truncates;
};

/// Wraps a functor with a templated `Vec3T<T> operator()(const Vec3&, std::span<const T>)`.
template <class F>
void set_vertex_map(GeometryTemplateDef& def, F f) {
  def.vertex_map = [f](const Vec3& rest, std::span<const double> p) { return f(rest, p); };
  def.vertex_map_jet = [f](const Vec3& rest, std::span<const GeoJet> p) { return f(rest, p); };
}

struct MemberDecl {
  std::string name;
  std::string template_id;
  // Name of the discrete parameter that replicates this member; empty if single.
  std::string repeat_by;
};

/// One member emitted by a constraint map.
struct MemberInstance {
  std::string name;
  std::string template_id;
  std::vector<Scalar> params;
  std::vector<int> discrete;
  Frame local;
};

using ConstraintMap =
    std::function<std::vector<MemberInstance>(std::span<const Scalar>, std::span<const int>)>;

struct ConceptTemplateDef {
  std::string id;
  std::vector<std::string> tags;
  std::vector<ParamSpec> params;
  std::vector<DiscreteParamSpec> discrete;
  std::vector<MemberDecl> members;
  ConstraintMap constraint;
};

/// The template library. Copies are independent; lookups are thread-safe.
class TemplateRegistry {
 public:
  TemplateRegistry() = default;
  TemplateRegistry(const TemplateRegistry& other);
  TemplateRegistry& operator=(const TemplateRegistry& other);
  TemplateRegistry(TemplateRegistry&& other) noexcept;
  TemplateRegistry& operator=(TemplateRegistry&& other) noexcept;

  void add_geometry(GeometryTemplateDef def);
  /// Throws Error(kConflict) for a duplicate id, Error(kNotFound) for an
  /// unregistered member and Error(kInvalidArgument) for a member cycle.
  void register_template(ConceptTemplateDef def);

  bool contains(std::string_view id) const;
  bool is_geometry(std::string_view id) const;
  const GeometryTemplateDef& geometry(std::string_view id) const;
  const ConceptTemplateDef& concept_def(std::string_view id) const;

  const std::vector<ParamSpec>& param_specs(std::string_view id) const;
  /// Empty for geometry templates.
  const std::vector<DiscreteParamSpec>& discrete_specs(std::string_view id) const;
  std::vector<double> default_params(std::string_view id) const;
  std::vector<int> default_discrete(std::string_view id) const;

  /// Sorted ids.
  std::vector<std::string> ids() const;
  std::vector<std::string> geometry_ids() const;
  std::vector<std::string> concept_ids() const;

  std::shared_ptr<const TriMesh> default_instance(std::string_view id, int resolution) const;

 private:
  void check_acyclic(const ConceptTemplateDef& def) const;

  std::map<std::string, GeometryTemplateDef, std::less<>> geometry_;
  std::map<std::string, ConceptTemplateDef, std::less<>> concepts_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::string, int>, std::shared_ptr<const TriMesh>> cache_;
};

/// Ten geometry templates plus the built-in concept templates.
TemplateRegistry builtin_registry();

void add_builtin_geometry(TemplateRegistry& registry);
void add_builtin_concepts(TemplateRegistry& registry);

}  // namespace forge
