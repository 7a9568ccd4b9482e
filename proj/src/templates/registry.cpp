#include "forge/templates/registry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "forge/core/error.hpp"

namespace forge {

void validate_spec(const ParamSpec& s) {
  if (!(s.lower < s.upper) || !(s.lower <= s.default_value && s.default_value <= s.upper)) {
    throw Error(ErrorKind::kInvalidArgument, "parameter '" + s.name + "' has inconsistent bounds");
  }
}

void validate_spec(const DiscreteParamSpec& s) {
  if (s.min > s.default_value || s.default_value > s.max || s.max - s.min > 16) {
    throw Error(ErrorKind::kInvalidArgument,
                "discrete parameter '" + s.name + "' has inconsistent range");
  }
}

TemplateRegistry::TemplateRegistry(const TemplateRegistry& other)
    : geometry_(other.geometry_), concepts_(other.concepts_) {}

TemplateRegistry& TemplateRegistry::operator=(const TemplateRegistry& other) {
  if (this != &other) {
    geometry_ = other.geometry_;
    concepts_ = other.concepts_;
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
  }
  return *this;
}

TemplateRegistry::TemplateRegistry(TemplateRegistry&& other) noexcept
    : geometry_(std::move(other.geometry_)), concepts_(std::move(other.concepts_)) {}

TemplateRegistry& TemplateRegistry::operator=(TemplateRegistry&& other) noexcept {
  if (this != &other) {
    geometry_ = std::move(other.geometry_);
    concepts_ = std::move(other.concepts_);
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
  }
  return *this;
}

void TemplateRegistry::add_geometry(GeometryTemplateDef def) {
  if (contains(def.id)) throw Error(ErrorKind::kConflict, "template '" + def.id + "' already registered");
  if (def.params.size() > static_cast<std::size_t>(kMaxGeometryParams)) {
    throw Error(ErrorKind::kInvalidArgument, "geometry template '" + def.id + "' has too many parameters");
  }
  for (const auto& p : def.params) validate_spec(p);
  auto id = def.id;
  geometry_.emplace(std::move(id), std::move(def));
}

void TemplateRegistry::register_template(ConceptTemplateDef def) {
  if (def.id.empty()) throw Error(ErrorKind::kInvalidArgument, "template id must not be empty");
  if (contains(def.id)) throw Error(ErrorKind::kConflict, "template '" + def.id + "' already registered");
  if (!def.constraint) throw Error(ErrorKind::kInvalidArgument, "template '" + def.id + "' has no constraint map");
  if (def.params.size() + 6 > static_cast<std::size_t>(kMaxDerivatives)) {
    throw Error(ErrorKind::kInvalidArgument, "template '" + def.id + "' has too many parameters");
  }
  for (const auto& p : def.params) validate_spec(p);
  for (const auto& p : def.discrete) validate_spec(p);

  std::set<std::string> names;
  for (const MemberDecl& m : def.members) {
    if (!names.insert(m.name).second) {
      throw Error(ErrorKind::kInvalidArgument, "template '" + def.id + "' declares member '" + m.name + "' twice");
    }
    if (m.template_id == def.id) {
      throw Error(ErrorKind::kInvalidArgument, "cycle detected: template '" + def.id + "' contains itself");
    }
    if (!contains(m.template_id)) {
      throw Error(ErrorKind::kNotFound,
                  "template '" + def.id + "': unknown member template '" + m.template_id + "'");
    }
    if (!m.repeat_by.empty()) {
      bool found = false;
      for (const auto& d : def.discrete) found = found || d.name == m.repeat_by;
      if (!found) {
        throw Error(ErrorKind::kInvalidArgument, "member '" + m.name + "' repeats by unknown discrete parameter '" +
                                                     m.repeat_by + "'");
      }
    }
  }
  check_acyclic(def);
  auto id = def.id;
  concepts_.emplace(std::move(id), std::move(def));
}

void TemplateRegistry::check_acyclic(const ConceptTemplateDef& def) const {
  // Members must already be registered, so a cycle can only pass through the
  // new id; walk the member graph looking for it.
  std::set<std::string, std::less<>> seen;
  std::function<void(std::string_view)> walk = [&](std::string_view id) {
    if (id == def.id) throw Error(ErrorKind::kInvalidArgument, "cycle detected through template '" + def.id + "'");
    if (!seen.emplace(id).second) return;
    auto it = concepts_.find(id);
    if (it == concepts_.end()) return;
    for (const MemberDecl& m : it->second.members) walk(m.template_id);
  };
  for (const MemberDecl& m : def.members) walk(m.template_id);
}

bool TemplateRegistry::contains(std::string_view id) const {
  return geometry_.count(id) > 0 || concepts_.count(id) > 0;
}

bool TemplateRegistry::is_geometry(std::string_view id) const { return geometry_.count(id) > 0; }

const GeometryTemplateDef& TemplateRegistry::geometry(std::string_view id) const {
  auto it = geometry_.find(id);
  if (it == geometry_.end()) throw Error(ErrorKind::kNotFound, "unknown template '" + std::string(id) + "'");
  return it->second;
}

const ConceptTemplateDef& TemplateRegistry::concept_def(std::string_view id) const {
  auto it = concepts_.find(id);
  if (it == concepts_.end()) throw Error(ErrorKind::kNotFound, "unknown template '" + std::string(id) + "'");
  return it->second;
}

const std::vector<ParamSpec>& TemplateRegistry::param_specs(std::string_view id) const {
  if (auto it = geometry_.find(id); it != geometry_.end()) return it->second.params;
  return concept_def(id).params;
}

const std::vector<DiscreteParamSpec>& TemplateRegistry::discrete_specs(std::string_view id) const {
  static const std::vector<DiscreteParamSpec> kNone;
  if (geometry_.count(id)) return kNone;
  return concept_def(id).discrete;
}

std::vector<double> TemplateRegistry::default_params(std::string_view id) const {
  std::vector<double> out;
  for (const auto& p : param_specs(id)) out.push_back(p.default_value);
  return out;
}

std::vector<int> TemplateRegistry::default_discrete(std::string_view id) const {
  std::vector<int> out;
  for (const auto& p : discrete_specs(id)) out.push_back(p.default_value);
  return out;
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : geometry_) out.push_back(id);
  for (const auto& [id, _] : concepts_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> TemplateRegistry::geometry_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : geometry_) out.push_back(id);
  return out;
}

std::vector<std::string> TemplateRegistry::concept_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : concepts_) out.push_back(id);
  return out;
}

std::shared_ptr<const TriMesh> TemplateRegistry::default_instance(std::string_view id,
                                                                  int resolution) const {
  if (resolution < 3) throw Error(ErrorKind::kInvalidArgument, "resolution must be at least 3");
  const GeometryTemplateDef& def = geometry(id);
  std::lock_guard lock(cache_mutex_);
  auto key = std::make_pair(std::string(id), resolution);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto mesh = std::make_shared<const TriMesh>(def.default_instance(resolution));
  cache_.emplace(std::move(key), mesh);
  return mesh;
}

TemplateRegistry builtin_registry() {
  TemplateRegistry registry;
  add_builtin_geometry(registry);
  add_builtin_concepts(registry);
  return registry;
}

}  // namespace forge
