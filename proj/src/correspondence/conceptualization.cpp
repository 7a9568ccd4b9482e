#include "forge/correspondence/conceptualization.hpp"

#include <algorithm>
#include <set>

#include "forge/core/error.hpp"

namespace forge {
namespace {

void validate_level(const TemplateRegistry& registry, const std::vector<ConceptPart>& parts, const std::string& prefix) {
  std::set<std::string> names;
  for (const ConceptPart& p : parts) {
    const std::string path = prefix.empty() ? p.name : prefix + "/" + p.name;
    if (p.name.empty()) throw Error(ErrorKind::kSchema, "part under '" + prefix + "' has an empty name");
    if (p.name.find('/') != std::string::npos) throw Error(ErrorKind::kSchema, "part name '" + p.name + "' contains '/'");
    if (!names.insert(p.name).second) throw Error(ErrorKind::kSchema, "duplicate part name '" + path + "'");
    try {
      validate_instance(registry, p.instance);
    } catch (const Error& e) {
      throw Error(e.kind(), "part '" + path + "': " + e.what());
    }
    validate_level(registry, p.children, path);
  }
}

void flatten_into(const TemplateRegistry& registry, const std::vector<ConceptPart>& parts, const std::string& prefix,
                  const RigidTransform& parent, int resolution, std::vector<FlatPart>& out) {
  for (const ConceptPart& p : parts) {
    FlatPart fp;
    fp.path = prefix.empty() ? p.name : prefix + "/" + p.name;
    fp.instance = p.instance;
    fp.instance.pose = parent * p.instance.pose;
    try {
      fp.expansion = instantiate_concept(registry, fp.instance, resolution);
    } catch (const Error& e) {
      throw Error(e.kind(), "part '" + fp.path + "': " + e.what());
    }
    const RigidTransform world = fp.instance.pose;
    const std::string path = fp.path;
    out.push_back(std::move(fp));
    flatten_into(registry, p.children, path, world, resolution, out);
  }
}

}  // namespace

void validate_conceptualization(const TemplateRegistry& registry, const Conceptualization& c) {
  validate_level(registry, c.parts, "");
}

std::vector<FlatPart> flatten(const TemplateRegistry& registry, const Conceptualization& c, int resolution) {
  std::vector<FlatPart> out;
  flatten_into(registry, c.parts, "", RigidTransform::identity(), resolution, out);
  return out;
}

std::size_t ConceptScene::part_of_face(std::uint32_t global_face) const {
  auto it = std::upper_bound(face_offset.begin(), face_offset.end(), global_face);
  return static_cast<std::size_t>(it - face_offset.begin()) - 1;
}

ConceptScene build_scene(const TemplateRegistry& registry, const Conceptualization& c, int resolution) {
  if (c.parts.empty()) throw Error(ErrorKind::kInvalidArgument, "conceptualization has no parts");
  ConceptScene scene;
  scene.parts = flatten(registry, c, resolution);
  TriMesh all;
  for (const FlatPart& p : scene.parts) {
    scene.face_offset.push_back(static_cast<std::uint32_t>(all.faces.size()));
    all.append(p.expansion.merged);
  }
  scene.face_offset.push_back(static_cast<std::uint32_t>(all.faces.size()));
  // lowest global face == lowest part, then lowest face within it
  scene.index = std::make_unique<MeshIndex>(std::move(all));
  return scene;
}

}  // namespace forge
