#include "forge/knowledge/knowledge.hpp"

#include <algorithm>

#include "forge/core/error.hpp"

namespace forge {

void KnowledgeRegistry::add(KnowledgeDef def) {
  if (def.id.empty()) throw Error(ErrorKind::kInvalidArgument, "knowledge id must not be empty");
  if (contains(def.id)) throw Error(ErrorKind::kConflict, "knowledge id '" + def.id + "' already registered");
  auto id = def.id;
  defs_.emplace(std::move(id), std::move(def));
}

const KnowledgeDef& KnowledgeRegistry::get(std::string_view id) const {
  auto it = defs_.find(id);
  if (it == defs_.end()) throw Error(ErrorKind::kNotFound, "unknown knowledge id '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> KnowledgeRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : defs_) out.push_back(id);
  return out;
}

std::vector<std::pair<std::string, std::string>> KnowledgeRegistry::region_labels(std::string_view template_id) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [id, def] : defs_) {
    if (auto it = def.regions.find(template_id); it != def.regions.end()) {
      for (const RegionDef& r : it->second) out.emplace_back(id, r.label);
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> KnowledgeRegistry::frame_labels(std::string_view template_id) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [id, def] : defs_) {
    if (auto it = def.frames.find(template_id); it != def.frames.end()) {
      for (const FrameDef& f : it->second) out.emplace_back(id, f.label);
    }
    if (def.leaf_boxes) out.emplace_back(id, "box");
  }
  return out;
}

namespace {

std::vector<const KnowledgeDef*> resolve(const KnowledgeRegistry& knowledge, const std::vector<std::string>& ids) {
  std::vector<const KnowledgeDef*> out;
  std::vector<std::string> unknown;
  for (const auto& id : ids) {
    if (knowledge.contains(id)) {
      out.push_back(&knowledge.get(id));
    } else {
      unknown.push_back(id);
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + ("'" + u + "'");
    throw Error(ErrorKind::kNotFound, "unknown knowledge id " + list);
  }
  return out;
}

bool is_prefix_path(const std::string& prefix, const std::string& path) {
  if (prefix.empty()) return true;
  return path.size() > prefix.size() && path.compare(0, prefix.size(), prefix) == 0 && path[prefix.size()] == '/';
}

std::string_view relative(const std::string& prefix, const std::string& path) {
  if (prefix.empty()) return path;
  if (path.size() == prefix.size()) return {};
  return std::string_view(path).substr(prefix.size() + 1);
}

}  // namespace

AnnotationSet annotate_regions(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                               const Conceptualization& c, const CorrespondenceMap& map,
                               const std::vector<std::string>& ids) {
  const auto defs = resolve(knowledge, ids);
  AnnotationSet out;
  out.conceptualization_id = c.object_id;
  out.knowledge_ids = ids;
  out.point_labels.resize(map.entries.size());
  if (map.entries.empty()) return out;

  const auto parts = flatten(templates, c, map.resolution);
  if (parts.size() != map.parts.size()) {
    throw Error(ErrorKind::kInvalidArgument, "correspondence map does not match the conceptualization");
  }
  for (std::size_t i = 0; i < map.entries.size(); ++i) {
    const CorrespondenceEntry& e = map.entries[i];
    if (e.part >= parts.size() || e.face >= parts[e.part].expansion.merged.face_count()) {
      throw Error(ErrorKind::kOutOfBounds, "correspondence entry " + std::to_string(i) + " is out of range");
    }
    const Expansion& ex = parts[e.part].expansion;
    const ExpandedLeaf& leaf = ex.leaves[ex.leaf_of_face(e.face)];
    auto& labels = out.point_labels[i];

    auto visit = [&](const std::string& node_path, const std::string& template_id, std::span<const double> params,
                     std::span<const int> discrete, const RigidTransform& world, bool is_root) {
      RegionQuery q{params, discrete, world.inverse().apply(e.point), relative(node_path, leaf.path)};
      for (const KnowledgeDef* def : defs) {
        if (!def->nested && !is_root) continue;
        auto it = def->regions.find(template_id);
        if (it == def->regions.end()) continue;
        for (const RegionDef& r : it->second) {
          if (r.predicate(q)) labels.push_back(r.label);
        }
      }
    };
    // concept nodes are in pre-order, so ancestors come first
    bool root = true;
    for (const ExpandedConcept& node : ex.concepts) {
      if (node.path == leaf.path || is_prefix_path(node.path, leaf.path)) {
        visit(node.path, node.template_id, node.params, node.discrete, node.world, root);
        root = false;
      }
    }
    visit(leaf.path, leaf.template_id, leaf.params, {}, leaf.world, root);

    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  }
  return out;
}

AnnotationSet annotate_poses(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                             const Conceptualization& c, const std::vector<std::string>& ids, int resolution) {
  const auto defs = resolve(knowledge, ids);
  AnnotationSet out;
  out.conceptualization_id = c.object_id;
  out.knowledge_ids = ids;
  if (defs.empty()) return out;

  const auto parts = flatten(templates, c, resolution);
  for (const KnowledgeDef* def : defs) {
    for (const FlatPart& part : parts) {
      auto emit = [&](const std::string& node_path, const std::string& template_id, std::span<const double> params,
                      std::span<const int> discrete, const RigidTransform& world) {
        auto it = def->frames.find(template_id);
        if (it == def->frames.end()) return;
        for (const FrameDef& f : it->second) {
          for (const LocalPose& lp : f.emitter(params, discrete)) {
            out.poses.push_back({def->id, f.label, part.path, node_path, world * lp.transform, lp.half_extents});
          }
        }
      };
      bool root = true;
      for (const ExpandedConcept& node : part.expansion.concepts) {
        if (def->nested || root) emit(node.path, node.template_id, node.params, node.discrete, node.world);
        root = false;
      }
      for (const ExpandedLeaf& leaf : part.expansion.leaves) {
        if (def->nested || root) emit(leaf.path, leaf.template_id, leaf.params, {}, leaf.world);
        if (def->leaf_boxes) {
          // box of the leaf in its own frame, from a fine tessellation
          const TriMesh local = instantiate_geometry(templates, leaf.template_id, leaf.params, 64);
          const Aabb box = bounding_box(local.vertices);
          out.poses.push_back({def->id, "box", part.path, leaf.path,
                               leaf.world * RigidTransform::from_translation(box.center()), box.extent() * 0.5});
        }
      }
    }
  }
  return out;
}

AnnotationSet annotate(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                       const Conceptualization& c, const CorrespondenceMap* map, const std::vector<std::string>& ids,
                       int resolution) {
  AnnotationSet out = annotate_poses(templates, knowledge, c, ids, resolution);
  if (map) out.point_labels = annotate_regions(templates, knowledge, c, *map, ids).point_labels;
  return out;
}

AnnotationSet annotate_cloud(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                             const Conceptualization& c, const PointCloud& points,
                             const std::vector<std::string>& ids, int resolution) {
  bool regions = false;
  for (const auto& id : ids) regions = regions || knowledge.get(id).kind == KnowledgeKind::kRegion;
  if (regions && !points.empty()) {
    const CorrespondenceMap map = build_correspondence(templates, points, c, resolution);
    return annotate(templates, knowledge, c, &map, ids, resolution);
  }
  return annotate(templates, knowledge, c, nullptr, ids, resolution);
}

std::array<Vec3, 8> box_corners(const RigidTransform& pose, const Vec3& h) {
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 local{(i & 4) ? h.x : -h.x, (i & 2) ? h.y : -h.y, (i & 1) ? h.z : -h.z};
    out[static_cast<std::size_t>(i)] = pose.apply(local);
  }
  return out;
}

}  // namespace forge
