#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/correspondence/correspondence.hpp"

namespace forge {

/// What a region discriminator sees: the node's parameters, the point in the
/// node's local frame and the path of the owning leaf below the node ("" when
/// the node is the leaf itself).
struct RegionQuery {
  std::span<const double> params;
  std::span<const int> discrete;
  Vec3 local;
  std::string_view member;
};

using RegionDiscriminator = std::function<bool(const RegionQuery&)>;

struct RegionDef {
  std::string label;
  RegionDiscriminator predicate;
};

struct LocalPose {
  RigidTransform transform;
  std::optional<Vec3> half_extents;
};

using PoseEmitter = std::function<std::vector<LocalPose>(std::span<const double>, std::span<const int>)>;

struct FrameDef {
  std::string label;
  PoseEmitter emitter;
};

enum class KnowledgeKind { kRegion, kPose };

struct KnowledgeDef {
  std::string id;
  KnowledgeKind kind = KnowledgeKind::kRegion;
  std::string description;
  // Evaluate on nested concept nodes too, so members inherit their own knowledge.
  bool nested = true;
  std::map<std::string, std::vector<RegionDef>, std::less<>> regions;  // by template id
  std::map<std::string, std::vector<FrameDef>, std::less<>> frames;    // by template id
  // Emit an oriented bounding box for every geometry leaf.
  bool leaf_boxes = false;
};

class KnowledgeRegistry {
 public:
  /// Throws Error(kConflict) on a duplicate id.
  void add(KnowledgeDef def);
  /// Throws Error(kNotFound) "unknown knowledge id".
  const KnowledgeDef& get(std::string_view id) const;
  bool contains(std::string_view id) const { return defs_.count(id) > 0; }
  std::vector<std::string> ids() const;

  /// Labels defined directly on a template, as (knowledge id, label) pairs.
  std::vector<std::pair<std::string, std::string>> region_labels(std::string_view template_id) const;
  std::vector<std::pair<std::string, std::string>> frame_labels(std::string_view template_id) const;

 private:
  std::map<std::string, KnowledgeDef, std::less<>> defs_;
};

/// "semantic" (member labels), "affordance" (push / pull regions), "partpose"
/// (one box per geometry leaf) and "grasp" (handle and knob frames).
KnowledgeRegistry builtin_knowledge(const TemplateRegistry& templates);

struct PoseAnnotation {
  std::string knowledge;
  std::string label;
  std::string part;    // part path
  std::string member;  // node path inside the part, "" for the part itself
  RigidTransform world;
  std::optional<Vec3> half_extents;

  friend bool operator==(const PoseAnnotation&, const PoseAnnotation&) = default;
};

struct AnnotationSet {
  std::string conceptualization_id;
  std::vector<std::string> knowledge_ids;
  // Sorted, duplicate-free label set per object point.
  std::vector<std::vector<std::string>> point_labels;
  std::vector<PoseAnnotation> poses;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

/// Region labels for every map entry, evaluated on the concept point y.
/// Pose-kind ids are accepted and contribute no labels.
AnnotationSet annotate_regions(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                               const Conceptualization& c, const CorrespondenceMap& map,
                               const std::vector<std::string>& ids);

/// World-frame poses of every frame emitter reachable in `c`. Region-kind ids
/// are accepted and contribute nothing.
AnnotationSet annotate_poses(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                             const Conceptualization& c, const std::vector<std::string>& ids, int resolution);

/// Both halves; `map` may be null for pose-only requests.
AnnotationSet annotate(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                       const Conceptualization& c, const CorrespondenceMap* map, const std::vector<std::string>& ids,
                       int resolution);

/// Correspondence plus annotate. The map is built only when a region-kind id
/// is requested and `points` is not empty; otherwise point_labels stays empty.
AnnotationSet annotate_cloud(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                             const Conceptualization& c, const PointCloud& points,
                             const std::vector<std::string>& ids, int resolution);

/// The eight corners of an oriented box in world coordinates, x-major order.
std::array<Vec3, 8> box_corners(const RigidTransform& pose, const Vec3& half_extents);

}  // namespace forge
