#include "forge/correspondence/correspondence.hpp"

#include "forge/core/error.hpp"

namespace forge {

CorrespondenceMap build_correspondence(const TemplateRegistry& registry, const PointCloud& object_points,
                                       const Conceptualization& c, int resolution) {
  if (object_points.empty()) throw Error(ErrorKind::kInvalidArgument, "object point cloud is empty");
  const ConceptScene scene = build_scene(registry, c, resolution);

  CorrespondenceMap map;
  map.resolution = resolution;
  for (std::size_t i = 0; i < scene.parts.size(); ++i) {
    map.parts.push_back({scene.parts[i].path, scene.parts[i].instance.template_id,
                         scene.face_offset[i + 1] - scene.face_offset[i]});
  }
  map.entries.reserve(object_points.size());
  for (const Vec3& x : object_points.points) {
    if (!is_finite(x)) throw Error(ErrorKind::kInvalidArgument, "object point cloud has non-finite points");
    const SurfaceHit hit = scene.index->closest(x);
    const std::size_t part = scene.part_of_face(hit.face_index);
    CorrespondenceEntry e;
    e.part = static_cast<std::uint32_t>(part);
    e.face = hit.face_index - scene.face_offset[part];
    e.barycentric = hit.barycentric;
    e.point = hit.point;
    e.offset = x - hit.point;
    e.distance = hit.distance;
    map.entries.push_back(e);
  }
  return map;
}

namespace {

PointCloud reapply(const CorrespondenceMap& map, const std::vector<FlatPart>& parts) {
  PointCloud out;
  out.points.reserve(map.entries.size());
  for (const CorrespondenceEntry& e : map.entries) {
    const TriMesh& mesh = parts[e.part].expansion.merged;
    const Vec3 y = surface_point(mesh, e.face, e.barycentric);
    out.points.push_back(y + e.offset);
  }
  return out;
}

void check_fit(const CorrespondenceMap& map, const std::vector<FlatPart>& parts, int resolution) {
  if (map.resolution != resolution) {
    throw Error(ErrorKind::kOutOfBounds, "correspondence map was built at resolution " + std::to_string(map.resolution) +
                                             ", not " + std::to_string(resolution));
  }
  if (map.parts.size() != parts.size()) {
    throw Error(ErrorKind::kOutOfBounds, "correspondence map has " + std::to_string(map.parts.size()) +
                                             " parts, conceptualization has " + std::to_string(parts.size()));
  }
  for (const CorrespondenceEntry& e : map.entries) {
    if (e.part >= parts.size() || e.face >= parts[e.part].expansion.merged.face_count()) {
      throw Error(ErrorKind::kOutOfBounds, "correspondence entry references face " + std::to_string(e.face) +
                                               " of part " + std::to_string(e.part) + " which does not exist");
    }
  }
}

}  // namespace

PointCloud restore_details(const TemplateRegistry& registry, const CorrespondenceMap& map, const Conceptualization& c,
                           int resolution) {
  const auto parts = flatten(registry, c, resolution);
  check_fit(map, parts, resolution);
  return reapply(map, parts);
}

PointCloud transfer_details(const TemplateRegistry& registry, const CorrespondenceMap& map,
                            const Conceptualization& edited, int resolution) {
  const auto parts = flatten(registry, edited, resolution);
  check_fit(map, parts, resolution);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.path != map.parts[i].path || p.instance.template_id != map.parts[i].template_id ||
        p.expansion.merged.face_count() != map.parts[i].face_count) {
      throw Error(ErrorKind::kInvalidArgument, "edited conceptualization differs in structure at part '" + p.path + "'");
    }
  }
  return reapply(map, parts);
}

}  // namespace forge
