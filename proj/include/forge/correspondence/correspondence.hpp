#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "forge/correspondence/conceptualization.hpp"

namespace forge {

struct CorrespondenceEntry {
  std::uint32_t part = 0;  // index into the pre-order part list
  std::uint32_t face = 0;  // face of that part's merged mesh
  std::array<double, 3> barycentric{1.0, 0.0, 0.0};
  Vec3 point;   // y, the concept surface point
  Vec3 offset;  // x - y
  double distance = 0.0;

  friend bool operator==(const CorrespondenceEntry&, const CorrespondenceEntry&) = default;
};

struct CorrespondencePart {
  std::string path;
  std::string template_id;
  std::uint32_t face_count = 0;

  friend bool operator==(const CorrespondencePart&, const CorrespondencePart&) = default;
};

struct CorrespondenceMap {
  int resolution = 0;
  std::vector<CorrespondencePart> parts;
  std::vector<CorrespondenceEntry> entries;  // one per object point

  friend bool operator==(const CorrespondenceMap&, const CorrespondenceMap&) = default;
};

/// Globally nearest concept surface point for every object point. Ties go to
/// the lowest part index, then the lowest face. Throws Error(kInvalidArgument)
/// for an empty cloud or a conceptualization without parts.
CorrespondenceMap build_correspondence(const TemplateRegistry& registry, const PointCloud& object_points,
                                       const Conceptualization& c, int resolution);

/// y_i + offset_i with y_i re-derived from the stored face and barycentric
/// weights. Throws Error(kOutOfBounds) when the map does not fit `c` at
/// `resolution`.
PointCloud restore_details(const TemplateRegistry& registry, const CorrespondenceMap& map,
                           const Conceptualization& c, int resolution);

/// As restore_details for an edited conceptualization; throws
/// Error(kInvalidArgument) unless part paths, template ids and discrete
/// parameters match the map's source.
PointCloud transfer_details(const TemplateRegistry& registry, const CorrespondenceMap& map,
                            const Conceptualization& edited, int resolution);

}  // namespace forge
