#pragma once

#include <memory>
#include <string>
#include <vector>

#include "forge/core/closest_point.hpp"
#include "forge/templates/instance.hpp"

namespace forge {

/// One part of an object description. A child's pose is relative to its
/// parent part's pose.
struct ConceptPart {
  std::string name;
  ConceptInstance instance;
  std::vector<ConceptPart> children;

  friend bool operator==(const ConceptPart&, const ConceptPart&) = default;
};

struct Category {
  std::string code;  // three characters, e.g. "Mug"
  std::string name;

  friend bool operator==(const Category&, const Category&) = default;
};

struct Conceptualization {
  std::string object_id;
  std::string source_mesh;
  Category category;
  std::vector<ConceptPart> parts;

  friend bool operator==(const Conceptualization&, const Conceptualization&) = default;
};

/// Throws Error(kSchema) for empty or duplicate part names on one level and
/// propagates validate_instance errors, prefixed with the part path.
void validate_conceptualization(const TemplateRegistry& registry, const Conceptualization& c);

/// A part in pre-order with its composed world pose and expansion.
struct FlatPart {
  std::string path;  // "lid", "body/handle", ...
  ConceptInstance instance;  // pose composed to world
  Expansion expansion;
};

/// Pre-order flattening with strict expansion at `resolution`.
std::vector<FlatPart> flatten(const TemplateRegistry& registry, const Conceptualization& c, int resolution);

/// All parts merged into one mesh; part `i` owns faces [face_offset[i], face_offset[i + 1]).
struct ConceptScene {
  std::vector<FlatPart> parts;
  std::vector<std::uint32_t> face_offset;
  std::unique_ptr<MeshIndex> index;

  std::size_t part_of_face(std::uint32_t global_face) const;
};

ConceptScene build_scene(const TemplateRegistry& registry, const Conceptualization& c, int resolution);

}  // namespace forge
