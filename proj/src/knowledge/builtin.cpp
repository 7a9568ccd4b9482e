// Built-in knowledge. Affordance regions and grasp frames are plausible
// reconstructions for the built-in templates, keyed to their local frames
// (y up, handles and knobs protruding along +z).

#include <cctype>
#include <cmath>
#include <set>

#include "forge/knowledge/knowledge.hpp"

namespace forge {
namespace {

std::string_view first_component(std::string_view path) { return path.substr(0, path.find('/')); }

// "leg_3" -> "leg"
std::string strip_index(std::string_view name) {
  const auto us = name.rfind('_');
  if (us == std::string_view::npos || us + 1 == name.size()) return std::string(name);
  for (std::size_t i = us + 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::string(name);
  }
  return std::string(name.substr(0, us));
}

RegionDef member_region(std::string label, std::string member) {
  return {std::move(label), [member](const RegionQuery& q) { return first_component(q.member) == member; }};
}

// Rotation with the given columns; the y column completes a right-handed frame.
RigidTransform frame_at(const Vec3& origin, const Vec3& x, const Vec3& z) {
  const Vec3 y = cross(z, x);
  Mat3 r;
  r.m = {x.x, y.x, z.x, x.y, y.y, z.y, x.z, y.z, z.z};
  return RigidTransform::from_matrix(r, origin);
}

KnowledgeDef semantic(const TemplateRegistry& templates) {
  KnowledgeDef d;
  d.id = "semantic";
  d.kind = KnowledgeKind::kRegion;
  d.description = "semantic part label of the top-level member";
  d.nested = false;
  for (const auto& id : templates.concept_ids()) {
    std::set<std::string> seen;
    auto& regions = d.regions[id];
    for (const MemberDecl& m : templates.concept_def(id).members) {
      const std::string label = strip_index(m.name);
      if (!seen.insert(label).second) continue;
      regions.push_back({label, [label](const RegionQuery& q) { return strip_index(first_component(q.member)) == label; }});
    }
  }
  return d;
}

KnowledgeDef affordance() {
  KnowledgeDef d;
  d.id = "affordance";
  d.kind = KnowledgeKind::kRegion;
  d.description = "push and pull interaction regions";
  d.regions["u_handle"] = {member_region("pull", "bar")};
  d.regions["arc_handle"] = {{"pull", [](const RegionQuery& q) {
                                const double apex = q.params[0] * (1.0 - std::cos(0.5 * q.params[2]));
                                return q.local.z > 0.5 * apex;
                              }}};
  d.regions["mug"] = {member_region("pull", "handle")};
  d.regions["flat_lid"] = {member_region("pull", "knob")};
  d.regions["knob_plate"] = {member_region("pull", "knob")};
  d.regions["push_button"] = {{"push", [](const RegionQuery& q) {
                                 const double top = q.params[1] + q.params[3];
                                 return first_component(q.member) == "button" && q.local.z > top - 0.1 * q.params[3];
                               }}};
  d.regions["door"] = {{"push", [](const RegionQuery& q) {
                          const double w = q.params[0];
                          return first_component(q.member) == "panel" &&
                                 std::hypot(q.local.x + 0.5 * w, q.local.z) > 0.6 * w;
                        }}};
  return d;
}

KnowledgeDef partpose() {
  KnowledgeDef d;
  d.id = "partpose";
  d.kind = KnowledgeKind::kPose;
  d.description = "oriented bounding box of every geometry instance";
  d.leaf_boxes = true;
  return d;
}

KnowledgeDef grasp() {
  KnowledgeDef d;
  d.id = "grasp";
  d.kind = KnowledgeKind::kPose;
  d.description = "antipodal grasp frames: z approaches, x closes the fingers";
  auto one = [](RigidTransform t) { return std::vector<LocalPose>{{t, std::nullopt}}; };
  d.frames["u_handle"] = {{"grasp", [one](std::span<const double> p, std::span<const int>) {
                             return one(frame_at({0, 0, p[1] + 0.5 * p[2]}, {0, 1, 0}, {0, 0, -1}));
                           }}};
  d.frames["arc_handle"] = {{"grasp", [one](std::span<const double> p, std::span<const int>) {
                               const double apex = p[0] * (1.0 - std::cos(0.5 * p[2]));
                               return one(frame_at({0, 0, apex}, {1, 0, 0}, {0, 0, -1}));
                             }}};
  d.frames["mug"] = {{"grasp", [one](std::span<const double> p, std::span<const int>) {
                        return one(frame_at({p[0] + p[2], 0, 0}, {0, 0, 1}, {-1, 0, 0}));
                      }}};
  d.frames["flat_lid"] = {{"grasp", [one](std::span<const double> p, std::span<const int>) {
                             return one(frame_at({0, 0.5 * p[1] + 0.5 * p[3], 0}, {1, 0, 0}, {0, -1, 0}));
                           }}};
  d.frames["knob_plate"] = {{"grasp", [one](std::span<const double> p, std::span<const int>) {
                               return one(frame_at({0, 0, p[1] + 0.5 * p[3]}, {1, 0, 0}, {0, 0, -1}));
                             }}};
  return d;
}

}  // namespace

KnowledgeRegistry builtin_knowledge(const TemplateRegistry& templates) {
  KnowledgeRegistry r;
  r.add(semantic(templates));
  r.add(affordance());
  r.add(partpose());
  r.add(grasp());
  return r;
}

}  // namespace forge
