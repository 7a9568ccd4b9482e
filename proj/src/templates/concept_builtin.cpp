// Built-in concept templates. Local frames are y-up; handles, knobs and
// buttons protrude along +z from a mounting plane at z = 0.
//
// Members that touch are made to interpenetrate rather than share a face, so
// that every surface point has a single nearest member.

#include <cmath>
#include <numbers>

#include "forge/templates/registry.hpp"

namespace forge {
namespace {

constexpr double kPi = std::numbers::pi;
using S = ParamScaling;

ParamSpec len(std::string name, double lo, double hi, double def, S scaling = S::kNone) {
  return {std::move(name), lo, hi, def, "m", scaling};
}
ParamSpec ratio(std::string name, double lo, double hi, double def) {
  return {std::move(name), lo, hi, def, "ratio", S::kNone};
}
ParamSpec angle(std::string name, double lo, double hi, double def) {
  return {std::move(name), lo, hi, def, "rad", S::kNone};
}

MemberInstance member(std::string name, std::string id, std::vector<Scalar> params, Frame local) {
  return {std::move(name), std::move(id), std::move(params), {}, std::move(local)};
}

Frame at(const Scalar& x, const Scalar& y, const Scalar& z) { return translation_frame(x, y, z); }

const Scalar kZero(0.0);

void add_u_handle(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "u_handle";
  d.tags = {"handle", "pull"};
  d.params = {len("length", 0.01, 1.0, 0.16, S::kX), len("standoff", 0.005, 0.3, 0.04, S::kZ),
              len("thickness", 0.004, 0.04, 0.016)};
  d.members = {{"bar", "cuboid", ""}, {"post_left", "cuboid", ""}, {"post_right", "cuboid", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& length = p[0];
    const Scalar& standoff = p[1];
    const Scalar& t = p[2];
    // posts reach halfway into the bar
    const Scalar post_depth = standoff + t * 0.5;
    const Scalar post_x = length * 0.5 - t * 0.5;
    return std::vector<MemberInstance>{
        member("bar", "cuboid", {length, t, t}, at(kZero, kZero, standoff + t * 0.5)),
        member("post_left", "cuboid", {t * 0.8, t * 0.8, post_depth}, at(-post_x, kZero, post_depth * 0.5)),
        member("post_right", "cuboid", {t * 0.8, t * 0.8, post_depth}, at(post_x, kZero, post_depth * 0.5)),
    };
  };
  r.register_template(std::move(d));
}

void add_arc_handle(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "arc_handle";
  d.tags = {"handle", "pull"};
  d.params = {len("radius", 0.01, 0.3, 0.06, S::kUniform), len("thickness", 0.002, 0.03, 0.008),
              angle("arc_angle", 1.0, 5.5, kPi)};
  d.members = {{"arc", "torus_arc", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    using std::cos;
    // arc turned to bulge along +z with both ends on the mounting plane
    Frame f = axis_rotation_frame(1, Scalar(-0.5 * kPi));
    f.translation = {kZero, kZero, -(p[0] * cos(p[2] * 0.5))};
    return std::vector<MemberInstance>{member("arc", "torus_arc", {p[0], p[1], p[2]}, f)};
  };
  r.register_template(std::move(d));
}

void add_mug(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "mug";
  d.tags = {"container", "Mug"};
  d.params = {len("body_radius", 0.02, 0.2, 0.045, S::kRadialXZ), len("body_height", 0.04, 0.3, 0.1, S::kY),
              len("handle_radius", 0.01, 0.1, 0.03), len("handle_thickness", 0.003, 0.02, 0.007)};
  d.members = {{"body", "cylinder", ""}, {"handle", "torus_arc", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    // handle arc centred on the body wall; its ends sink into the body
    return std::vector<MemberInstance>{
        member("body", "cylinder", {p[0], p[1]}, Frame{}),
        member("handle", "torus_arc", {p[2], p[3], Scalar(3.6)}, at(p[0], kZero, kZero)),
    };
  };
  r.register_template(std::move(d));
}

void add_bottle(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "bottle";
  d.tags = {"container", "Bot"};
  d.params = {len("body_radius", 0.01, 0.3, 0.04, S::kRadialXZ), len("body_height", 0.02, 0.5, 0.15, S::kY),
              len("shoulder_height", 0.005, 0.2, 0.03), ratio("neck_ratio", 0.1, 0.9, 0.4),
              len("neck_height", 0.005, 0.2, 0.04)};
  d.members = {{"body", "cylinder", ""}, {"shoulder", "frustum", ""}, {"neck", "cylinder", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& radius = p[0];
    const Scalar& body_h = p[1];
    const Scalar& shoulder_h = p[2];
    const Scalar neck_r = p[3] * radius;
    const Scalar& neck_h = p[4];
    const Scalar y0 = (body_h + shoulder_h + neck_h) * -0.5;
    const Scalar neck_len = neck_h + shoulder_h * 0.1;
    return std::vector<MemberInstance>{
        member("body", "cylinder", {radius, body_h}, at(kZero, y0 + body_h * 0.5, kZero)),
        member("shoulder", "frustum", {radius, neck_r, shoulder_h * 1.1},
               at(kZero, y0 + body_h + shoulder_h * 0.45, kZero)),
        member("neck", "cylinder", {neck_r, neck_len},
               at(kZero, y0 + body_h + shoulder_h * 0.9 + neck_len * 0.5, kZero)),
    };
  };
  r.register_template(std::move(d));
}

void add_flat_lid(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "flat_lid";
  d.tags = {"lid", "pull"};
  d.params = {len("radius", 0.02, 0.6, 0.1, S::kRadialXZ), len("thickness", 0.002, 0.05, 0.01),
              len("knob_radius", 0.005, 0.05, 0.015), len("knob_height", 0.005, 0.08, 0.02)};
  d.members = {{"plate", "cylinder", ""}, {"knob", "sphere", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    // knob ellipsoid spans from the plate mid-plane to knob_height above the top
    const Scalar half = (p[3] + p[1] * 0.5) * 0.5;
    const Scalar center = p[1] * 0.5 + p[3] - half;
    return std::vector<MemberInstance>{
        member("plate", "cylinder", {p[0], p[1]}, Frame{}),
        member("knob", "sphere", {p[2], half, p[2], Scalar(-1.0)}, at(kZero, center, kZero)),
    };
  };
  r.register_template(std::move(d));
}

// Square back plate with a cylinder protruding along +z.
ConceptTemplateDef plate_with_cylinder(std::string id, std::string part, std::vector<std::string> tags) {
  ConceptTemplateDef d;
  d.id = std::move(id);
  d.tags = std::move(tags);
  d.params = {len("plate_size", 0.02, 0.3, 0.08, S::kX), len("plate_thickness", 0.002, 0.03, 0.006, S::kZ),
              len(part + "_radius", 0.004, 0.05, 0.015), len(part + "_length", 0.005, 0.08, 0.02)};
  d.members = {{"plate", "cuboid", ""}, {part, "cylinder", ""}};
  d.constraint = [part](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& size = p[0];
    const Scalar& pt = p[1];
    const Scalar stem = p[3] + pt * 0.5;
    Frame f = axis_rotation_frame(0, Scalar(0.5 * kPi));
    f.translation = {kZero, kZero, pt * 0.5 + stem * 0.5};
    return std::vector<MemberInstance>{
        member("plate", "cuboid", {size, size, pt}, at(kZero, kZero, pt * 0.5)),
        member(part, "cylinder", {p[2], stem}, f),
    };
  };
  return d;
}

void add_kitchen_pot(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "kitchen_pot";
  d.tags = {"container", "Ktp"};
  d.params = {len("body_radius", 0.05, 0.4, 0.12, S::kRadialXZ),
              len("body_height", 0.03, 0.4, 0.1, S::kY),
              ratio("handle_span", 0.3, 1.2, 0.7),
              len("handle_clearance", 0.005, 0.06, 0.02),
              len("handle_thickness", 0.006, 0.03, 0.012),
              len("lid_thickness", 0.002, 0.03, 0.008),
              len("knob_radius", 0.005, 0.05, 0.015),
              len("knob_height", 0.005, 0.08, 0.02)};
  d.members = {{"body", "cylinder", ""},
               {"handle_left", "u_handle", ""},
               {"handle_right", "u_handle", ""},
               {"lid", "flat_lid", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& radius = p[0];
    const Scalar& height = p[1];
    // handles mount on a chord plane inside the wall so the posts sink in
    const Scalar mount = radius * 0.75;
    const Scalar span = p[2] * radius;
    const Scalar standoff = radius * 0.25 + p[3];
    const Scalar y = height * 0.25;
    return std::vector<MemberInstance>{
        member("body", "cylinder", {radius, height}, Frame{}),
        member("handle_left", "u_handle", {span, standoff, p[4]}, place(-mount, y, kZero, 1, Scalar(-0.5 * kPi))),
        member("handle_right", "u_handle", {span, standoff, p[4]}, place(mount, y, kZero, 1, Scalar(0.5 * kPi))),
        member("lid", "flat_lid", {radius * 1.02, p[5], p[6], p[7]}, at(kZero, height * 0.5, kZero)),
    };
  };
  r.register_template(std::move(d));
}

void add_legged_base(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "legged_base";
  d.tags = {"support", "Tab", "Chr"};
  d.params = {len("plate_radius", 0.05, 1.0, 0.3, S::kRadialXZ), len("plate_thickness", 0.005, 0.1, 0.03),
              len("leg_radius", 0.005, 0.08, 0.02), len("leg_length", 0.05, 1.5, 0.4, S::kY),
              ratio("leg_spread", 0.3, 0.95, 0.75)};
  d.discrete = {{"leg_count", 3, 6, 4}};
  d.members = {{"top", "cylinder", ""}, {"leg", "cylinder", "leg_count"}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int> q) {
    const Scalar& plate_r = p[0];
    const Scalar& plate_t = p[1];
    const Scalar half_h = (plate_t + p[3]) * 0.5;
    const Scalar leg_len = p[3] + plate_t * 0.5;  // legs reach the plate mid-plane
    const Scalar ring = p[4] * plate_r;
    std::vector<MemberInstance> out;
    out.push_back(member("top", "cylinder", {plate_r, plate_t}, at(kZero, half_h - plate_t * 0.5, kZero)));
    const int n = q[0];
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * kPi * k / n;
      out.push_back(member("leg_" + std::to_string(k), "cylinder", {p[2], leg_len},
                           at(ring * std::cos(a), -half_h + leg_len * 0.5, ring * std::sin(a))));
    }
    return out;
  };
  r.register_template(std::move(d));
}

void add_table(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "table";
  d.tags = {"furniture", "Tab"};
  d.params = {len("width", 0.3, 3.0, 1.2, S::kX),        len("depth", 0.3, 2.0, 0.7, S::kZ),
              len("height", 0.3, 1.2, 0.75, S::kY),      len("top_thickness", 0.01, 0.1, 0.04),
              len("leg_size", 0.02, 0.15, 0.05),         len("leg_inset", 0.005, 0.2, 0.03)};
  d.members = {{"top", "cuboid", ""},
               {"leg_0", "cuboid", ""},
               {"leg_1", "cuboid", ""},
               {"leg_2", "cuboid", ""},
               {"leg_3", "cuboid", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& w = p[0];
    const Scalar& dp = p[1];
    const Scalar& h = p[2];
    const Scalar& tt = p[3];
    const Scalar& ls = p[4];
    const Scalar leg_h = h - tt * 0.5;
    const Scalar lx = w * 0.5 - p[5] - ls * 0.5;
    const Scalar lz = dp * 0.5 - p[5] - ls * 0.5;
    const Scalar ly = h * -0.5 + leg_h * 0.5;
    std::vector<MemberInstance> out;
    out.push_back(member("top", "cuboid", {w, tt, dp}, at(kZero, h * 0.5 - tt * 0.5, kZero)));
    const double sx[4] = {-1, 1, 1, -1};
    const double sz[4] = {-1, -1, 1, 1};
    for (int k = 0; k < 4; ++k) {
      out.push_back(member("leg_" + std::to_string(k), "cuboid", {ls, leg_h, ls}, at(lx * sx[k], ly, lz * sz[k])));
    }
    return out;
  };
  r.register_template(std::move(d));
}

void add_chair(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "chair";
  d.tags = {"furniture", "Chr"};
  d.params = {len("seat_width", 0.3, 0.8, 0.45, S::kX),     len("seat_depth", 0.3, 0.8, 0.45, S::kZ),
              len("seat_height", 0.3, 0.7, 0.45),           len("seat_thickness", 0.02, 0.1, 0.05),
              len("back_height", 0.2, 0.8, 0.45),           len("back_thickness", 0.02, 0.1, 0.04),
              angle("back_tilt", -0.1, 0.4, 0.1),           len("leg_size", 0.02, 0.08, 0.04)};
  d.members = {{"seat", "cuboid", ""},  {"back", "cuboid", ""},  {"leg_0", "cuboid", ""},
               {"leg_1", "cuboid", ""}, {"leg_2", "cuboid", ""}, {"leg_3", "cuboid", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& sw = p[0];
    const Scalar& sd = p[1];
    const Scalar& sh = p[2];
    const Scalar& st = p[3];
    const Scalar& bh = p[4];
    const Scalar& bt = p[5];
    const Scalar& ls = p[7];
    const Scalar floor = (sh + bh) * -0.5;
    const Scalar seat_mid = floor + sh - st * 0.5;

    // back pivots about its bottom edge, which sits at the seat mid-plane
    Frame back = axis_rotation_frame(0, -p[6]);
    const Vec3T<Scalar> pivot{kZero, seat_mid, sd * -0.5 + bt * 0.5 + 0.005};
    back.translation = pivot + back.rotation * Vec3T<Scalar>{kZero, bh * 0.5, kZero};

    std::vector<MemberInstance> out;
    out.push_back(member("seat", "cuboid", {sw, st, sd}, at(kZero, seat_mid, kZero)));
    out.push_back(member("back", "cuboid", {sw * 0.96, bh, bt}, back));
    const Scalar leg_h = sh - st * 0.5;
    const Scalar lx = sw * 0.5 - ls * 0.5 - 0.01;
    const Scalar lz = sd * 0.5 - ls * 0.5 - 0.01;
    const double sx[4] = {-1, 1, 1, -1};
    const double sz[4] = {-1, -1, 1, 1};
    for (int k = 0; k < 4; ++k) {
      out.push_back(member("leg_" + std::to_string(k), "cuboid", {ls, leg_h, ls},
                           at(lx * sx[k], floor + leg_h * 0.5, lz * sz[k])));
    }
    return out;
  };
  r.register_template(std::move(d));
}

void add_door(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "door";
  d.tags = {"articulated", "Dor"};
  d.params = {len("width", 0.3, 1.5, 0.8, S::kX),        len("height", 0.5, 2.5, 2.0, S::kY),
              len("thickness", 0.01, 0.08, 0.04, S::kZ), len("frame_width", 0.01, 0.15, 0.05),
              angle("open_angle", 0.0, 1.5, 0.0)};
  d.members = {{"frame", "cuboid", ""}, {"panel", "cuboid", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& w = p[0];
    const Scalar& h = p[1];
    const Scalar& t = p[2];
    const Scalar& fw = p[3];
    const Scalar hinge_x = w * -0.5;
    Frame panel = axis_rotation_frame(1, p[4]);
    panel.translation = Vec3T<Scalar>{hinge_x, kZero, kZero} + panel.rotation * Vec3T<Scalar>{w * 0.5, kZero, kZero};
    return std::vector<MemberInstance>{
        member("frame", "cuboid", {fw, h * 1.05, t * 1.5}, at(hinge_x - fw * 0.3, kZero, kZero)),
        member("panel", "cuboid", {w, h, t}, panel),
    };
  };
  r.register_template(std::move(d));
}

void add_drawer(TemplateRegistry& r) {
  ConceptTemplateDef d;
  d.id = "drawer";
  d.tags = {"articulated", "Stf"};
  d.params = {len("width", 0.15, 1.2, 0.4, S::kX),         len("depth", 0.15, 0.8, 0.4, S::kZ),
              len("height", 0.05, 0.4, 0.15, S::kY),       len("wall", 0.005, 0.03, 0.012),
              ratio("handle_span", 0.15, 0.6, 0.35),        len("handle_standoff", 0.01, 0.06, 0.03),
              len("handle_thickness", 0.006, 0.03, 0.012)};
  d.members = {{"front", "cuboid", ""},  {"side_left", "cuboid", ""}, {"side_right", "cuboid", ""},
               {"back", "cuboid", ""},   {"bottom", "cuboid", ""},    {"handle", "u_handle", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar& w = p[0];
    const Scalar& dp = p[1];
    const Scalar& h = p[2];
    const Scalar& wall = p[3];
    const Scalar side_len = dp - wall * 0.5;
    const Scalar side_x = w * 0.48 - wall * 0.5;
    const Scalar inner_w = w * 0.96 - wall;
    return std::vector<MemberInstance>{
        member("front", "cuboid", {w, h, wall}, at(kZero, kZero, dp * 0.5 - wall * 0.5)),
        member("side_left", "cuboid", {wall, h * 0.9, side_len}, at(-side_x, kZero, dp * -0.5 + side_len * 0.5)),
        member("side_right", "cuboid", {wall, h * 0.9, side_len}, at(side_x, kZero, dp * -0.5 + side_len * 0.5)),
        member("back", "cuboid", {inner_w, h * 0.88, wall}, at(kZero, kZero, dp * -0.5 + wall)),
        member("bottom", "cuboid", {inner_w, wall, dp - wall * 1.5}, at(kZero, h * -0.45 + wall, wall * 0.25)),
        member("handle", "u_handle", {p[4] * w, p[5] + wall * 0.5, p[6]}, at(kZero, kZero, dp * 0.5 - wall * 0.5)),
    };
  };
  r.register_template(std::move(d));
}

}  // namespace

void add_builtin_concepts(TemplateRegistry& r) {
  add_u_handle(r);
  add_arc_handle(r);
  add_mug(r);
  add_bottle(r);
  add_flat_lid(r);
  r.register_template(plate_with_cylinder("knob_plate", "knob", {"knob", "pull"}));
  r.register_template(plate_with_cylinder("push_button", "button", {"button", "push"}));
  add_kitchen_pot(r);
  add_legged_base(r);
  add_table(r);
  add_chair(r);
  add_door(r);
  add_drawer(r);
}

}  // namespace forge
