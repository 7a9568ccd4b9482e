#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "forge/core/error.hpp"
#include "forge/templates/instance.hpp"
#include "oracles.hpp"

using namespace forge;

namespace {
const TemplateRegistry& reg() {
  static const TemplateRegistry r = builtin_registry();
  return r;
}

ConceptInstance make(const std::string& id, std::vector<double> p, std::vector<int> d = {}) {
  ConceptInstance inst = default_instance(reg(), id);
  if (!p.empty()) inst.continuous = std::move(p);
  if (!d.empty()) inst.discrete = std::move(d);
  return inst;
}
}  // namespace

TEST_CASE("builtin registry contents") {
  CHECK(reg().geometry_ids().size() == 10);
  CHECK(reg().concept_ids().size() >= 12);
  const auto ids = reg().ids();
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  try {
    reg().param_specs("no_such_template");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotFound);
    CHECK(std::string(e.what()).find("unknown template") != std::string::npos);
  }
}

TEST_CASE("every template instantiates at defaults") {
  for (const auto& id : reg().ids()) {
    CAPTURE(id);
    const Expansion e = instantiate_concept(reg(), default_instance(reg(), id), 16);
    CHECK(e.valid());
    CHECK(e.merged.face_count() > 0);
    CHECK_NOTHROW(e.merged.validate());
    CHECK(e.merged.total_area() > 0);
  }
}

TEST_CASE("default instancing is deterministic") {
  for (const auto& id : reg().ids()) {
    const auto a = instantiate_concept(reg(), default_instance(reg(), id), 12).merged;
    const auto b = instantiate_concept(reg(), default_instance(reg(), id), 12).merged;
    CHECK(a.vertices == b.vertices);
    CHECK(a.faces == b.faces);
  }
}

TEST_CASE("vertex map at defaults reproduces the default instance") {
  for (const auto& id : reg().geometry_ids()) {
    CAPTURE(id);
    const auto rest = reg().default_instance(id, 16);
    const TriMesh m = instantiate_geometry(reg(), id, reg().default_params(id), 16);
    REQUIRE(m.vertices.size() == rest->vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(distance(m.vertices[i], rest->vertices[i]) < 1e-9);
    CHECK(m.faces == rest->faces);
  }
}

TEST_CASE("topology does not depend on continuous parameters") {
  for (const auto& id : reg().ids()) {
    CAPTURE(id);
    auto inst = testing::random_instance(reg(), id, 3);
    inst.discrete = reg().default_discrete(id);
    const auto a = instantiate_concept(reg(), default_instance(reg(), id), 10).merged;
    const auto b = instantiate_concept(reg(), inst, 10).merged;
    CHECK(a.vertices.size() == b.vertices.size());
    CHECK(a.faces == b.faces);
  }
}

TEST_CASE("sphere deformations") {
  const TriMesh unit = instantiate_geometry(reg(), "sphere", std::vector<double>{1, 1, 1, -1}, 16);
  for (const Vec3& v : unit.vertices) CHECK(std::abs(norm(v) - 1) < 1e-9);
  const TriMesh squashed = instantiate_geometry(reg(), "sphere", std::vector<double>{1, 0.5, 1, -1}, 16);
  for (std::size_t i = 0; i < unit.vertices.size(); ++i) {
    CHECK(std::abs(squashed.vertices[i].y - 0.5 * unit.vertices[i].y) < 1e-12);
    CHECK(squashed.vertices[i].x == unit.vertices[i].x);
  }
  const TriMesh cut = instantiate_geometry(reg(), "sphere", std::vector<double>{1, 1, 1, -0.25}, 16);
  CHECK(cut.truncated);
  for (const Vec3& v : cut.vertices) CHECK(v.y >= -0.25 - 1e-12);
}

TEST_CASE("quad prism top translation") {
  const TriMesh base = instantiate_geometry(reg(), "quad_prism", reg().default_params("quad_prism"), 8);
  auto p = reg().default_params("quad_prism");
  p[3] = 0.3;
  const TriMesh moved = instantiate_geometry(reg(), "quad_prism", p, 8);
  int top = 0;
  for (std::size_t i = 0; i < base.vertices.size(); ++i) {
    const Vec3 d = moved.vertices[i] - base.vertices[i];
    if (base.vertices[i].y > 0) {
      ++top;
      CHECK(distance(d, {0.3, 0, 0}) < 1e-12);
    } else {
      CHECK(norm(d) == 0.0);
    }
  }
  CHECK(top == 4);
}

TEST_CASE("out of bounds parameters are rejected with the parameter named") {
  try {
    instantiate_geometry(reg(), "cylinder", std::vector<double>{-1.0, 1.0}, 8);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kOutOfBounds);
    CHECK(std::string(e.what()).find("radius") != std::string::npos);
  }
  CHECK_THROWS_AS(instantiate_geometry(reg(), "cylinder", std::vector<double>{0.5}, 8), Error);
  CHECK_THROWS_AS(instantiate_geometry(reg(), "cylinder", std::vector<double>{0.5, 1.0}, 2), Error);
}

TEST_CASE("legged base replicates legs by the discrete parameter") {
  for (int n = 3; n <= 6; ++n) {
    const Expansion e = instantiate_concept(reg(), make("legged_base", {}, {n}), 12);
    int legs = 0;
    for (const auto& l : e.leaves) legs += l.path.rfind("leg_", 0) == 0;
    CHECK(legs == n);
    CHECK(e.leaves.size() == static_cast<std::size_t>(n + 1));
  }
  CHECK_THROWS_AS(instantiate_concept(reg(), make("legged_base", {}, {7}), 12), Error);
}

TEST_CASE("member paths are unique and nested") {
  const Expansion e = instantiate_concept(reg(), default_instance(reg(), "kitchen_pot"), 12);
  std::set<std::string> paths;
  for (const auto& l : e.leaves) CHECK(paths.insert(l.path).second);
  CHECK(paths.count("lid/knob") == 1);
  CHECK(paths.count("handle_left/bar") == 1);
  CHECK(e.concepts.front().path.empty());
  for (std::uint32_t f = 0; f < e.merged.face_count(); f += 7) {
    const auto& leaf = e.leaves[e.leaf_of_face(f)];
    CHECK((f >= leaf.face_begin && f < leaf.face_end));
  }
}

TEST_CASE("pose rigidly transforms the whole expansion") {
  for (const auto& id : {"mug", "chair", "kitchen_pot", "cuboid"}) {
    ConceptInstance inst = default_instance(reg(), id);
    const auto base = instantiate_concept(reg(), inst, 12).merged;
    inst.pose = {Quaternion::from_axis_angle(normalized(Vec3{0.2, 1, -0.4}), 1.3), {0.5, -2, 1}};
    const auto posed = instantiate_concept(reg(), inst, 12).merged;
    const auto expected = apply_transform(base, inst.pose);
    for (std::size_t i = 0; i < base.vertices.size(); ++i) {
      CHECK(distance(posed.vertices[i], expected.vertices[i]) < 1e-9);
    }
  }
}

TEST_CASE("cuboid width derivative") {
  const auto r = instantiate_with_jacobian(reg(), make("cuboid", {2.0, 1.0, 1.0}), 4);
  const auto& m = r.expansion.merged;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    CHECK(r.jacobian.at(v, 0, 0) == doctest::Approx(m.vertices[v].x > 0 ? 0.5 : -0.5));
    CHECK(r.jacobian.at(v, 1, 0) == 0.0);
  }
  CHECK(r.jacobian.param_count == 3 + 6);
}

TEST_CASE("jacobian matches finite differences for every template") {
  for (const auto& id : reg().ids()) {
    for (std::uint64_t s = 1; s <= 2; ++s) {
      CAPTURE(id);
      CAPTURE(s);
      const auto check = testing::check_jacobian(reg(), testing::random_instance(reg(), id, s), 8);
      CAPTURE(check.worst_column);
      CHECK(check.max_relative_error <= 1e-4);
    }
  }
}

TEST_CASE("jacobian at a bound uses one-sided differences") {
  ConceptInstance inst = make("cylinder", {5.0, 0.001});
  const auto check = testing::check_jacobian(reg(), inst, 8);
  CHECK(check.max_relative_error <= 1e-3);
}

TEST_CASE("parameters without geometric effect have zero columns") {
  // the mug has no parameter without effect, but a single-member concept
  // with an ignored parameter does
  TemplateRegistry r = builtin_registry();
  ConceptTemplateDef d;
  d.id = "box_with_label";
  d.params = {{"size", 0.1, 2.0, 1.0, "m", ParamScaling::kUniform}, {"label", 0.0, 1.0, 0.5, "", ParamScaling::kNone}};
  d.members = {{"box", "cuboid", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    return std::vector<MemberInstance>{{"box", "cuboid", {p[0], p[0], p[0]}, {}, Frame{}}};
  };
  r.register_template(std::move(d));
  const auto j = instantiate_with_jacobian(r, default_instance(r, "box_with_label"), 4).jacobian;
  for (std::size_t v = 0; v < j.vertex_count; ++v)
    for (int a = 0; a < 3; ++a) CHECK(j.at(v, a, 1) == 0.0);
}

TEST_CASE("registration rules") {
  TemplateRegistry r = builtin_registry();
  auto two_boxes = [](std::string id) {
    ConceptTemplateDef d;
    d.id = std::move(id);
    d.params = {{"gap", 0.0, 1.0, 0.2, "m", ParamScaling::kNone}};
    d.members = {{"a", "cuboid", ""}, {"b", "cuboid", ""}};
    d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
      const Scalar one(1.0), zero(0.0);
      return std::vector<MemberInstance>{
          {"a", "cuboid", {one, one, one}, {}, Frame{}},
          {"b", "cuboid", {one, one, one}, {}, translation_frame(one + p[0], zero, zero)}};
    };
    return d;
  };
  r.register_template(two_boxes("pair"));
  CHECK(instantiate_concept(r, default_instance(r, "pair"), 4).leaves.size() == 2);

  try {
    r.register_template(two_boxes("pair"));
    FAIL("expected conflict");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConflict);
  }
  try {
    r.register_template(two_boxes("mug"));
    FAIL("expected conflict");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConflict);
  }

  ConceptTemplateDef bad = two_boxes("bad");
  bad.members[1].template_id = "not_registered";
  try {
    r.register_template(bad);
    FAIL("expected not found");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotFound);
  }

  ConceptTemplateDef self = two_boxes("self");
  self.members[1].template_id = "self";
  CHECK_THROWS_AS(r.register_template(self), Error);
}

TEST_CASE("nested expansion two levels deep") {
  TemplateRegistry r = builtin_registry();
  ConceptTemplateDef d;
  d.id = "cabinet";
  d.params = {{"height", 0.2, 2.0, 0.6, "m", ParamScaling::kY}};
  d.members = {{"carcass", "cuboid", ""}, {"drawer", "drawer", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    const Scalar zero(0.0);
    std::vector<Scalar> dp = {Scalar(0.4), Scalar(0.4), Scalar(0.15), Scalar(0.012), Scalar(0.35), Scalar(0.03),
                              Scalar(0.012)};
    return std::vector<MemberInstance>{
        {"carcass", "cuboid", {Scalar(0.5), p[0], Scalar(0.45)}, {}, Frame{}},
        {"drawer", "drawer", dp, {}, translation_frame(zero, p[0] * 0.25, Scalar(0.05))}};
  };
  r.register_template(std::move(d));
  const Expansion e = instantiate_concept(r, default_instance(r, "cabinet"), 8);
  bool found = false;
  for (const auto& l : e.leaves) found = found || l.path == "drawer/handle/bar";
  CHECK(found);
  CHECK(testing::check_jacobian(r, testing::random_instance(r, "cabinet", 5), 6).max_relative_error < 1e-4);
}

TEST_CASE("lenient expansion clamps and reports member violations") {
  TemplateRegistry r = builtin_registry();
  ConceptTemplateDef d;
  d.id = "stretchy";
  d.params = {{"scale", 0.0, 20.0, 1.0, "m", ParamScaling::kNone}};
  d.members = {{"box", "cuboid", ""}};
  d.constraint = [](std::span<const Scalar> p, std::span<const int>) {
    return std::vector<MemberInstance>{{"box", "cuboid", {p[0], Scalar(1.0), Scalar(1.0)}, {}, Frame{}}};
  };
  r.register_template(std::move(d));
  ConceptInstance inst = default_instance(r, "stretchy");
  inst.continuous[0] = 15.0;
  try {
    instantiate_concept(r, inst, 4);
    FAIL("expected out of bounds");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kOutOfBounds);
    CHECK(std::string(e.what()).find("box") != std::string::npos);
  }
  ExpandOptions opt;
  opt.strict = false;
  opt.resolution = 4;
  const Expansion e = expand(r, inst, opt);
  CHECK_FALSE(e.valid());
  CHECK(e.leaves[0].params[0] == 10.0);
}

TEST_CASE("concept member parameters stay in bounds across the parameter box") {
  // corners and random interior points of every built-in concept
  for (const auto& id : reg().concept_ids()) {
    CAPTURE(id);
    const auto& specs = reg().param_specs(id);
    for (std::uint64_t s = 0; s < 40; ++s) {
      ConceptInstance inst = testing::random_instance(reg(), id, 1000 + s);
      if (s < 2) {
        for (std::size_t i = 0; i < specs.size(); ++i) inst.continuous[i] = s == 0 ? specs[i].lower : specs[i].upper;
      }
      CHECK_NOTHROW(instantiate_concept(reg(), inst, 6));
    }
  }
}
