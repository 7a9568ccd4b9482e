#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "forge/core/sampling.hpp"

namespace forge::testing {

TriMesh random_mesh(std::uint64_t seed, std::size_t faces) {
  UniformRng rng(seed);
  TriMesh m;
  auto point = [&] { return Vec3{rng.next(), rng.next(), rng.next()}; };
  for (std::size_t f = 0; f < faces; ++f) {
    const auto n = static_cast<std::uint32_t>(m.vertices.size());
    if (n >= 3 && rng.next() < 0.5) {
      // reuse an existing edge
      const auto i = static_cast<std::uint32_t>(rng.next() * (n - 1));
      m.vertices.push_back(point());
      m.faces.push_back({i, i + 1, n});
    } else {
      m.vertices.push_back(point());
      m.vertices.push_back(point());
      Vec3 c = point();
      if (rng.next() < 0.05) c = m.vertices[n] + (m.vertices[n + 1] - m.vertices[n]) * 0.5;  // sliver
      m.vertices.push_back(c);
      m.faces.push_back({n, n + 1, n + 2});
    }
  }
  return m;
}

namespace {
double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}
}  // namespace

double reference_point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  double best = std::min({segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
  const Vec3 n = cross(b - a, c - a);
  const double n2 = dot(n, n);
  if (n2 > 1e-300) {
    const Vec3 q = p - n * (dot(p - a, n) / n2);
    // inside test by signed sub-areas
    const double s0 = dot(cross(b - a, q - a), n);
    const double s1 = dot(cross(c - b, q - b), n);
    const double s2 = dot(cross(a - c, q - c), n);
    if (s0 >= 0 && s1 >= 0 && s2 >= 0) best = std::min(best, norm(p - q));
  }
  return best;
}

ConceptInstance random_instance(const TemplateRegistry& registry, const std::string& id, std::uint64_t seed) {
  UniformRng rng(seed);
  ConceptInstance inst = default_instance(registry, id);
  const auto& specs = registry.param_specs(id);
  for (std::size_t i = 0; i < specs.size(); ++i) inst.continuous[i] = rng.uniform(specs[i].lower, specs[i].upper);
  const auto& dspecs = registry.discrete_specs(id);
  for (std::size_t i = 0; i < dspecs.size(); ++i) {
    inst.discrete[i] = dspecs[i].min + static_cast<int>(rng.next() * (dspecs[i].max - dspecs[i].min + 1));
  }
  const Vec3 axis = normalized(Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  inst.pose.rotation = Quaternion::from_axis_angle(axis, rng.uniform(-3.0, 3.0));
  inst.pose.translation = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return inst;
}

JacobianCheck check_jacobian(const TemplateRegistry& registry, const ConceptInstance& instance, int resolution,
                             double rel_step) {
  const auto analytic = instantiate_with_jacobian(registry, instance, resolution);
  const auto& J = analytic.jacobian;
  const auto& specs = registry.param_specs(instance.template_id);
  const std::size_t n = specs.size();
  const std::size_t nv = analytic.expansion.merged.vertices.size();

  auto vertices_at = [&](const ConceptInstance& inst) { return instantiate_concept(registry, inst, resolution).merged.vertices; };

  JacobianCheck out;
  for (std::size_t k = 0; k < n + 6; ++k) {
    std::vector<Vec3> plus, minus;
    double denom = 0.0;
    if (k < n) {
      const double h = rel_step * specs[k].span();
      const double x = instance.continuous[k];
      const double hi = std::min(x + h, specs[k].upper);
      const double lo = std::max(x - h, specs[k].lower);
      ConceptInstance a = instance, b = instance;
      a.continuous[k] = hi;
      b.continuous[k] = lo;
      plus = vertices_at(a);
      minus = vertices_at(b);
      denom = hi - lo;
    } else {
      const double h = rel_step;
      Vec3 dt{0, 0, 0}, dw{0, 0, 0};
      const std::size_t c = k - n;
      if (c < 3) dt[c] = h; else dw[c - 3] = h;
      ConceptInstance a = instance, b = instance;
      a.pose = perturb_pose(instance.pose, dt, dw);
      b.pose = perturb_pose(instance.pose, dt * -1.0, dw * -1.0);
      plus = vertices_at(a);
      minus = vertices_at(b);
      denom = 2 * h;
    }
    double max_abs = 1.0, max_err = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      for (int axis = 0; axis < 3; ++axis) {
        const double fd = (plus[v][axis] - minus[v][axis]) / denom;
        const double an = J.at(v, axis, k);
        max_abs = std::max({max_abs, std::abs(fd), std::abs(an)});
        max_err = std::max(max_err, std::abs(fd - an));
      }
    }
    const double rel = max_err / max_abs;
    if (rel > out.max_relative_error) {
      out.max_relative_error = rel;
      out.worst_column = k;
    }
  }
  return out;
}

}  // namespace forge::testing

namespace forge::testing {
namespace {

ConceptPart part(const TemplateRegistry& reg, std::string name, const std::string& id,
                 std::vector<ConceptPart> children = {}) {
  return {std::move(name), default_instance(reg, id), std::move(children)};
}

ConceptPart legged(const TemplateRegistry& reg, int legs) {
  ConceptPart p = part(reg, "base", "legged_base");
  p.instance.discrete = {legs};
  p.instance.pose.translation = {0.1 * legs, 0, 0};
  return p;
}

Conceptualization doc(std::string id, Category cat, std::vector<ConceptPart> parts) {
  Conceptualization c;
  c.object_id = id;
  c.source_mesh = "meshes/" + id + ".obj";
  c.category = std::move(cat);
  c.parts = std::move(parts);
  return c;
}

}  // namespace

TaggedCloud sample_leaves(const TemplateRegistry& reg, const Conceptualization& c, int res,
                          std::size_t per_unit_area, std::uint64_t seed) {
  TaggedCloud out;
  for (const auto& part : flatten(reg, c, res)) {
    for (const auto& leaf : part.expansion.leaves) {
      const auto n = static_cast<std::size_t>(leaf.mesh.total_area() * static_cast<double>(per_unit_area)) + 1;
      for (const Vec3& p : sample_surface(leaf.mesh, n, seed++).points) {
        out.cloud.points.push_back(p);
        out.origin.push_back(leaf.path);
      }
    }
  }
  return out;
}

// Per document: I = leaf instances, P = sum over part nodes of
// (continuous + discrete + 7).
//   cylinder I1 P9, torus_arc I1 P10, cuboid I1 P10, sphere I1 P11,
//   mug I2 P11, legged_base(k) I(1+k) P13, kitchen_pot I9 P15.
std::vector<CorpusDocument> stats_corpus(const TemplateRegistry& reg) {
  const Category mug{"Mug", "Mug"}, tab{"Tab", "Table"}, ktp{"Ktp", "KitchenPot"}, bot{"Bot", "Bottle"};
  std::vector<CorpusDocument> out;
  // Mug: I {2, 3, 2, 2}, P {11, 20, 19, 11}
  out.push_back({"mug_a.json", doc("mug_a", mug, {part(reg, "mug", "mug")})});
  out.push_back({"mug_b.json", doc("mug_b", mug, {part(reg, "mug", "mug", {part(reg, "coaster", "cylinder")})})});
  out.push_back({"mug_c.json", doc("mug_c", mug, {part(reg, "body", "cylinder"), part(reg, "handle", "torus_arc")})});
  out.push_back({"nested/mug_d.json", doc("mug_d", mug, {part(reg, "mug", "mug")})});
  // Tab: I {4, 6, 9}, P {13, 23, 33}
  out.push_back({"tab_a.json", doc("tab_a", tab, {legged(reg, 3)})});
  out.push_back({"tab_b.json", doc("tab_b", tab, {legged(reg, 4), part(reg, "top_pad", "cuboid")})});
  out.push_back({"tab_c.json", doc("tab_c", tab, {legged(reg, 6), part(reg, "shelf", "cuboid", {part(reg, "rail", "cuboid")})})});
  // Ktp: I {9, 10}, P {15, 26}
  out.push_back({"ktp_a.json", doc("ktp_a", ktp, {part(reg, "pot", "kitchen_pot")})});
  out.push_back({"ktp_b.json", doc("ktp_b", ktp, {part(reg, "pot", "kitchen_pot"), part(reg, "steam", "sphere")})});
  // Bot: I {1}, P {11}
  out.push_back({"bot_a.json", doc("bot_a", bot, {part(reg, "body", "sphere")})});
  return out;
}

io::AssetStats expected_corpus_stats() {
  io::AssetStats s;
  // sorted by code; lower medians: Mug P sorted {11, 11, 19, 20} -> 11, Ktp I {9, 10} -> 9
  s.categories = {
      {"Bot", "Bottle", 1, 1, 1, 1, 11, 11, 11},
      {"Ktp", "KitchenPot", 2, 19, 9, 10, 41, 15, 26},
      {"Mug", "Mug", 4, 9, 2, 3, 61, 11, 20},
      {"Tab", "Table", 3, 19, 6, 9, 69, 23, 33},
  };
  s.n = 10;
  s.i_ttl = 48;
  s.p_ttl = 182;
  return s;
}

}  // namespace forge::testing
