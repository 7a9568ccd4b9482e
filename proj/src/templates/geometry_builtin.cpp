// The ten built-in geometry templates. Every default instance is centered on
// the origin with y up; each vertex map deforms that default instance and
// reproduces it exactly at default parameters.

#include <cmath>
#include <numbers>

#include "forge/core/error.hpp"
#include "forge/templates/registry.hpp"

namespace forge {
namespace {

constexpr double kPi = std::numbers::pi;

struct ProfilePoint {
  double radius;
  double y;
};

// Surface of revolution about the y axis. Consecutive profile points are
// joined by bands; zero-radius points collapse to a single axis vertex.
// `closed_loop` joins the last profile point back to the first.
TriMesh make_lathe(const std::vector<ProfilePoint>& profile, int segments, bool cap_first,
                   bool cap_last, bool closed_loop = false) {
  TriMesh m;
  std::vector<std::vector<std::uint32_t>> rings;
  for (const ProfilePoint& p : profile) {
    std::vector<std::uint32_t> ring;
    if (p.radius == 0.0) {
      ring.assign(segments, static_cast<std::uint32_t>(m.vertices.size()));
      m.vertices.push_back({0.0, p.y, 0.0});
    } else {
      for (int k = 0; k < segments; ++k) {
        const double a = 2.0 * kPi * k / segments;
        ring.push_back(static_cast<std::uint32_t>(m.vertices.size()));
        m.vertices.push_back({p.radius * std::cos(a), p.y, p.radius * std::sin(a)});
      }
    }
    rings.push_back(std::move(ring));
  }
  auto add = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (a != b && b != c && a != c) m.faces.push_back({a, b, c});
  };
  const std::size_t bands = closed_loop ? rings.size() : rings.size() - 1;
  for (std::size_t i = 0; i < bands; ++i) {
    const auto& lo = rings[i];
    const auto& hi = rings[(i + 1) % rings.size()];
    for (int k = 0; k < segments; ++k) {
      const int k1 = (k + 1) % segments;
      add(lo[k], hi[k], hi[k1]);
      add(lo[k], hi[k1], lo[k1]);
    }
  }
  auto cap = [&](const std::vector<std::uint32_t>& ring, double y, bool up) {
    const auto c = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back({0.0, y, 0.0});
    for (int k = 0; k < segments; ++k) {
      const int k1 = (k + 1) % segments;
      if (up) {
        add(c, ring[k1], ring[k]);
      } else {
        add(c, ring[k], ring[k1]);
      }
    }
  };
  if (cap_first) cap(rings.front(), profile.front().y, false);
  if (cap_last) cap(rings.back(), profile.back().y, true);
  return m;
}

TriMesh make_wedge() {
  TriMesh m;
  const double xs[3] = {-0.5, 0.5, 0.0};
  const double ys[3] = {-0.5, -0.5, 0.5};
  for (double z : {-0.5, 0.5}) {
    for (int i = 0; i < 3; ++i) m.vertices.push_back({xs[i], ys[i], z});
  }
  // 0..2 back face, 3..5 front face
  m.faces = {{3, 4, 5}, {0, 2, 1}, {0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}, {2, 0, 3}, {2, 3, 5}};
  return m;
}

constexpr double kTorusMajor = 0.5;
constexpr double kTorusMinor = 0.1;
constexpr double kTorusArc = kPi;

TriMesh make_torus_arc(int resolution) {
  const int n = resolution;
  const int sides = std::max(6, resolution / 2);
  TriMesh m;
  for (int i = 0; i <= n; ++i) {
    const double a = -0.5 * kTorusArc + kTorusArc * i / n;
    const Vec3 e{std::cos(a), std::sin(a), 0.0};
    for (int j = 0; j < sides; ++j) {
      const double b = 2.0 * kPi * j / sides;
      m.vertices.push_back(e * (kTorusMajor + kTorusMinor * std::cos(b)) +
                           Vec3{0.0, 0.0, kTorusMinor * std::sin(b)});
    }
  }
  auto idx = [&](int i, int j) { return static_cast<std::uint32_t>(i * sides + (j % sides)); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < sides; ++j) {
      m.faces.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      m.faces.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
  for (int end = 0; end < 2; ++end) {
    const int i = end == 0 ? 0 : n;
    const double a = -0.5 * kTorusArc + kTorusArc * i / n;
    const auto c = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back({kTorusMajor * std::cos(a), kTorusMajor * std::sin(a), 0.0});
    for (int j = 0; j < sides; ++j) {
      if (end == 0) {
        m.faces.push_back({c, idx(i, j + 1), idx(i, j)});
      } else {
        m.faces.push_back({c, idx(i, j), idx(i, j + 1)});
      }
    }
  }
  return m;
}

ParamSpec length(std::string name, double lo, double hi, double def, ParamScaling s) {
  return {std::move(name), lo, hi, def, "m", s};
}

// --- vertex maps ------------------------------------------------------------

struct CuboidMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    return {p[0] * r.x, p[1] * r.y, p[2] * r.z};
  }
};

// size_x, size_y, size_z, top_offset_x, top_offset_z, top_scale_x, top_scale_z
struct QuadPrismMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    if (r.y > 0.0) return {p[0] * r.x * p[5] + p[3], p[1] * r.y, p[2] * r.z * p[6] + p[4]};
    return {p[0] * r.x, p[1] * r.y, p[2] * r.z};
  }
};

// size_x, size_y, size_z, apex_offset (fraction of size_x)
struct WedgeMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    if (r.y > 0.0) return {p[0] * (r.x + p[3]), p[1] * r.y, p[2] * r.z};
    return {p[0] * r.x, p[1] * r.y, p[2] * r.z};
  }
};

// radius, height; default radius 0.5
struct CylinderMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    const T s = p[0] * 2.0;
    return {s * r.x, p[1] * r.y, s * r.z};
  }
};

// bottom_radius, top_radius, height; defaults 0.5, 0.25, 1
struct FrustumMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    const T s = r.y > 0.0 ? p[1] * 4.0 : p[0] * 2.0;
    return {s * r.x, p[2] * r.y, s * r.z};
  }
};

// radius_x, radius_y, radius_z, cut: rest y below `cut` is clipped onto the
// plane y = cut (a rectifier on y - cut) before scaling.
struct SphereMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    using ad::relu;
    const T y = p[3] + relu(r.y - p[3]);
    return {p[0] * r.x, p[1] * y, p[2] * r.z};
  }
};

// radius_x, height, radius_z
struct HemisphereMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    return {p[0] * r.x, p[1] * r.y, p[2] * r.z};
  }
};

// major_radius, minor_radius, arc_angle. The rest vertex is decomposed into
// its angle along the arc and its offset within the tube cross-section.
struct TorusArcMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    using std::cos;
    using std::sin;
    const double angle = std::atan2(r.y, r.x);
    const double rho = std::hypot(r.x, r.y) - kTorusMajor;
    const T a = p[2] * (angle / kTorusArc);
    const T s = p[1] * (1.0 / kTorusMinor);
    const T radial = p[0] + s * rho;
    return {radial * cos(a), radial * sin(a), s * r.z};
  }
};

// outer_radius, inner_ratio, height; rest outer radius 0.5, inner 0.4
struct TubeMap {
  template <class T>
  Vec3T<T> operator()(const Vec3& r, std::span<const T> p) const {
    const bool outer = std::hypot(r.x, r.z) > 0.45;
    const T s = outer ? p[0] * 2.0 : p[0] * p[1] * 2.5;
    return {s * r.x, p[2] * r.y, s * r.z};
  }
};

constexpr int kPrismSides = 6;

}  // namespace

void add_builtin_geometry(TemplateRegistry& registry) {
  using S = ParamScaling;
  {
    GeometryTemplateDef d;
    d.id = "cuboid";
    d.tags = {"primitive", "box"};
    d.params = {length("size_x", 0.001, 10.0, 1.0, S::kX), length("size_y", 0.001, 10.0, 1.0, S::kY),
                length("size_z", 0.001, 10.0, 1.0, S::kZ)};
    d.default_instance = [](int) { return make_box({0.5, 0.5, 0.5}); };
    set_vertex_map(d, CuboidMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "quad_prism";
    d.tags = {"primitive", "prism"};
    d.params = {length("size_x", 0.001, 10.0, 1.0, S::kX),
                length("size_y", 0.001, 10.0, 1.0, S::kY),
                length("size_z", 0.001, 10.0, 1.0, S::kZ),
                length("top_offset_x", -5.0, 5.0, 0.0, S::kNone),
                length("top_offset_z", -5.0, 5.0, 0.0, S::kNone),
                {"top_scale_x", 0.01, 10.0, 1.0, "ratio", S::kNone},
                {"top_scale_z", 0.01, 10.0, 1.0, "ratio", S::kNone}};
    d.default_instance = [](int) { return make_box({0.5, 0.5, 0.5}); };
    set_vertex_map(d, QuadPrismMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "wedge";
    d.tags = {"primitive", "prism"};
    d.params = {length("size_x", 0.001, 10.0, 1.0, S::kX), length("size_y", 0.001, 10.0, 1.0, S::kY),
                length("size_z", 0.001, 10.0, 1.0, S::kZ),
                {"apex_offset", -0.5, 0.5, 0.0, "ratio", S::kNone}};
    d.default_instance = [](int) { return make_wedge(); };
    set_vertex_map(d, WedgeMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "cylinder";
    d.tags = {"primitive", "round"};
    d.params = {length("radius", 0.001, 5.0, 0.5, S::kRadialXZ), length("height", 0.001, 10.0, 1.0, S::kY)};
    d.default_instance = [](int res) { return make_lathe({{0.5, -0.5}, {0.5, 0.5}}, res, true, true); };
    set_vertex_map(d, CylinderMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "frustum";
    d.tags = {"primitive", "round"};
    d.params = {length("bottom_radius", 0.001, 5.0, 0.5, S::kRadialXZ),
                length("top_radius", 0.001, 5.0, 0.25, S::kRadialXZ),
                length("height", 0.001, 10.0, 1.0, S::kY)};
    d.default_instance = [](int res) { return make_lathe({{0.5, -0.5}, {0.25, 0.5}}, res, true, true); };
    set_vertex_map(d, FrustumMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "sphere";
    d.tags = {"primitive", "round"};
    d.params = {length("radius_x", 0.001, 5.0, 1.0, S::kX), length("radius_y", 0.001, 5.0, 1.0, S::kY),
                length("radius_z", 0.001, 5.0, 1.0, S::kZ),
                {"cut", -1.0, 0.0, -1.0, "ratio", S::kNone}};
    d.default_instance = [](int res) {
      const int rings = std::max(2, res / 2);
      std::vector<ProfilePoint> profile;
      for (int i = 0; i <= rings; ++i) {
        const double t = kPi * i / rings;
        profile.push_back({i == 0 || i == rings ? 0.0 : std::sin(t), -std::cos(t)});
      }
      return make_lathe(profile, res, false, false);
    };
    set_vertex_map(d, SphereMap{});
    d.truncates = [](std::span<const double> p) { return p[3] > -1.0; };
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "hemisphere";
    d.tags = {"primitive", "round"};
    d.params = {length("radius_x", 0.001, 5.0, 1.0, S::kX), length("height", 0.001, 5.0, 1.0, S::kY),
                length("radius_z", 0.001, 5.0, 1.0, S::kZ)};
    d.default_instance = [](int res) {
      const int rings = std::max(2, res / 4);
      std::vector<ProfilePoint> profile;
      for (int i = 0; i <= rings; ++i) {
        const double t = 0.5 * kPi * i / rings;
        profile.push_back({i == rings ? 0.0 : std::cos(t), std::sin(t)});
      }
      return make_lathe(profile, res, true, false);
    };
    set_vertex_map(d, HemisphereMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "torus_arc";
    d.tags = {"primitive", "round", "handle"};
    d.params = {length("major_radius", 0.01, 5.0, kTorusMajor, S::kUniform),
                length("minor_radius", 0.001, 2.0, kTorusMinor, S::kNone),
                {"arc_angle", 0.1, 1.95 * kPi, kTorusArc, "rad", S::kNone}};
    d.default_instance = [](int res) { return make_torus_arc(res); };
    set_vertex_map(d, TorusArcMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "tube";
    d.tags = {"primitive", "round", "hollow"};
    d.params = {length("outer_radius", 0.001, 5.0, 0.5, S::kRadialXZ),
                {"inner_ratio", 0.05, 0.98, 0.8, "ratio", S::kNone},
                length("height", 0.001, 10.0, 1.0, S::kY)};
    d.default_instance = [](int res) {
      return make_lathe({{0.5, -0.5}, {0.5, 0.5}, {0.4, 0.5}, {0.4, -0.5}}, res, false, false, true);
    };
    set_vertex_map(d, TubeMap{});
    registry.add_geometry(std::move(d));
  }
  {
    GeometryTemplateDef d;
    d.id = "ngon_prism";
    d.tags = {"primitive", "prism"};
    d.params = {length("radius", 0.001, 5.0, 0.5, S::kRadialXZ), length("height", 0.001, 10.0, 1.0, S::kY)};
    d.default_instance = [](int) {
      return make_lathe({{0.5, -0.5}, {0.5, 0.5}}, kPrismSides, true, true);
    };
    set_vertex_map(d, CylinderMap{});
    registry.add_geometry(std::move(d));
  }
}

}  // namespace forge
