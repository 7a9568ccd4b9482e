#include <doctest.h>

#include <cmath>
#include <numbers>

#include "forge/core/closest_point.hpp"
#include "forge/core/error.hpp"
#include "forge/core/loss.hpp"
#include "forge/core/sampling.hpp"
#include "forge/core/point_index.hpp"
#include "oracles.hpp"

using namespace forge;

namespace {
TriMesh unit_cube() { return make_box({0.5, 0.5, 0.5}); }

RigidTransform some_transform() {
  return {Quaternion::from_axis_angle(normalized(Vec3{1, 2, -0.5}), 0.8), {0.3, -1.2, 2.0}};
}
}  // namespace

TEST_CASE("quaternion rotation about z") {
  const RigidTransform t{Quaternion::from_axis_angle({0, 0, 1}, std::numbers::pi / 2), {0, 0, 0}};
  const Vec3 r = t.apply({1, 0, 0});
  CHECK(std::abs(r.x) < 1e-12);
  CHECK(std::abs(r.y - 1) < 1e-12);
  CHECK(std::abs(r.z) < 1e-12);
}

TEST_CASE("transform inverse and composition") {
  const RigidTransform a = some_transform();
  const RigidTransform b{Quaternion::from_axis_angle({0, 1, 0}, -1.1), {1, 1, 1}};
  const RigidTransform c{Quaternion::exp({0.2, 0.1, -0.3}), {-2, 0, 0.5}};
  const Vec3 p{0.7, -0.2, 0.4};
  const Vec3 back = a.inverse().apply(a.apply(p));
  CHECK(distance(back, p) < 1e-9);
  CHECK(distance(((a * b) * c).apply(p), (a * (b * c)).apply(p)) < 1e-9);
  CHECK(distance((a * b).apply(p), a.apply(b.apply(p))) < 1e-12);
  CHECK(std::abs((a * b).rotation.norm() - 1) < 1e-9);
}

TEST_CASE("quaternion from matrix round trip") {
  for (double angle : {0.0, 0.5, 3.0, std::numbers::pi}) {
    const Quaternion q = Quaternion::from_axis_angle(normalized(Vec3{-1, 0.3, 2}), angle);
    const Quaternion r = Quaternion::from_matrix(q.to_matrix());
    const Vec3 p{0.1, 0.2, 0.3};
    CHECK(distance(q.rotate(p), r.rotate(p)) < 1e-12);
    CHECK(r.w >= 0);
  }
}

TEST_CASE("apply_transform preserves distances") {
  const TriMesh m = unit_cube();
  const TriMesh t = apply_transform(m, some_transform());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    for (std::size_t j = 0; j < m.vertices.size(); ++j) {
      CHECK(std::abs(distance(m.vertices[i], m.vertices[j]) - distance(t.vertices[i], t.vertices[j])) < 1e-9);
    }
  }
  const TriMesh id = apply_transform(m, RigidTransform::identity());
  CHECK(id.vertices == m.vertices);
}

TEST_CASE("mesh validation") {
  TriMesh m = unit_cube();
  CHECK_NOTHROW(m.validate());
  m.faces.push_back({0, 0, 1});
  CHECK_THROWS_AS(m.validate(), Error);
  m.faces.back() = {0, 1, 99};
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK(std::abs(unit_cube().total_area() - 6.0) < 1e-12);
}

TEST_CASE("closest point on the unit cube") {
  const TriMesh cube = unit_cube();
  SurfaceHit h = closest_point_on_mesh({0, 0, 0}, cube);
  CHECK(std::abs(h.distance - 0.5) < 1e-12);
  // ties: the centre is equidistant from all six sides; lowest face wins
  CHECK(h.face_index == 0);

  for (const Vec3& v : cube.vertices) {
    h = closest_point_on_mesh(v, cube);
    CHECK(h.distance == 0.0);
    CHECK(distance(h.point, v) < 1e-15);
  }
  h = closest_point_on_mesh({0.6, 0, 0}, cube);
  CHECK(std::abs(h.distance - 0.1) < 1e-12);
  CHECK(distance(h.point, {0.5, 0, 0}) < 1e-12);
}

TEST_CASE("closest point of an empty mesh is an error") {
  CHECK_THROWS_AS(closest_point_on_mesh({0, 0, 0}, TriMesh{}), Error);
  CHECK_THROWS_AS(MeshIndex(TriMesh{}), Error);
}

TEST_CASE("surface hit invariants") {
  const TriMesh m = testing::random_mesh(3, 50);
  UniformRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p{rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
    const SurfaceHit h = closest_point_on_mesh(p, m);
    const double sum = h.barycentric[0] + h.barycentric[1] + h.barycentric[2];
    CHECK(std::abs(sum - 1) < 1e-9);
    for (double b : h.barycentric) CHECK((b >= 0 && b <= 1));
    CHECK(distance(surface_point(m, h.face_index, h.barycentric), h.point) < 1e-9);
  }
}

TEST_CASE("closest point matches an independent point-triangle reference") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TriMesh m = testing::random_mesh(seed, 40);
    UniformRng rng(seed + 100);
    for (int i = 0; i < 100; ++i) {
      const Vec3 p{rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
      double ref = 1e300;
      for (const Face& f : m.faces) {
        ref = std::min(ref, testing::reference_point_triangle_distance(p, m.vertices[f[0]], m.vertices[f[1]],
                                                                        m.vertices[f[2]]));
      }
      CHECK(std::abs(closest_point_on_mesh(p, m).distance - ref) < 1e-12);
    }
  }
}

TEST_CASE("accelerated closest point equals brute force") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MeshIndex index(testing::random_mesh(seed, 10 * seed));
    UniformRng rng(seed * 7);
    for (int i = 0; i < 100; ++i) {
      const Vec3 p{rng.uniform(-1, 2), rng.uniform(-1, 2), rng.uniform(-1, 2)};
      const SurfaceHit a = index.closest(p);
      const SurfaceHit b = index.closest_brute_force(p);
      CHECK(a.face_index == b.face_index);
      CHECK(std::abs(a.distance - b.distance) <= 1e-12);
    }
  }
}

TEST_CASE("accelerated closest point resolves ties like brute force") {
  const MeshIndex index(unit_cube());
  for (const Vec3& p : {Vec3{0, 0, 0}, Vec3{0.25, 0.25, 0}, Vec3{0.1, 0.1, 0.1}, Vec3{2, 2, 2}}) {
    CHECK(index.closest(p).face_index == index.closest_brute_force(p).face_index);
  }
}

TEST_CASE("surface sampling is area weighted") {
  const TriMesh cube = unit_cube();
  const PointCloud pc = sample_surface(cube, 6000, 7);
  REQUIRE(pc.size() == 6000);
  int counts[6] = {};
  for (auto tag : pc.tags) counts[tag / 2]++;
  for (int c : counts) CHECK(std::abs(c - 1000) <= 50);

  // unequal areas: a 2x1x1 box puts twice as many samples on the long sides
  const PointCloud box = sample_surface(make_box({1.0, 0.5, 0.5}), 10000, 3);
  int long_sides = 0;
  for (auto tag : box.tags) long_sides += tag / 2 >= 2;
  CHECK(std::abs(long_sides / 10000.0 - 0.8) < 0.01);
}

TEST_CASE("surface samples lie on the mesh") {
  const TriMesh m = testing::random_mesh(5, 30);
  const PointCloud pc = sample_surface(m, 500, 1);
  for (const Vec3& p : pc.points) CHECK(closest_point_on_mesh(p, m).distance < 1e-9);
  const PointCloud one = sample_surface(m, 1, 9);
  CHECK(one.size() == 1);
}

TEST_CASE("surface sampling is deterministic") {
  const TriMesh cube = unit_cube();
  const PointCloud a = sample_surface(cube, 100, 42);
  const PointCloud b = sample_surface(cube, 100, 42);
  CHECK(a.points == b.points);
  CHECK(a.tags == b.tags);
  CHECK(sample_surface(cube, 100, 43).points != a.points);
}

TEST_CASE("sampling a zero-area mesh is an error") {
  TriMesh flat;
  flat.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_surface(flat, 10, 1), Error);
  CHECK_THROWS_AS(sample_surface(unit_cube(), 0, 1), Error);
}

TEST_CASE("nearest neighbour index") {
  UniformRng rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) pts.push_back({rng.next(), rng.next(), rng.next()});
  pts.push_back(pts[10]);  // duplicate: lower index must win
  const PointIndex index(pts);
  for (int i = 0; i < 200; ++i) {
    const Vec3 q{rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
    std::uint32_t best = 0;
    for (std::uint32_t j = 1; j < pts.size(); ++j) {
      if (squared_norm(pts[j] - q) < squared_norm(pts[best] - q)) best = j;
    }
    CHECK(index.nearest(q).index == best);
  }
  CHECK(index.nearest(pts[10]).index == 10);
}

TEST_CASE("point2mesh self fit is near zero") {
  const TriMesh cube = unit_cube();
  const PointCloud target = sample_surface(cube, 10000, 5);
  CHECK(point2mesh_loss(target, cube, 10000, 5) < 1e-6);
}

TEST_CASE("point2mesh closed form for one point over a flat mesh") {
  // A large square whose samples collapse onto the projection of the point is
  // emulated with a tiny square directly below it.
  const double d = 0.3;
  TriMesh sq;
  const double e = 1e-6;
  sq.vertices = {{-e, -e, 0}, {e, -e, 0}, {e, e, 0}, {-e, e, 0}};
  sq.faces = {{0, 1, 2}, {0, 2, 3}};
  PointCloud target;
  target.points = {{0, 0, d}};
  CHECK(std::abs(point2mesh_loss(target, sq, 1, 1) - 2 * d * d) < 1e-9);
}

TEST_CASE("point2mesh grows with translation of the target") {
  const TriMesh cube = unit_cube();
  const PointCloud target = sample_surface(cube, 4000, 2);
  double prev = point2mesh_loss(target, cube, 2000, 1);
  for (double t : {0.1, 0.2, 0.4}) {
    const PointCloud moved = apply_transform(target, RigidTransform::from_translation({t, 0, 0}));
    const double loss = point2mesh_loss(moved, cube, 2000, 1);
    CHECK(loss > prev);
    prev = loss;
  }
}

TEST_CASE("point2mesh is invariant under rigid transforms") {
  const TriMesh m = testing::random_mesh(8, 60);
  PointCloud target;
  UniformRng rng(3);
  for (int i = 0; i < 300; ++i) target.points.push_back({rng.next(), rng.next(), rng.next()});
  const RigidTransform t = some_transform();
  const double a = point2mesh_loss(target, m, 500, 4);
  const double b = point2mesh_loss(apply_transform(target, t), apply_transform(m, t), 500, 4);
  CHECK(std::abs(a - b) < 1e-7);
}

TEST_CASE("point2mesh rejects an empty target") {
  CHECK_THROWS_AS(point2mesh_loss(PointCloud{}, unit_cube(), 10, 1), Error);
}

TEST_CASE("point2mesh vertex gradient matches finite differences") {
  TriMesh m = testing::random_mesh(4, 12);
  PointCloud target;
  UniformRng rng(6);
  for (int i = 0; i < 80; ++i) target.points.push_back({rng.next(), rng.next(), rng.next()});
  const Point2MeshObjective obj(target, 64, 2);
  std::vector<Vec3> grad;
  obj.evaluate(m, &grad);
  const double h = 1e-7;
  double worst = 0.0, scale = 1e-12;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    for (int a = 0; a < 3; ++a) {
      TriMesh p = m, q = m;
      p.vertices[v][a] += h;
      q.vertices[v][a] -= h;
      const double fd = (obj.evaluate(p).value - obj.evaluate(q).value) / (2 * h);
      worst = std::max(worst, std::abs(fd - grad[v][a]));
      scale = std::max(scale, std::abs(fd));
    }
  }
  // barycentrics are held fixed, so a generic configuration agrees to first order
  CHECK(worst / scale < 1e-3);
}
