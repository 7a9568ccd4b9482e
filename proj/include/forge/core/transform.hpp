#pragma once

#include "forge/core/vec.hpp"

namespace forge {

/// Unit quaternion (w, x, y, z).
struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static Quaternion identity() { return {}; }
  /// Rotation of `angle` radians about a unit `axis`.
  static Quaternion from_axis_angle(const Vec3& axis, double angle);
  /// Exponential map of a rotation vector (axis * angle).
  static Quaternion exp(const Vec3& rotation_vector);
  static Quaternion from_matrix(const Mat3& r);

  double norm() const;
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Mat3 to_matrix() const;
  Vec3 rotate(const Vec3& v) const;

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b);
  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// p -> R p + t.
struct RigidTransform {
  Quaternion rotation;
  Vec3 translation;

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t) { return {Quaternion{}, t}; }
  static RigidTransform from_matrix(const Mat3& r, const Vec3& t) {
    return {Quaternion::from_matrix(r), t};
  }

  Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }
  Vec3 apply_vector(const Vec3& v) const { return rotation.rotate(v); }
  RigidTransform inverse() const;
  Mat3 rotation_matrix() const { return rotation.to_matrix(); }

  /// (a * b).apply(p) == a.apply(b.apply(p))
  friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);
  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;
};

}  // namespace forge
