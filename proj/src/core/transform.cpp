#include "forge/core/transform.hpp"

#include <cmath>

namespace forge {

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return {std::cos(h), axis.x * s, axis.y * s, axis.z * s};
}

Quaternion Quaternion::exp(const Vec3& rotation_vector) {
  const double angle = forge::norm(rotation_vector);
  if (angle < 1e-12) {
    // second-order series keeps the map smooth through zero
    return Quaternion{1.0, 0.5 * rotation_vector.x, 0.5 * rotation_vector.y,
                      0.5 * rotation_vector.z}
        .normalized();
  }
  return from_axis_angle(rotation_vector / angle, angle);
}

Quaternion Quaternion::from_matrix(const Mat3& r) {
  // Shepperd's method: pick the largest diagonal term for stability.
  const double trace = r(0, 0) + r(1, 1) + r(2, 2);
  Quaternion q;
  if (trace > 0.0) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
  } else if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
  }
  if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
  return q.normalized();
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Mat3 Quaternion::to_matrix() const {
  Mat3 r;
  const double xx = x * x, yy = y * y, zz = z * z;
  const double xy = x * y, xz = x * z, yz = y * z;
  const double wx = w * x, wy = w * y, wz = w * z;
  r.m = {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
         2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
         2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
  return r;
}

Vec3 Quaternion::rotate(const Vec3& v) const {
  // v' = v + 2 q_v x (q_v x v + w v)
  const Vec3 qv{x, y, z};
  const Vec3 t = cross(qv, v) * 2.0;
  return v + t * w + cross(qv, t);
}

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

RigidTransform RigidTransform::inverse() const {
  const Quaternion inv = rotation.conjugate();
  return {inv, -inv.rotate(translation)};
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return {(a.rotation * b.rotation).normalized(), a.rotation.rotate(b.translation) + a.translation};
}

}  // namespace forge
