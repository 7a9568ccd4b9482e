#pragma once

#include <string>
#include <vector>

#include "forge/core/jet.hpp"
#include "forge/core/vec.hpp"

namespace forge {

// Derivative capacity for concept-level propagation: every continuous
// parameter of the root instance plus its six pose degrees of freedom.
inline constexpr int kMaxDerivatives = 48;
// Geometry templates take at most this many continuous parameters.
inline constexpr int kMaxGeometryParams = 8;

using Scalar = ad::Jet<kMaxDerivatives>;
using GeoJet = ad::Jet<kMaxGeometryParams>;

/// How a length-like parameter follows the extent of a target when a fit is
/// initialized from a bounding box.
enum class ParamScaling { kNone, kX, kY, kZ, kRadialXZ, kUniform };

struct ParamSpec {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  double default_value = 0.0;
  std::string unit;
  ParamScaling scaling = ParamScaling::kNone;

  double span() const { return upper - lower; }
  bool contains(double v) const { return v >= lower && v <= upper; }
};

struct DiscreteParamSpec {
  std::string name;
  int min = 0;
  int max = 0;
  int default_value = 0;
};

/// Throws Error(kInvalidArgument) when bounds or defaults are inconsistent.
void validate_spec(const ParamSpec& spec);
void validate_spec(const DiscreteParamSpec& spec);

/// Local-to-parent frame with differentiable entries.
template <class T>
struct FrameT {
  Mat3T<T> rotation = Mat3T<T>::identity();
  Vec3T<T> translation{T(0.0), T(0.0), T(0.0)};

  Vec3T<T> apply(const Vec3T<T>& p) const { return rotation * p + translation; }
};

using Frame = FrameT<Scalar>;

template <class T>
FrameT<T> compose(const FrameT<T>& parent, const FrameT<T>& child) {
  return {parent.rotation * child.rotation, parent.rotation * child.translation + parent.translation};
}

inline Frame translation_frame(const Scalar& x, const Scalar& y, const Scalar& z) {
  Frame f;
  f.translation = {x, y, z};
  return f;
}

/// Rotation about a principal axis (0 = x, 1 = y, 2 = z).
inline Frame axis_rotation_frame(int axis, const Scalar& angle) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(angle), s = sin(angle);
  Frame f;
  auto& r = f.rotation;
  if (axis == 0) {
    r(1, 1) = c; r(1, 2) = -s;
    r(2, 1) = s; r(2, 2) = c;
  } else if (axis == 1) {
    r(0, 0) = c; r(0, 2) = s;
    r(2, 0) = -s; r(2, 2) = c;
  } else {
    r(0, 0) = c; r(0, 1) = -s;
    r(1, 0) = s; r(1, 1) = c;
  }
  return f;
}

inline Frame place(const Scalar& x, const Scalar& y, const Scalar& z, int axis, const Scalar& angle) {
  Frame f = axis_rotation_frame(axis, angle);
  f.translation = {x, y, z};
  return f;
}

}  // namespace forge
