#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace forge {

template <class T>
struct Vec3T {
  T x{}, y{}, z{};

  constexpr Vec3T() = default;
  constexpr Vec3T(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}
  template <class U>
  constexpr explicit Vec3T(const Vec3T<U>& o) : x(T(o.x)), y(T(o.y)), z(T(o.z)) {}

  constexpr T& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr const T& operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3T& operator+=(const Vec3T& o) { x = x + o.x; y = y + o.y; z = z + o.z; return *this; }
  Vec3T& operator-=(const Vec3T& o) { x = x - o.x; y = y - o.y; z = z - o.z; return *this; }

  friend constexpr bool operator==(const Vec3T&, const Vec3T&) = default;
};

using Vec3 = Vec3T<double>;

template <class A, class B>
constexpr auto operator+(const Vec3T<A>& a, const Vec3T<B>& b) {
  return Vec3T<decltype(a.x + b.x)>(a.x + b.x, a.y + b.y, a.z + b.z);
}
template <class A, class B>
constexpr auto operator-(const Vec3T<A>& a, const Vec3T<B>& b) {
  return Vec3T<decltype(a.x - b.x)>(a.x - b.x, a.y - b.y, a.z - b.z);
}
template <class A>
constexpr Vec3T<A> operator-(const Vec3T<A>& a) {
  return Vec3T<A>(-a.x, -a.y, -a.z);
}
template <class A>
constexpr Vec3T<A> operator*(const Vec3T<A>& a, double s) {
  return Vec3T<A>(a.x * s, a.y * s, a.z * s);
}
template <class A>
constexpr Vec3T<A> operator*(double s, const Vec3T<A>& a) {
  return a * s;
}
template <class A>
constexpr Vec3T<A> operator/(const Vec3T<A>& a, double s) {
  return Vec3T<A>(a.x / s, a.y / s, a.z / s);
}

template <class A, class B>
constexpr auto dot(const Vec3T<A>& a, const Vec3T<B>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
template <class A, class B>
constexpr auto cross(const Vec3T<A>& a, const Vec3T<B>& b) {
  using R = decltype(a.y * b.z);
  return Vec3T<R>(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);
}

inline double squared_norm(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }
inline Vec3 cwise_product(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline Vec3 cwise_min(const Vec3& a, const Vec3& b) {
  return {std::fmin(a.x, b.x), std::fmin(a.y, b.y), std::fmin(a.z, b.z)};
}
inline Vec3 cwise_max(const Vec3& a, const Vec3& b) {
  return {std::fmax(a.x, b.x), std::fmax(a.y, b.y), std::fmax(a.z, b.z)};
}
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Row-major 3x3 matrix over an arbitrary scalar.
template <class T>
struct Mat3T {
  std::array<T, 9> m{};

  static Mat3T identity() {
    Mat3T r;
    for (int i = 0; i < 9; ++i) r.m[i] = T(i % 4 == 0 ? 1.0 : 0.0);
    return r;
  }

  T& operator()(int r, int c) { return m[3 * r + c]; }
  const T& operator()(int r, int c) const { return m[3 * r + c]; }

  Mat3T transposed() const {
    Mat3T r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }
};

using Mat3 = Mat3T<double>;

template <class A, class B>
auto operator*(const Mat3T<A>& a, const Mat3T<B>& b) {
  using R = decltype(a.m[0] * b.m[0]);
  Mat3T<R> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}

template <class A, class B>
auto operator*(const Mat3T<A>& a, const Vec3T<B>& v) {
  using R = decltype(a.m[0] * v.x);
  return Vec3T<R>(a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
                  a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
                  a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z);
}

/// Cross-product matrix: skew(a) * b == cross(a, b).
inline Mat3 skew(const Vec3& a) {
  Mat3 r;
  r.m = {0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0};
  return r;
}

}  // namespace forge
