#pragma once

// Forward-mode dual numbers with a fixed-size derivative vector.
//
// Jet<N> carries a value and the partials with respect to N seeded inputs.
// Templated geometry code is written once and instantiated for double (plain
// evaluation) and for Jet<N> (evaluation plus exact first derivatives).

#include <array>
#include <cmath>

namespace forge::ad {

template <int N>
struct Jet {
  double a = 0.0;
  std::array<double, N> v{};

  constexpr Jet() = default;
  constexpr Jet(double value) : a(value) {}  // NOLINT: constants promote implicitly
  Jet(double value, int seed) : a(value) { v[seed] = 1.0; }

  static constexpr int kSize = N;

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }
};

template <int N>
Jet<N> operator+(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r(x.a + y.a);
  for (int i = 0; i < N; ++i) r.v[i] = x.v[i] + y.v[i];
  return r;
}
template <int N>
Jet<N> operator-(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r(x.a - y.a);
  for (int i = 0; i < N; ++i) r.v[i] = x.v[i] - y.v[i];
  return r;
}
template <int N>
Jet<N> operator-(const Jet<N>& x) {
  Jet<N> r(-x.a);
  for (int i = 0; i < N; ++i) r.v[i] = -x.v[i];
  return r;
}
template <int N>
Jet<N> operator*(const Jet<N>& x, const Jet<N>& y) {
  Jet<N> r(x.a * y.a);
  for (int i = 0; i < N; ++i) r.v[i] = x.a * y.v[i] + x.v[i] * y.a;
  return r;
}
template <int N>
Jet<N> operator/(const Jet<N>& x, const Jet<N>& y) {
  const double inv = 1.0 / y.a;
  const double q = x.a * inv;
  Jet<N> r(q);
  for (int i = 0; i < N; ++i) r.v[i] = (x.v[i] - q * y.v[i]) * inv;
  return r;
}

template <int N>
Jet<N> operator+(const Jet<N>& x, double s) {
  Jet<N> r = x;
  r.a += s;
  return r;
}
template <int N>
Jet<N> operator+(double s, const Jet<N>& x) { return x + s; }
template <int N>
Jet<N> operator-(const Jet<N>& x, double s) { return x + (-s); }
template <int N>
Jet<N> operator-(double s, const Jet<N>& x) {
  Jet<N> r = -x;
  r.a += s;
  return r;
}
template <int N>
Jet<N> operator*(const Jet<N>& x, double s) {
  Jet<N> r(x.a * s);
  for (int i = 0; i < N; ++i) r.v[i] = x.v[i] * s;
  return r;
}
template <int N>
Jet<N> operator*(double s, const Jet<N>& x) { return x * s; }
template <int N>
Jet<N> operator/(const Jet<N>& x, double s) { return x * (1.0 / s); }
template <int N>
Jet<N> operator/(double s, const Jet<N>& x) { return Jet<N>(s) / x; }

template <int N>
bool operator<(const Jet<N>& x, const Jet<N>& y) { return x.a < y.a; }
template <int N>
bool operator>(const Jet<N>& x, const Jet<N>& y) { return x.a > y.a; }
template <int N>
bool operator<(const Jet<N>& x, double y) { return x.a < y; }
template <int N>
bool operator>(const Jet<N>& x, double y) { return x.a > y; }

namespace detail {
template <int N>
Jet<N> chain(const Jet<N>& x, double value, double derivative) {
  Jet<N> r(value);
  for (int i = 0; i < N; ++i) r.v[i] = derivative * x.v[i];
  return r;
}
}  // namespace detail

template <int N>
Jet<N> sqrt(const Jet<N>& x) {
  const double s = std::sqrt(x.a);
  return detail::chain(x, s, 0.5 / s);
}
template <int N>
Jet<N> sin(const Jet<N>& x) { return detail::chain(x, std::sin(x.a), std::cos(x.a)); }
template <int N>
Jet<N> cos(const Jet<N>& x) { return detail::chain(x, std::cos(x.a), -std::sin(x.a)); }
template <int N>
Jet<N> exp(const Jet<N>& x) {
  const double e = std::exp(x.a);
  return detail::chain(x, e, e);
}
template <int N>
Jet<N> atan2(const Jet<N>& y, const Jet<N>& x) {
  const double d = x.a * x.a + y.a * y.a;
  Jet<N> r(std::atan2(y.a, x.a));
  for (int i = 0; i < N; ++i) r.v[i] = (x.a * y.v[i] - y.a * x.v[i]) / d;
  return r;
}

// Rectifier: derivative taken as 0 at the kink.
template <int N>
Jet<N> relu(const Jet<N>& x) { return x.a > 0.0 ? x : Jet<N>(0.0); }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// Clamp to [lo, hi]; derivative vanishes when clamped.
template <int N>
Jet<N> clamp(const Jet<N>& x, double lo, double hi) {
  if (x.a < lo) return Jet<N>(lo);
  if (x.a > hi) return Jet<N>(hi);
  return x;
}
inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

template <int N>
double value(const Jet<N>& x) { return x.a; }
inline double value(double x) { return x; }

}  // namespace forge::ad
