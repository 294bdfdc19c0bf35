#pragma once

#include <cmath>
#include <numbers>

namespace drumshape {

/// Point or vector in the plane.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(const Vec2& v) { return v / norm2(v); }

/// Counterclockwise quarter turn.
constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(const Vec2& v) { return std::atan2(v.y, v.x); }

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a -= two_pi;
  return a;
}

/// Smallest absolute difference between two angles, in [0, pi].
inline double angle_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return d > std::numbers::pi ? 2.0 * std::numbers::pi - d : d;
}

}  // namespace drumshape
