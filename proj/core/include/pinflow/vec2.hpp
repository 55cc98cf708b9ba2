#pragma once

/// @file vec2.hpp
/// @brief Planar vectors and the mixed-flow rotation algebra

#include <cmath>

namespace pinflow {

/// Plain 2-vector in the plane
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }

/// Counterclockwise quarter turn J(x1, x2) = (-x2, x1); also written v^perp
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// (alpha I - beta J) G, the inverse of (alpha I + beta J) when alpha^2 + beta^2 = 1
constexpr Vec2 mixedflow_apply(double alpha, double beta, const Vec2& g) {
    return {alpha * g.x + beta * g.y, alpha * g.y - beta * g.x};
}

/// (alpha I + beta J) G
constexpr Vec2 mixedflow_apply_inverse(double alpha, double beta, const Vec2& g) {
    return {alpha * g.x - beta * g.y, alpha * g.y + beta * g.x};
}

} // namespace pinflow
