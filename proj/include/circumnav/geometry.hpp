#pragma once

#include <cmath>
#include <numbers>

#include "circumnav/errors.hpp"

namespace circumnav {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Singularity guard for bearings and angles, in world units. Below this a
// direction is considered undefined and an error is raised instead of
// clamping, so violated assumptions surface in tests.
inline constexpr double eps_min = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    // z-component of the 3D cross product; positive when o is ccw of *this.
    constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

// An angle normalized to [0, 2pi).
class Angle {
public:
    Angle() = default;
    explicit Angle(double radians) : value_(normalize(radians)) {}
    double radians() const { return value_; }

    static double normalize(double radians) {
        double r = std::fmod(radians, two_pi);
        if (r < 0.0) r += two_pi;
        return r;
    }

private:
    double value_ = 0.0;
};

// The rotation operator E: E*v = (v.y, -v.x). Maps the inward bearing to the
// counterclockwise tangent direction.
constexpr Vec2 rot90(Vec2 v) { return {v.y, -v.x}; }

// Counterclockwise angle from v1 to v2 in [0, 2pi), via the half-angle atan2
// form 2*atan2(|v1 x v2|, |v1||v2| + v1.v2), which is well conditioned near 0
// and pi. The sign of the cross product selects the ccw branch.
inline Angle ccw_angle(Vec2 v1, Vec2 v2) {
    const double n1 = v1.norm();
    const double n2 = v2.norm();
    if (n1 < eps_min || n2 < eps_min) {
        throw ZeroVector("ccw_angle: input vector below singularity guard");
    }
    const double cross = v1.cross(v2);
    const double dot = v1.dot(v2);
    const double denom = n1 * n2 + dot;
    double unsigned_angle;
    if (denom <= 0.0 && std::abs(cross) < eps_min * n1 * n2) {
        unsigned_angle = std::numbers::pi;  // exactly antiparallel
    } else {
        unsigned_angle = 2.0 * std::atan2(std::abs(cross), denom);
    }
    if (cross >= 0.0) {
        return Angle(unsigned_angle == two_pi ? 0.0 : unsigned_angle);
    }
    return Angle(two_pi - unsigned_angle);
}

struct Distances {
    double to_centre = 0.0;   // D^c = ||c - p||
    double to_boundary = 0.0; // D^b = |r - D^c|
};

inline Distances distances(Vec2 c, double r, Vec2 p) {
    const double dc = (c - p).norm();
    return {dc, std::abs(r - dc)};
}

// Unit vector from p toward the estimated centre.
inline Vec2 bearing(Vec2 c_hat, Vec2 p) {
    const Vec2 d = c_hat - p;
    const double n = d.norm();
    if (n < eps_min) {
        throw SingularBearing("bearing: agent at estimated centre");
    }
    return d / n;
}

}  // namespace circumnav
