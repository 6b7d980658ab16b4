#pragma once

#include <cmath>

namespace cornerfem {

struct Vec2 {
	double x = 0.0;
	double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 midpoint(Vec2 a, Vec2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// rotate by -90 degrees; for a ccw-oriented boundary edge a->b this turns
// the tangent into the outward normal direction
inline Vec2 perp_out(Vec2 t) { return {t.y, -t.x}; }

struct Polar {
	double r = 0.0;
	double theta = 0.0;
};

// Polar coordinates with theta in [0, 2*pi), measured from the positive
// x-axis. The origin maps to (0, 0) by convention. Points on the positive
// x-axis get theta = 0; points just below it wrap to values near 2*pi.
Polar polar_of(Vec2 p);

} // namespace cornerfem
