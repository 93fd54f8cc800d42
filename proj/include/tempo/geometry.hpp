#pragma once

#include <cmath>
#include <vector>

namespace tempo::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// Points from a to b, inclusive, no further apart than `spacing`.
std::vector<Vec2> densify(Vec2 a, Vec2 b, double spacing);
// Concatenated densified legs through every point of `via`.
std::vector<Vec2> densify_polyline(const std::vector<Vec2>& via, double spacing);
double polyline_length(const std::vector<Vec2>& points);

}  // namespace tempo::geom
