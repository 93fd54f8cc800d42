#include "tempo/geometry.hpp"

#include <algorithm>

namespace tempo::geom {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * s);
}

namespace {

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

std::vector<Vec2> densify(Vec2 a, Vec2 b, double spacing) {
    const double len = distance(a, b);
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-12)));
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(pieces) + 1);
    for (int i = 0; i <= pieces; ++i) {
        const double s = static_cast<double>(i) / pieces;
        out.push_back(i == pieces ? b : a + (b - a) * s);
    }
    return out;
}

std::vector<Vec2> densify_polyline(const std::vector<Vec2>& via, double spacing) {
    std::vector<Vec2> out;
    if (via.empty()) return out;
    out.push_back(via.front());
    for (std::size_t i = 1; i < via.size(); ++i) {
        auto leg = densify(via[i - 1], via[i], spacing);
        out.insert(out.end(), leg.begin() + 1, leg.end());
    }
    return out;
}

double polyline_length(const std::vector<Vec2>& points) {
    double len = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) len += distance(points[i - 1], points[i]);
    return len;
}

}  // namespace tempo::geom
