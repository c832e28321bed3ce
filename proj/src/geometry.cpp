#include "zedloc/geometry.hpp"

namespace zedloc {

Vec2 reflect_point(Vec2 p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double t = dot(p - s.a, d) / dot(d, d);
    const Vec2 foot = s.a + t * d;
    return 2.0 * foot - p;
}

std::optional<Crossing> intersect(Vec2 p, Vec2 q, const Segment& s) {
    const Vec2 r = q - p;
    const Vec2 e = s.b - s.a;
    const double denom = cross(r, e);
    if (std::abs(denom) <= 1e-15 * norm(r) * norm(e)) return std::nullopt;
    const Vec2 w = s.a - p;
    const double t = cross(w, e) / denom;
    const double u = cross(w, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return Crossing{t, u};
}

bool point_in_polygon(Vec2 p, const Polygon& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_at) inside = !inside;
        }
    }
    return inside;
}

bool is_simple_polygon(const Polygon& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Segment ei{poly[i], poly[(i + 1) % n]};
        if (ei.length() == 0.0) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            const Segment ej{poly[j], poly[(j + 1) % n]};
            if (intersect(ei.a, ei.b, ej)) return false;
        }
    }
    return true;
}

}  // namespace zedloc
