#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace zedloc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Segment {
    Vec2 a;
    Vec2 b;

    double length() const { return distance(a, b); }
};

/// Mirror image of p across the infinite line through s.
Vec2 reflect_point(Vec2 p, const Segment& s);

/// Parameters (t along p->q, u along s.a->s.b) of the intersection of the
/// segment p->q with s, or nullopt when they are parallel or disjoint.
struct Crossing {
    double t;
    double u;
};
std::optional<Crossing> intersect(Vec2 p, Vec2 q, const Segment& s);

struct Box {
    Vec2 min;
    Vec2 max;

    bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
};

using Polygon = std::vector<Vec2>;

/// Even-odd rule; points on the boundary may land on either side.
bool point_in_polygon(Vec2 p, const Polygon& poly);

/// True when no two non-adjacent edges intersect and there are >= 3 vertices.
bool is_simple_polygon(const Polygon& poly);

}  // namespace zedloc
