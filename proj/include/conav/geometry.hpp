#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "conav/vec2.hpp"

namespace conav {

// Axis-aligned map extent.
struct Rect {
    Vec2 lo;
    Vec2 hi;

    bool contains(const Vec2& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    // True iff the disk of radius r around p lies fully inside.
    bool contains_disk(const Vec2& p, double r) const {
        return p.x - r >= lo.x && p.x + r <= hi.x && p.y - r >= lo.y &&
               p.y + r <= hi.y;
    }
    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
};

inline Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double len_sq = ab.norm_sq();
    if (len_sq == 0.0) return a;
    const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
    return a + ab * t;
}

inline double distance_to_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return distance(p, closest_point_on_segment(a, b, p));
}

// Convex polygon, vertices in counter-clockwise order. Maps are built from
// unions of these, so exact point queries stay cheap.
struct ConvexPolygon {
    std::vector<Vec2> vertices;

    ConvexPolygon() = default;
    explicit ConvexPolygon(std::vector<Vec2> v) : vertices(std::move(v)) {
        if (vertices.size() < 3)
            throw std::invalid_argument("polygon needs at least 3 vertices");
        normalize_winding();
    }

    static ConvexPolygon rectangle(const Vec2& lo, const Vec2& hi) {
        return ConvexPolygon{{lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}};
    }

    // Boundary counts as inside.
    bool contains(const Vec2& p) const {
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices[i];
            const Vec2& b = vertices[(i + 1) % n];
            if ((b - a).cross(p - a) < 0.0) return false;
        }
        return true;
    }

    // Exact Euclidean distance; 0 for interior and boundary points.
    double distance_to(const Vec2& p) const {
        if (contains(p)) return 0.0;
        double best = std::numeric_limits<double>::infinity();
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i)
            best = std::min(best, distance_to_segment(vertices[i], vertices[(i + 1) % n], p));
        return best;
    }

    Vec2 closest_point_to(const Vec2& p) const {
        if (contains(p)) return p;
        double best = std::numeric_limits<double>::infinity();
        Vec2 best_point = vertices[0];
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 q = closest_point_on_segment(vertices[i], vertices[(i + 1) % n], p);
            const double d = distance(p, q);
            if (d < best) {
                best = d;
                best_point = q;
            }
        }
        return best_point;
    }

  private:
    void normalize_winding() {
        double area2 = 0.0;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i)
            area2 += vertices[i].cross(vertices[(i + 1) % n]);
        if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());
    }
};

// Clips a convex polygon against the half-plane {a : n.dot(a) + c >= 0}.
// Result may be empty.
inline std::vector<Vec2> clip_by_halfplane(const std::vector<Vec2>& poly,
                                           const Vec2& n, double c) {
    std::vector<Vec2> out;
    const std::size_t count = poly.size();
    for (std::size_t i = 0; i < count; ++i) {
        const Vec2& cur = poly[i];
        const Vec2& nxt = poly[(i + 1) % count];
        const double fc = n.dot(cur) + c;
        const double fn = n.dot(nxt) + c;
        if (fc >= 0.0) out.push_back(cur);
        if ((fc > 0.0 && fn < 0.0) || (fc < 0.0 && fn > 0.0)) {
            const double t = fc / (fc - fn);
            out.push_back(cur + (nxt - cur) * t);
        }
    }
    return out;
}

}  // namespace conav
