#pragma once

// Closed polylines in the cross-section plane and the geometric helpers
// shared by the Fourier fit, the surrogate generator and feature
// extraction.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "shapegen/error.hpp"

namespace shapegen {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point&, const Point&) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

/// Ordered closed polyline, mm. The last point connects back to the first.
struct Contour {
    std::vector<Point> points;

    std::size_t size() const noexcept { return points.size(); }
    const Point& operator[](std::size_t i) const { return points[i]; }
};

/// Tolerance below the print bed (y = 0) still accepted as "on the bed".
inline constexpr double kBedTolerance = 1e-6;
inline constexpr std::size_t kMinContourPoints = 8;
/// Resampling count used by canonicalization.
inline constexpr std::size_t kCanonicalPoints = 512;

// ---------------------------------------------------------------------------
// Polygon measures

/// Signed shoelace area; positive for counterclockwise order.
inline double signed_area(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

inline double shoelace_area(const std::vector<Point>& pts) { return std::abs(signed_area(pts)); }

inline double perimeter(const std::vector<Point>& pts) {
    double len = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) len += norm(pts[(i + 1) % pts.size()] - pts[i]);
    return len;
}

/// Area centroid of a simple polygon. Falls back to the vertex mean when
/// the area vanishes.
inline Point centroid(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = pts[i];
        const Point& q = pts[(i + 1) % n];
        const double c = p.x * q.y - q.x * p.y;
        a2 += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if (std::abs(a2) < 1e-300) {
        Point m;
        for (const auto& p : pts) m = m + p;
        return (1.0 / static_cast<double>(n)) * m;
    }
    return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

inline double point_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 <= 0.0) return norm(p - a);
    const double s = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    return norm(p - (a + s * ab));
}

namespace detail {

inline int orientation_sign(Point a, Point b, Point c) {
    const double v = cross(b - a, c - a);
    const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                                   std::abs(c.y - a.y), 1e-300});
    if (std::abs(v) <= 1e-14 * scale * scale) return 0;
    return v > 0 ? 1 : -1;
}

inline bool on_segment(Point a, Point b, Point p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Point a, Point b, Point c, Point d) {
    const int o1 = orientation_sign(a, b, c);
    const int o2 = orientation_sign(a, b, d);
    const int o3 = orientation_sign(c, d, a);
    const int o4 = orientation_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

} // namespace detail

/// True when no two non-adjacent edges of the closed polyline touch.
/// Sweep over x-sorted edges; quadratic only in the worst case.
inline bool is_simple(const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    if (n < 3) return false;
    struct Edge {
        double xmin, xmax;
        std::size_t i;
    };
    std::vector<Edge> edges(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % n];
        edges[i] = {std::min(a.x, b.x), std::max(a.x, b.x), i};
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& l, const Edge& r) { return l.xmin < r.xmin; });
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n && edges[v].xmin <= edges[u].xmax; ++v) {
            const std::size_t i = edges[u].i, j = edges[v].i;
            const std::size_t d = i > j ? i - j : j - i;
            if (d == 1 || d == n - 1) continue; // adjacent edges share a vertex
            if (detail::segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Validation

struct ContourIssues {
    bool too_few_points = false;
    bool non_finite = false;
    bool zero_perimeter = false;
    bool self_intersecting = false;
    bool below_bed = false;

    bool ok() const {
        return !too_few_points && !non_finite && !zero_perimeter && !self_intersecting &&
               !below_bed;
    }

    std::string describe() const {
        std::vector<std::string> parts;
        if (too_few_points) parts.push_back("fewer than 8 points");
        if (non_finite) parts.push_back("non-finite coordinates");
        if (zero_perimeter) parts.push_back("zero perimeter");
        if (self_intersecting) parts.push_back("self-intersecting");
        if (below_bed) parts.push_back("points below the print bed (y < 0)");
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
        return s;
    }
};

inline ContourIssues inspect(const Contour& c) {
    ContourIssues issues;
    issues.too_few_points = c.size() < kMinContourPoints;
    for (const auto& p : c.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) issues.non_finite = true;
        if (p.y < -kBedTolerance) issues.below_bed = true;
    }
    if (issues.non_finite || c.size() < 3) return issues;
    issues.zero_perimeter = !(perimeter(c.points) > 0.0);
    if (!issues.zero_perimeter) issues.self_intersecting = !is_simple(c.points);
    return issues;
}

inline void require_valid(const Contour& c) {
    const auto issues = inspect(c);
    if (!issues.ok()) throw DomainError("invalid contour: " + issues.describe(), "contour");
}

// ---------------------------------------------------------------------------
// Canonical form

/// Uniform arc-length resampling of a closed polyline, starting at its
/// first vertex.
inline std::vector<Point> resample_arc_length(const std::vector<Point>& pts, std::size_t count) {
    const std::size_t n = pts.size();
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + norm(pts[(i + 1) % n] - pts[i]);
    const double total = cum[n];
    if (!(total > 0.0)) throw DomainError("degenerate contour: zero perimeter", "contour");

    std::vector<Point> out;
    out.reserve(count);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(count);
        while (seg + 1 < n && cum[seg + 1] <= s) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double f = len > 0.0 ? (s - cum[seg]) / len : 0.0;
        const Point& a = pts[seg];
        const Point& b = pts[(seg + 1) % n];
        out.push_back(a + f * (b - a));
    }
    return out;
}

/// Canonical form used for fitting and feature extraction:
///  - counterclockwise vertex order,
///  - area centroid moved to x = 0,
///  - first point on the upper crossing of the symmetry axis x = 0,
///  - uniform arc-length resampling to `count` points.
inline Contour canonicalize(const Contour& contour, std::size_t count = kCanonicalPoints) {
    require_valid(contour);

    std::vector<Point> pts = contour.points;
    if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());

    const double cx = centroid(pts).x;
    for (auto& p : pts) p.x -= cx;

    // Highest crossing of the axis x = 0; falls back to the topmost vertex.
    const std::size_t n = pts.size();
    double best_y = -std::numeric_limits<double>::infinity();
    std::size_t best_edge = n;
    Point best_point;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % n];
        if (a.x == 0.0) {
            if (a.y > best_y) best_y = a.y, best_edge = i, best_point = a;
            continue;
        }
        if ((a.x < 0.0) == (b.x < 0.0) || b.x == 0.0) continue;
        const double f = a.x / (a.x - b.x);
        const Point q{0.0, a.y + f * (b.y - a.y)};
        if (q.y > best_y) best_y = q.y, best_edge = i, best_point = q;
    }
    std::vector<Point> rotated;
    rotated.reserve(n + 1);
    if (best_edge == n) {
        std::size_t top = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (pts[i].y > pts[top].y ||
                (pts[i].y == pts[top].y && std::abs(pts[i].x) < std::abs(pts[top].x)))
                top = i;
        }
        for (std::size_t k = 0; k < n; ++k) rotated.push_back(pts[(top + k) % n]);
    } else {
        rotated.push_back(best_point);
        for (std::size_t k = 1; k <= n; ++k) {
            const Point& p = pts[(best_edge + k) % n];
            if (k == n && p == best_point) break;
            if (!(p == best_point)) rotated.push_back(p);
        }
    }
    return Contour{resample_arc_length(rotated, count)};
}

// ---------------------------------------------------------------------------
// Text format: one "x,y" pair per line, mm, no header.

namespace detail {

inline void append_number(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

} // namespace detail

inline std::string format_contour(const Contour& c) {
    std::string out;
    out.reserve(c.size() * 40);
    for (const auto& p : c.points) {
        detail::append_number(out, p.x);
        out.push_back(',');
        detail::append_number(out, p.y);
        out.push_back('\n');
    }
    return out;
}

inline Contour parse_contour(const std::string& text) {
    Contour c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError("contour line " + std::to_string(lineno) + ": expected 'x,y'");
        try {
            std::size_t used_x = 0, used_y = 0;
            const std::string xs = line.substr(0, comma), ys = line.substr(comma + 1);
            const double x = std::stod(xs, &used_x);
            const double y = std::stod(ys, &used_y);
            if (xs.find_first_not_of(" \t", used_x) != std::string::npos ||
                ys.find_first_not_of(" \t", used_y) != std::string::npos)
                throw std::invalid_argument("trailing characters");
            c.points.push_back({x, y});
        } catch (const std::logic_error&) {
            throw FormatError("contour line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return c;
}

inline Contour read_contour_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open contour file '" + path + "'");
    return parse_contour(std::string(std::istreambuf_iterator<char>(in), {}));
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << text;
}

} // namespace shapegen
