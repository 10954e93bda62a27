#pragma once

// Engineering features of a cross-section contour.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapegen/contour.hpp"

namespace shapegen {

struct FeatureOptions {
    double band_lo = 0.2;      // pinch search band, fraction of h
    double band_hi = 0.8;
    double bed_fraction = 0.02; // points below bed_fraction*h count as bed contact
    bool require_simple = true;
};

struct ContactResult {
    std::optional<double> length; // l_c = 2 x_p
    std::optional<Point> pinch;   // (x_p, y_p) on the right half
    std::vector<std::string> diagnostics;
};

struct FeatureSet {
    double w = 0.0;
    double h = 0.0;
    double area = 0.0;
    std::optional<double> l_c;
    std::optional<Point> pinch;
    double bed_contact = 0.0;
    std::vector<std::string> diagnostics;
};

/// Interlayer contact length from the neck of the right half-contour.
///
/// Right-half vertices are ordered by height; inside the band
/// [band_lo h, band_hi h] a local minimum of the half-width x(y) shows up as
/// a sign change (negative to non-negative) of the centered difference
/// dx/dy. With several candidates the narrowest one wins.
inline ContactResult contact_length(const Contour& contour, const FeatureOptions& opt = {}) {
    ContactResult out;
    if (contour.size() < 3) {
        out.diagnostics.emplace_back("no pinch detected");
        return out;
    }
    const double cx = centroid(contour.points).x;
    double h = -std::numeric_limits<double>::infinity();
    std::vector<Point> right;
    for (const auto& p : contour.points) {
        h = std::max(h, p.y);
        if (p.x - cx > 0.0) right.push_back({p.x - cx, p.y});
    }
    std::stable_sort(right.begin(), right.end(), [](Point a, Point b) { return a.y < b.y; });

    const double y_lo = opt.band_lo * h, y_hi = opt.band_hi * h;
    struct Slope {
        std::size_t index;
        double value;
    };
    std::vector<Slope> slopes;
    for (std::size_t j = 1; j + 1 < right.size(); ++j) {
        if (right[j].y < y_lo || right[j].y > y_hi) continue;
        const double dy = right[j + 1].y - right[j - 1].y;
        if (!(dy > 1e-12 * std::max(h, 1.0))) continue;
        slopes.push_back({j, (right[j + 1].x - right[j - 1].x) / dy});
    }

    std::vector<std::size_t> candidates;
    for (std::size_t k = 1; k < slopes.size(); ++k) {
        if (slopes[k - 1].value < 0.0 && slopes[k].value >= 0.0) {
            std::size_t best = slopes[k - 1].index;
            for (std::size_t j = slopes[k - 1].index; j <= slopes[k].index; ++j)
                if (right[j].x < right[best].x) best = j;
            candidates.push_back(best);
        }
    }
    if (candidates.empty()) {
        out.diagnostics.emplace_back("no pinch detected");
        return out;
    }
    if (candidates.size() > 1)
        out.diagnostics.emplace_back("multiple pinch candidates; narrowest chosen");
    const std::size_t best = *std::min_element(
        candidates.begin(), candidates.end(),
        [&](std::size_t a, std::size_t b) { return right[a].x < right[b].x; });
    out.pinch = right[best];
    out.length = 2.0 * right[best].x;
    return out;
}

/// x-extent of the part of the outline lying below `threshold`.
inline double footprint_width(const std::vector<Point>& pts, double threshold) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % n];
        if (a.y < threshold) lo = std::min(lo, a.x), hi = std::max(hi, a.x);
        if ((a.y < threshold) != (b.y < threshold)) {
            const double f = (threshold - a.y) / (b.y - a.y);
            const double x = a.x + f * (b.x - a.x);
            lo = std::min(lo, x), hi = std::max(hi, x);
        }
    }
    return hi > lo ? hi - lo : 0.0;
}

inline FeatureSet extract(const Contour& contour, int layers, const FeatureOptions& opt = {}) {
    if (layers != 1 && layers != 2) throw DomainError("layers must be 1 or 2", "layers");
    if (contour.size() < 3) throw DomainError("contour needs at least 3 points", "contour");
    if (opt.require_simple && !is_simple(contour.points))
        throw DomainError("self-intersecting contour", "contour");

    FeatureSet f;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    f.h = -std::numeric_limits<double>::infinity();
    for (const auto& p : contour.points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        f.h = std::max(f.h, p.y);
    }
    f.w = xmax - xmin;
    f.area = shoelace_area(contour.points);
    f.bed_contact = footprint_width(contour.points, opt.bed_fraction * f.h);
    if (layers == 2) {
        auto contact = contact_length(contour, opt);
        f.l_c = contact.length;
        f.pinch = contact.pinch;
        f.diagnostics = std::move(contact.diagnostics);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json features_json(const FeatureSet& f) {
    nlohmann::json j{{"w", f.w}, {"h", f.h}, {"area", f.area}, {"bed_contact", f.bed_contact}};
    j["l_c"] = f.l_c ? nlohmann::json(*f.l_c) : nlohmann::json(nullptr);
    j["pinch"] = f.pinch ? nlohmann::json{{"x", f.pinch->x}, {"y", f.pinch->y}} : nlohmann::json(nullptr);
    j["diagnostics"] = f.diagnostics;
    return j;
}

inline std::string features_csv(const FeatureSet& f) {
    std::string row = "w,h,area,l_c,bed_contact\n";
    std::string line;
    detail::append_number(line, f.w);
    line += ',';
    detail::append_number(line, f.h);
    line += ',';
    detail::append_number(line, f.area);
    line += ',';
    if (f.l_c) detail::append_number(line, *f.l_c);
    line += ',';
    detail::append_number(line, f.bed_contact);
    return row + line + "\n";
}

} // namespace shapegen
