#pragma once

// Deterministic parametric cross-section generator and Latin hypercube
// sampler used to build training data.
//
// The generator is a data factory, not a flow solver. It is smooth and
// monotone in the dimensionless inputs and spans flat to round filaments:
//
//   A     = (pi phi_n^2 / 4) / v*              mass conservation per unit length
//   d_eq  = sqrt(4 A / pi)
//   h     = min(h_n, d_eq tau0* / (1 + tau0*))
//   p     = 2 + 2 tau0* / (1 + tau0*)         superellipse exponent
//
// A single layer is the superellipse |x/a|^p + |(y - h/2)/(h/2)|^p = 1
// resting on y = 0, with half-width a chosen so its polygon area equals A.
// Two layers stack a copy narrowed by `top_width_scale` with its base at
// `penetration * h`; the outline is the union, whose right half-width is the
// pointwise maximum of the two layer half-widths. The crossing of the two
// half-width curves is the pinch.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "shapegen/contour.hpp"
#include "shapegen/params.hpp"
#include "shapegen/printability.hpp"
#include "shapegen/random.hpp"

namespace shapegen {

struct SurrogateConfig {
    double penetration = 0.9;      // base of the top layer, as a fraction of h_bottom
    double top_width_scale = 0.92; // top layer width relative to the bottom layer
    std::size_t points_per_half = 360;
    std::uint64_t seed = 0;

    void check() const {
        if (!(penetration > 0.5 && penetration < 1.0))
            throw DomainError("penetration must lie in (0.5, 1)", "penetration");
        if (!(top_width_scale > 0.0)) throw DomainError("top_width_scale must be positive");
        if (points_per_half < 8) throw DomainError("points_per_half must be >= 8");
    }
};

/// One superellipse layer: half-width a, height h, exponent p, base y0.
struct LayerShape {
    double half_width = 0.0;
    double height = 0.0;
    double exponent = 2.0;
    double base = 0.0;

    /// Half-width at height y (0 outside the layer).
    double half_width_at(double y) const {
        const double u = 2.0 * (y - base) / height - 1.0;
        if (u <= -1.0 || u >= 1.0) return 0.0;
        return half_width * std::pow(1.0 - std::pow(std::abs(u), exponent), 1.0 / exponent);
    }

    /// Right-half point at angle theta in [-pi/2, pi/2].
    Point at(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const double e = 2.0 / exponent;
        const double x = half_width * std::pow(std::abs(c), e);
        const double y = base + 0.5 * height * (1.0 + std::copysign(std::pow(std::abs(s), e), s));
        return {x, y};
    }

    /// Right-half chain from the bottom (0, base) to the top (0, base + h).
    std::vector<Point> right_half(std::size_t n) const {
        std::vector<Point> pts(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            const double theta =
                -0.5 * std::numbers::pi + std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
            pts[i] = at(theta);
        }
        pts.front() = {0.0, base};
        pts.back() = {0.0, base + height};
        return pts;
    }
};

struct SurrogateShape {
    Contour contour;
    double target_area = 0.0; // mass-conservation area of one layer, mm^2
    LayerShape bottom;
    std::optional<LayerShape> top;
    std::optional<Point> pinch; // right-half crossing of the two layers
};

namespace detail {

/// Closes a right-half chain (bottom to top on the axis) into a CCW outline.
inline Contour mirror_close(const std::vector<Point>& right) {
    Contour c;
    c.points = right;
    for (std::size_t i = right.size() - 2; i >= 1; --i) c.points.push_back({-right[i].x, right[i].y});
    return c;
}

} // namespace detail

/// Layer geometry for one filament of the given parameters (before the
/// width is fixed by the area constraint, `half_width` is 1).
inline LayerShape layer_geometry(const PrintParams& params, double* target_area = nullptr) {
    const ModelInputs m = to_dimensionless(params);
    const double area = 0.25 * std::numbers::pi * params.phi_n * params.phi_n / m.v_star;
    const double d_eq = std::sqrt(4.0 * area / std::numbers::pi);
    const double ratio = m.tau0_star / (1.0 + m.tau0_star);
    LayerShape layer;
    layer.height = std::min(params.h_n, d_eq * ratio);
    layer.exponent = 2.0 + 2.0 * ratio;
    layer.half_width = 1.0;
    if (target_area) *target_area = area;
    return layer;
}

/// Generates the cross-section for printable `params`; throws DomainError
/// naming the failure mode otherwise.
inline SurrogateShape surrogate_shape(const PrintParams& params, int layers,
                                      const SurrogateConfig& cfg = {}) {
    if (layers != 1 && layers != 2) throw DomainError("layers must be 1 or 2", "layers");
    cfg.check();
    const auto report = check_all(params);
    const auto modes = flagged_modes(report);
    if (!modes.empty())
        throw DomainError("unprintable parameters: " + modes.front() + " screen triggered", modes.front());

    SurrogateShape out;
    LayerShape bottom = layer_geometry(params, &out.target_area);

    // Polygon area is linear in the x-scale, so one evaluation at unit
    // half-width fixes the width exactly.
    const double unit_area =
        shoelace_area(detail::mirror_close(bottom.right_half(cfg.points_per_half)).points);
    bottom.half_width = out.target_area / unit_area;
    out.bottom = bottom;

    if (layers == 1) {
        out.contour = detail::mirror_close(bottom.right_half(cfg.points_per_half));
        return out;
    }

    LayerShape top = bottom;
    top.half_width *= cfg.top_width_scale;
    top.base = cfg.penetration * bottom.height;
    out.top = top;

    // On [top.base, bottom top] the bottom half-width decreases and the top
    // one increases; bisect for the single crossing.
    double lo = top.base, hi = bottom.base + bottom.height;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * bottom.height; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bottom.half_width_at(mid) > top.half_width_at(mid) ? lo : hi) = mid;
    }
    const double y_cross = 0.5 * (lo + hi);
    const Point pinch{top.half_width_at(y_cross), y_cross};
    out.pinch = pinch;

    std::vector<Point> right;
    for (const auto& p : bottom.right_half(cfg.points_per_half))
        if (p.y < y_cross) right.push_back(p);
    right.push_back(pinch);
    for (const auto& p : top.right_half(cfg.points_per_half))
        if (p.y > y_cross) right.push_back(p);
    out.contour = detail::mirror_close(right);
    return out;
}

inline Contour surrogate_contour(const PrintParams& params, int layers,
                                 const SurrogateConfig& cfg = {}) {
    return surrogate_shape(params, layers, cfg).contour;
}

// ---------------------------------------------------------------------------
// Latin hypercube sampling

/// `count` parameter sets; along every axis each of the `count` equal-width
/// strata holds exactly one sample.
inline std::vector<PrintParams> lhs_sample(const ParamBounds& bounds, std::size_t count,
                                           std::uint64_t seed) {
    if (count < 1) throw DomainError("LHS sample count must be >= 1", "count");
    for (std::size_t d = 0; d < bounds.size(); ++d) {
        const auto& r = bounds[d];
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.hi < r.lo || !(r.lo > 0.0))
            throw DomainError("invalid bounds for '" + std::string(PrintParams::kNames[d]) + "'",
                              std::string(PrintParams::kNames[d]));
    }
    Rng rng(seed);
    std::vector<std::array<double, 7>> rows(count);
    const double n = static_cast<double>(count);
    for (std::size_t d = 0; d < bounds.size(); ++d) {
        const auto strata = rng.permutation(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double u = (static_cast<double>(strata[i]) + rng.uniform()) / n;
            rows[i][d] = bounds[d].lo + u * (bounds[d].hi - bounds[d].lo);
        }
    }
    std::vector<PrintParams> out;
    out.reserve(count);
    for (const auto& r : rows) out.push_back(PrintParams::from_array(r));
    return out;
}

} // namespace shapegen
