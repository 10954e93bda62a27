#pragma once

// Symmetric Fourier descriptors of closed cross-section contours.
//
//   x(t) =      sum_{k=1}^{N-1} s_k sin(k t)
//   y(t) = c0 + sum_{k=1}^{N-1} c_k cos(k t)
//
// Sine-only x and cosine-only y make every represented curve mirror
// symmetric about x = 0 (x(-t) = -x(t), y(-t) = y(t)). The coefficient
// vector has 2N-1 entries ordered (c0, s_1..s_{N-1}, c_1..c_{N-1}).
//
// Parameter convention: t = 0 sits on the upper crossing of the symmetry
// axis and t increases clockwise, so a positive s_1 puts the t in (0, pi)
// branch on the right (x > 0). Canonical contours are stored
// counterclockwise, hence canonical vertex i is mapped to t = -2 pi i / M.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "shapegen/contour.hpp"
#include "shapegen/error.hpp"

namespace shapegen {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FourierShape {
    int n_harmonics = 0; // N
    double c0 = 0.0;
    std::vector<double> s; // s_1..s_{N-1}
    std::vector<double> c; // c_1..c_{N-1}

    FourierShape() = default;
    explicit FourierShape(int harmonics)
        : n_harmonics(harmonics), s(static_cast<std::size_t>(std::max(harmonics - 1, 0)), 0.0),
          c(static_cast<std::size_t>(std::max(harmonics - 1, 0)), 0.0) {
        if (harmonics < 1) throw DomainError("harmonic count must be >= 1", "n_harmonics");
    }

    std::size_t coefficient_count() const { return 2 * static_cast<std::size_t>(n_harmonics) - 1; }

    std::vector<double> to_vector() const {
        std::vector<double> v;
        v.reserve(coefficient_count());
        v.push_back(c0);
        v.insert(v.end(), s.begin(), s.end());
        v.insert(v.end(), c.begin(), c.end());
        return v;
    }

    static FourierShape from_vector(std::span<const double> v) {
        if (v.empty() || v.size() % 2 == 0)
            throw DomainError("coefficient vector length must be odd (2N-1)", "coefficients");
        FourierShape f(static_cast<int>((v.size() + 1) / 2));
        const std::size_t m = f.s.size();
        f.c0 = v[0];
        std::copy_n(v.begin() + 1, m, f.s.begin());
        std::copy_n(v.begin() + 1 + static_cast<std::ptrdiff_t>(m), m, f.c.begin());
        return f;
    }

    /// Harmonic count N for a coefficient count 2N-1.
    static int harmonics_for(int coefficient_count) {
        if (coefficient_count < 1 || coefficient_count % 2 == 0)
            throw DomainError("coefficient count must be odd and positive", "coefficients");
        return (coefficient_count + 1) / 2;
    }
};

struct SampledCurve {
    std::vector<double> t;
    std::vector<Point> points;

    std::size_t size() const noexcept { return points.size(); }
};

inline Point evaluate(const FourierShape& f, double t) {
    Point p{0.0, f.c0};
    for (std::size_t k = 1; k < static_cast<std::size_t>(f.n_harmonics); ++k) {
        const double kt = static_cast<double>(k) * t;
        p.x += f.s[k - 1] * std::sin(kt);
        p.y += f.c[k - 1] * std::cos(kt);
    }
    return p;
}

/// Uniform parameter grid t_j = 2 pi j / n, j = 0..n-1.
inline std::vector<double> uniform_grid(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j)
        t[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    return t;
}

inline SampledCurve sample(const FourierShape& f, std::size_t n_points) {
    if (n_points < 2 * static_cast<std::size_t>(f.n_harmonics))
        throw DomainError("sample count " + std::to_string(n_points) + " is below the bound 2N = " +
                              std::to_string(2 * f.n_harmonics),
                          "n_points");
    SampledCurve curve;
    curve.t = uniform_grid(n_points);
    curve.points.reserve(n_points);
    for (double t : curve.t) curve.points.push_back(evaluate(f, t));
    return curve;
}

inline Contour to_contour(const SampledCurve& curve) { return Contour{curve.points}; }

/// Least-squares symmetric fit over arbitrary parameter values.
inline FourierShape fit_sampled(std::span<const double> t, std::span<const Point> pts,
                                int harmonics) {
    if (harmonics < 1) throw DomainError("harmonic count must be >= 1", "n_harmonics");
    if (t.size() != pts.size()) throw DomainError("parameter and point counts differ");
    const Eigen::Index m = static_cast<Eigen::Index>(pts.size());
    const Eigen::Index k_max = harmonics - 1;
    if (m < 2 * harmonics)
        throw DomainError("too few points for " + std::to_string(harmonics) + " harmonics");

    Eigen::MatrixXd sin_basis(m, k_max), cos_basis(m, k_max + 1);
    Eigen::VectorXd xs(m), ys(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        xs(i) = pts[ui].x;
        ys(i) = pts[ui].y;
        cos_basis(i, 0) = 1.0;
        for (Eigen::Index k = 1; k <= k_max; ++k) {
            sin_basis(i, k - 1) = std::sin(static_cast<double>(k) * t[ui]);
            cos_basis(i, k) = std::cos(static_cast<double>(k) * t[ui]);
        }
    }
    FourierShape f(harmonics);
    if (k_max > 0) {
        const Eigen::VectorXd sx = sin_basis.colPivHouseholderQr().solve(xs);
        for (Eigen::Index k = 0; k < k_max; ++k) f.s[static_cast<std::size_t>(k)] = sx(k);
    }
    const Eigen::VectorXd cy = cos_basis.colPivHouseholderQr().solve(ys);
    f.c0 = cy(0);
    for (Eigen::Index k = 1; k <= k_max; ++k) f.c[static_cast<std::size_t>(k - 1)] = cy(k);
    return f;
}

inline FourierShape fit_sampled(const SampledCurve& curve, int harmonics) {
    return fit_sampled(curve.t, curve.points, harmonics);
}

/// Parameter values attached to the vertices of a canonical contour.
inline std::vector<double> canonical_parameters(std::size_t m) {
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i)
        t[i] = i == 0 ? 0.0 : kTwoPi * static_cast<double>(m - i) / static_cast<double>(m);
    return t;
}

/// Mean distance from the canonical contour points to a densely sampled
/// rendition of `shape` (distance to the closed polyline, not to vertices).
inline double reconstruction_error(const Contour& contour, const FourierShape& shape) {
    const Contour canon = canonicalize(contour);
    const std::size_t dense_n =
        std::max<std::size_t>(4096, 16 * static_cast<std::size_t>(shape.n_harmonics));
    const SampledCurve dense = sample(shape, dense_n);
    const auto& d = dense.points;
    double total = 0.0;
    for (const auto& p : canon.points) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d.size(); ++j)
            best = std::min(best, point_segment_distance(p, d[j], d[(j + 1) % d.size()]));
        total += best;
    }
    return total / static_cast<double>(canon.size());
}

struct FitResult {
    FourierShape shape;
    double residual = 0.0; // mm, mean point distance
};

/// Symmetric least-squares fit of a raw contour with `harmonics` = N.
inline FitResult fit(const Contour& contour, int harmonics) {
    if (harmonics < 2) throw DomainError("fit requires at least 2 harmonics", "n_harmonics");
    if (2 * static_cast<std::size_t>(harmonics) > kCanonicalPoints / 2)
        throw DomainError("too many harmonics for the canonical resampling", "n_harmonics");
    const Contour canon = canonicalize(contour);
    const auto t = canonical_parameters(canon.size());
    FitResult r;
    r.shape = fit_sampled(t, canon.points, harmonics);
    r.residual = reconstruction_error(canon, r.shape);
    return r;
}

// ---------------------------------------------------------------------------
// JSON: {"n_harmonics": N, "c0": f, "s": [...], "c": [...]}

inline void to_json(nlohmann::json& j, const FourierShape& f) {
    j = nlohmann::json{{"n_harmonics", f.n_harmonics}, {"c0", f.c0}, {"s", f.s}, {"c", f.c}};
}

inline void from_json(const nlohmann::json& j, FourierShape& f) {
    try {
        const int n = j.at("n_harmonics").get<int>();
        FourierShape out(n);
        out.c0 = j.at("c0").get<double>();
        out.s = j.at("s").get<std::vector<double>>();
        out.c = j.at("c").get<std::vector<double>>();
        if (out.s.size() != static_cast<std::size_t>(n - 1) ||
            out.c.size() != static_cast<std::size_t>(n - 1))
            throw FormatError("Fourier shape: 's' and 'c' must each hold n_harmonics - 1 values");
        f = std::move(out);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("Fourier shape: ") + e.what());
    }
}

} // namespace shapegen
