#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "shapegen/contour.hpp"
#include "shapegen/params.hpp"

namespace fixtures {

using shapegen::Contour;
using shapegen::Point;
using shapegen::PrintParams;

inline constexpr double kPi = std::numbers::pi;

/// Circle of radius r centred at (0, r), counterclockwise from the bottom.
inline Contour circle(double r, std::size_t n) {
    Contour c;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = -0.5 * kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        c.points.push_back({r * std::cos(a), r + r * std::sin(a)});
    }
    return c;
}

/// Stadium resting on y = 0: total width 40, height 10, cap radius 5.
inline Contour stadium(std::size_t per_cap = 64, std::size_t per_side = 64) {
    const double r = 5.0, half = 15.0;
    Contour c;
    for (std::size_t i = 0; i < per_side; ++i)
        c.points.push_back({-half + 2.0 * half * static_cast<double>(i) / static_cast<double>(per_side), 0.0});
    for (std::size_t i = 0; i < per_cap; ++i) {
        const double a = -0.5 * kPi + kPi * static_cast<double>(i) / static_cast<double>(per_cap);
        c.points.push_back({half + r * std::cos(a), r + r * std::sin(a)});
    }
    for (std::size_t i = 0; i < per_side; ++i)
        c.points.push_back({half - 2.0 * half * static_cast<double>(i) / static_cast<double>(per_side), 2.0 * r});
    for (std::size_t i = 0; i < per_cap; ++i) {
        const double a = 0.5 * kPi + kPi * static_cast<double>(i) / static_cast<double>(per_cap);
        c.points.push_back({-half + r * std::cos(a), r + r * std::sin(a)});
    }
    return c;
}

/// Union of two radius-r circles stacked on the y axis with centre distance
/// 1.2 r; the waist between them has width 1.6 r.
inline Contour circle_pair(double r, std::size_t n_per_arc = 400) {
    const double d = 1.2 * r;
    const double waist_angle = std::acos(0.6); // angle of the crossing seen from the lower centre
    std::vector<Point> right;
    // Lower circle: from the bottom (-pi/2) up to the crossing (pi/2 - waist_angle).
    const double a_end = 0.5 * kPi - waist_angle;
    for (std::size_t i = 0; i < n_per_arc; ++i) {
        const double a = -0.5 * kPi + (a_end + 0.5 * kPi) * static_cast<double>(i) / static_cast<double>(n_per_arc);
        right.push_back({r * std::cos(a), r + r * std::sin(a)});
    }
    // Upper circle: from the crossing (-(pi/2 - waist_angle)) to the top.
    for (std::size_t i = 0; i <= n_per_arc; ++i) {
        const double a = -a_end + (0.5 * kPi + a_end) * static_cast<double>(i) / static_cast<double>(n_per_arc);
        right.push_back({r * std::cos(a), r + d + r * std::sin(a)});
    }
    right.front().x = 0.0;
    right.back().x = 0.0;
    Contour c;
    c.points = right;
    for (std::size_t i = right.size() - 2; i >= 1; --i) c.points.push_back({-right[i].x, right[i].y});
    return c;
}

inline Contour unit_square() { return Contour{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}; }

// Reference parameter rows for the numerical and experimental validation cases.
inline const PrintParams kN1{2100, 7.5, 630, 25, 7.5, 50, 40.5};
inline const PrintParams kN10{2100, 7.5, 630, 25, 12.5, 30, 33.6};
inline const PrintParams kE1{2100, 7.5, 630, 25, 7.5, 50, 40.5};

inline const std::vector<PrintParams>& numerical_cases() {
    static const std::vector<PrintParams> rows{
        {2100, 7.5, 630, 25, 7.5, 50, 40.5},          {2100, 7.5, 630, 25, 17.5, 50, 36.9},
        {2205, 32.59, 952.57, 25.4, 10, 50, 120},     {2205, 32.59, 952.57, 25.4, 10, 150, 120},
        {2057.8, 6.5, 290.3, 25.4, 12.7, 30, 33.4},   {2057.8, 6.5, 290.3, 25.4, 19.05, 30, 32.7},
        {2057.8, 6.5, 290.3, 25.4, 12.7, 30, 29.3},   {2057.8, 6.5, 290.3, 25.4, 12.7, 40, 26.5},
        {2057.8, 6.5, 290.3, 25.4, 12.7, 40, 36.1},   {2100, 7.5, 630, 25, 12.5, 30, 33.6}};
    return rows;
}

inline const std::vector<PrintParams>& experimental_cases() {
    static const std::vector<PrintParams> rows{
        {2100, 7.5, 630, 25, 7.5, 50, 40.5},          {2100, 7.5, 630, 25, 12.5, 30, 33.6},
        {2205, 32.59, 952.57, 25.4, 15, 50, 120},     {2205, 32.59, 952.57, 25.4, 20, 75, 120},
        {2057.8, 6.5, 290.3, 25.4, 12.7, 40, 36.3},   {2057.8, 6.5, 290.3, 25.4, 19.05, 30, 32.7},
        {2057.8, 6.5, 290.3, 25.4, 12.7, 30, 35.1},   {2057.8, 6.5, 290.3, 25.4, 12.7, 40, 26.5},
        {2057.8, 6.5, 290.3, 25.4, 12.7, 40, 36.1},   {2100, 7.5, 630, 25, 12.5, 30, 33.6}};
    return rows;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("shapegen_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixtures
