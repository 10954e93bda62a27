#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "shapegen/fourier.hpp"
#include "shapegen/features.hpp"
#include "shapegen/surrogate.hpp"

using namespace shapegen;

namespace {

// Printable mid-range parameters with v* = 1 and phi_n = 20.
PrintParams unit_ratio() { return {2200, 10, 800, 20, 20, 100, 100}; }

std::vector<PrintParams> printable_samples(std::size_t n, std::uint64_t seed) {
    std::vector<PrintParams> out;
    for (const auto& p : lhs_sample(kRawBounds, n, seed))
        if (!check_all(p).any_flagged()) out.push_back(p);
    return out;
}

/// Local minima of the right half-width over the interior of the outline.
int count_waists(const Contour& c) {
    std::vector<Point> right;
    for (const auto& p : c.points)
        if (p.x > 0.0) right.push_back(p);
    std::sort(right.begin(), right.end(), [](Point a, Point b) { return a.y < b.y; });
    int minima = 0;
    for (std::size_t i = 1; i + 1 < right.size(); ++i)
        if (right[i].x < right[i - 1].x && right[i].x <= right[i + 1].x) ++minima;
    return minima;
}

} // namespace

TEST(Lhs, OneSamplePerStratum) {
    const std::size_t n = 10;
    const auto samples = lhs_sample(kRawBounds, n, 42);
    ASSERT_EQ(samples.size(), n);
    for (std::size_t d = 0; d < 7; ++d) {
        std::set<std::size_t> strata;
        for (const auto& p : samples) {
            const double u = (p.as_array()[d] - kRawBounds[d].lo) / (kRawBounds[d].hi - kRawBounds[d].lo);
            ASSERT_GE(u, 0.0);
            ASSERT_LT(u, 1.0);
            strata.insert(static_cast<std::size_t>(u * static_cast<double>(n)));
        }
        EXPECT_EQ(strata.size(), n) << PrintParams::kNames[d];
    }
}

TEST(Lhs, SingleSampleInsideBox) {
    const auto s = lhs_sample(kRawBounds, 1, 9);
    ASSERT_EQ(s.size(), 1u);
    const auto a = s[0].as_array();
    for (std::size_t d = 0; d < 7; ++d) EXPECT_TRUE(kRawBounds[d].contains(a[d]));
}

TEST(Lhs, Deterministic) {
    const auto a = lhs_sample(kRawBounds, 50, 7), b = lhs_sample(kRawBounds, 50, 7);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].as_array(), b[i].as_array());
    const auto c = lhs_sample(kRawBounds, 50, 8);
    EXPECT_NE(a[0].as_array(), c[0].as_array());
}

TEST(Lhs, InvalidBounds) {
    ParamBounds b = kRawBounds;
    b[2] = {10, 5};
    EXPECT_THROW(lhs_sample(b, 5, 0), DomainError);
    b = kRawBounds;
    b[0].lo = std::nan("");
    EXPECT_THROW(lhs_sample(b, 5, 0), DomainError);
    EXPECT_THROW(lhs_sample(kRawBounds, 0, 0), DomainError);
}

TEST(Surrogate, TargetAreaFromMassConservation) {
    const auto s = surrogate_shape(unit_ratio(), 1);
    EXPECT_NEAR(s.target_area, 100.0 * fixtures::kPi, 1e-9);
    EXPECT_NEAR(shoelace_area(s.contour.points), s.target_area, 1e-3 * s.target_area);
}

TEST(Surrogate, AreaMatchesTargetAcrossSamples) {
    for (const auto& p : printable_samples(60, 3)) {
        const auto s = surrogate_shape(p, 1);
        EXPECT_NEAR(shoelace_area(s.contour.points), s.target_area, 1e-3 * s.target_area);
    }
}

TEST(Surrogate, HeightFormula) {
    const auto p = unit_ratio();
    const auto m = to_dimensionless(p);
    const double d_eq = 20.0; // sqrt(4 * 100 pi / pi)
    const double expected = std::min(p.h_n, d_eq * m.tau0_star / (1.0 + m.tau0_star));
    const auto f = extract(surrogate_contour(p, 1), 1);
    EXPECT_NEAR(f.h, expected, 1e-12);
}

TEST(Surrogate, StiffMaterialGivesRoundFilament) {
    // tau0* large and h_n above d_eq: height tends to d_eq and p to 4.
    PrintParams p{2000, 10, 1e6, 10, 30, 100, 100};
    const auto g = layer_geometry(p);
    EXPECT_NEAR(g.height, 10.0, 0.01);
    EXPECT_NEAR(g.exponent, 4.0, 0.01);
}

TEST(Surrogate, PressedHeightNeverExceedsNozzleHeight) {
    for (const auto& p : printable_samples(80, 4)) EXPECT_LE(extract(surrogate_contour(p, 1), 1).h, p.h_n + 1e-12);
}

TEST(Surrogate, ValidSymmetricContoursOnBed) {
    for (const auto& p : printable_samples(40, 5)) {
        for (int layers : {1, 2}) {
            const auto c = surrogate_contour(p, layers);
            EXPECT_TRUE(inspect(c).ok()) << inspect(c).describe();
            double ymin = 1e300, xmin = 1e300, xmax = -1e300;
            for (const auto& q : c.points) ymin = std::min(ymin, q.y), xmin = std::min(xmin, q.x), xmax = std::max(xmax, q.x);
            EXPECT_EQ(ymin, 0.0);
            EXPECT_NEAR(xmin, -xmax, 1e-12 * xmax);
            const double width = xmax - xmin;
            EXPECT_LT(fit(c, 32).residual, 0.005 * width);
        }
    }
}

TEST(Surrogate, TwoLayerHeightAndSinglePinch) {
    SurrogateConfig cfg;
    for (const auto& p : printable_samples(40, 6)) {
        const auto s = surrogate_shape(p, 2, cfg);
        ASSERT_TRUE(s.top && s.pinch);
        const double h = extract(s.contour, 2).h;
        EXPECT_NEAR(h, cfg.penetration * s.bottom.height + s.top->height, 1e-9 * h);
        EXPECT_EQ(count_waists(s.contour), 1);
    }
}

TEST(Surrogate, AreaDecreasesWithVelocityRatio) {
    PrintParams p = unit_ratio();
    double previous = 1e300;
    for (double v_p : {60.0, 80.0, 100.0, 150.0, 250.0}) {
        p.v_p = v_p;
        const double a = shoelace_area(surrogate_contour(p, 1).points);
        EXPECT_LT(a, previous);
        previous = a;
    }
}

TEST(Surrogate, UnprintableNamesMode) {
    PrintParams p = unit_ratio();
    p.v_p = 10; // v* = 0.1 below 1 - 20/30
    p.h_n = 30;
    try {
        surrogate_contour(p, 1);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.field(), "buckling");
    }
}

TEST(Surrogate, RejectsBadLayersAndConfig) {
    EXPECT_THROW(surrogate_contour(unit_ratio(), 3), DomainError);
    SurrogateConfig cfg;
    cfg.penetration = 1.2;
    EXPECT_THROW(surrogate_contour(unit_ratio(), 2, cfg), DomainError);
}
