#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "shapegen/contour.hpp"

using namespace shapegen;

TEST(Area, UnitSquareExact) {
    EXPECT_EQ(shoelace_area(fixtures::unit_square().points), 1.0);
    auto cw = fixtures::unit_square().points;
    std::reverse(cw.begin(), cw.end());
    EXPECT_EQ(signed_area(cw), -1.0);
    EXPECT_EQ(shoelace_area(cw), 1.0);
}

TEST(Area, CircleApproachesPi) {
    const auto c = fixtures::circle(1.0, 256);
    // Inscribed regular polygon: (n/2) sin(2 pi / n).
    EXPECT_NEAR(shoelace_area(c.points), 128.0 * std::sin(2.0 * fixtures::kPi / 256.0), 1e-12);
    EXPECT_NEAR(shoelace_area(c.points), fixtures::kPi, 1e-3);
}

TEST(Area, TranslationInvariant) {
    auto c = fixtures::stadium();
    const double a = shoelace_area(c.points);
    for (auto& p : c.points) p = p + Point{1e3, 7.0};
    EXPECT_NEAR(shoelace_area(c.points), a, 1e-8 * a);
}

TEST(Centroid, Stadium) {
    const auto c = centroid(fixtures::stadium().points);
    EXPECT_NEAR(c.x, 0.0, 1e-12);
    EXPECT_NEAR(c.y, 5.0, 1e-12);
}

TEST(Simple, DetectsBowTie) {
    EXPECT_TRUE(is_simple(fixtures::stadium().points));
    const std::vector<Point> bow{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    EXPECT_FALSE(is_simple(bow));
}

TEST(Inspect, ReportsEachIssue) {
    EXPECT_TRUE(inspect(fixtures::stadium()).ok());
    EXPECT_TRUE(inspect(fixtures::unit_square()).too_few_points);
    auto c = fixtures::circle(1.0, 32);
    c.points[3].y = -0.01;
    EXPECT_TRUE(inspect(c).below_bed);
    c = fixtures::circle(1.0, 32);
    c.points[0].y = -1e-7; // within the bed tolerance
    EXPECT_FALSE(inspect(c).below_bed);
    c.points[5].x = std::nan("");
    EXPECT_TRUE(inspect(c).non_finite);
    Contour zero{std::vector<Point>(10, Point{1, 1})};
    EXPECT_TRUE(inspect(zero).zero_perimeter);
    EXPECT_THROW(require_valid(zero), DomainError);
}

TEST(Canonicalize, ClockwiseBecomesCounterclockwise) {
    Contour c = fixtures::circle(2.0, 64);
    std::reverse(c.points.begin(), c.points.end());
    const auto k = canonicalize(c);
    EXPECT_GT(signed_area(k.points), 0.0);
    EXPECT_EQ(k.size(), kCanonicalPoints);
}

TEST(Canonicalize, CentresOnAxisAndStartsAtTop) {
    Contour c = fixtures::stadium();
    for (auto& p : c.points) p.x += 3.0;
    const auto k = canonicalize(c);
    EXPECT_NEAR(centroid(k.points).x, 0.0, 1e-9);
    EXPECT_NEAR(k.points[0].x, 0.0, 1e-12);
    EXPECT_NEAR(k.points[0].y, 10.0, 1e-12);
    // Counterclockwise from the top: the next point lies to the left.
    EXPECT_LT(k.points[1].x, 0.0);
}

TEST(Canonicalize, Idempotent) {
    const auto once = canonicalize(fixtures::stadium());
    const auto twice = canonicalize(once);
    // Chords shorten the perimeter slightly, so resampling moves points by a
    // small fraction of the spacing.
    const double spacing = perimeter(once.points) / static_cast<double>(once.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_LT(norm(once[i] - twice[i]), 1e-2 * spacing);
}

TEST(Canonicalize, MirrorInvariantStart) {
    Contour c = fixtures::circle_pair(5.0);
    Contour m = c;
    for (auto& p : m.points) p.x = -p.x;
    const auto a = canonicalize(c), b = canonicalize(m);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(norm(a[i] - b[i]), 1e-9);
}

TEST(Resample, UniformArcLength) {
    const auto pts = resample_arc_length(fixtures::unit_square().points, 8);
    ASSERT_EQ(pts.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(norm(pts[(i + 1) % 8] - pts[i]), 0.5, 1e-12);
}

TEST(TextFormat, RoundTrip) {
    const auto c = fixtures::stadium();
    const auto back = parse_contour(format_contour(c));
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(back[i], c[i]);
}

TEST(TextFormat, RejectsMalformedLines) {
    EXPECT_THROW(parse_contour("1,2\n3;4\n"), FormatError);
    EXPECT_THROW(parse_contour("1,2,3\n"), FormatError);
    EXPECT_NO_THROW(parse_contour("1,2\n\n3,4\n"));
}
