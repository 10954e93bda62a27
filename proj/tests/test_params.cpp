#include <gtest/gtest.h>

#include <vector>

#include "fixtures.hpp"
#include "shapegen/params.hpp"

using namespace shapegen;

TEST(Dimensionless, YieldStressGroup) {
    const PrintParams p{2100, 7.5, 630, 25, 7.5, 50, 40.5};
    // 630 / (2100 * 9.81 * 0.025)
    EXPECT_NEAR(to_dimensionless(p).tau0_star, 630.0 / 515.025, 1e-12);
    EXPECT_NEAR(to_dimensionless(p).tau0_star, 1.2232, 1e-4);
}

TEST(Dimensionless, VelocityRatio) {
    EXPECT_NEAR(to_dimensionless(fixtures::kN1).v_star, 1.2346, 1e-4);
    PrintParams p = fixtures::kN1;
    p.v_p = p.u_f = 50;
    EXPECT_DOUBLE_EQ(to_dimensionless(p).v_star, 1.0);
}

TEST(Dimensionless, PassThroughFields) {
    const auto m = to_dimensionless(fixtures::kN1);
    EXPECT_EQ(m.mu, 7.5);
    EXPECT_EQ(m.phi_n, 25);
    EXPECT_EQ(m.h_n, 7.5);
}

TEST(Dimensionless, ScaleInvariance) {
    PrintParams a = fixtures::kN1, b = a;
    b.tau0 *= 3.7;
    b.rho *= 3.7;
    EXPECT_NEAR(to_dimensionless(a).tau0_star, to_dimensionless(b).tau0_star, 1e-12);
    b = a;
    b.v_p *= 0.3;
    b.u_f *= 0.3;
    EXPECT_NEAR(to_dimensionless(a).v_star, to_dimensionless(b).v_star, 1e-12);
}

TEST(Dimensionless, NonPositiveFieldNamed) {
    PrintParams p = fixtures::kN1;
    p.tau0 = -1;
    try {
        to_dimensionless(p);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.field(), "tau0");
    }
    p = fixtures::kN1;
    p.u_f = 0;
    EXPECT_THROW(to_dimensionless(p), DomainError);
}

TEST(Validate, Tau0StarAboveRange) {
    ModelInputs m{4.0, 15, 17.5, 17.5, 1.0};
    m.tau0_star = 8.0;
    const auto r = validate(m, ValidationMode::warn);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].field, "tau0_star");
    EXPECT_EQ(r.violations[0].permitted.hi, 7.6);
    EXPECT_THROW(validate(m, ValidationMode::strict), DomainError);
}

TEST(Validate, VStarBelowRange) {
    ModelInputs m{1.0, 15, 17.5, 17.5, 0.01};
    const auto r = validate(m, ValidationMode::warn);
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].field, "v_star");
    EXPECT_EQ(r.violations[0].permitted.lo, 0.03);
}

TEST(Validate, MidpointsValid) {
    std::array<double, 5> mid{};
    for (std::size_t i = 0; i < 5; ++i) mid[i] = kInputBounds[i].mid();
    EXPECT_TRUE(validate(ModelInputs::from_array(mid), ValidationMode::strict).ok());
    std::array<double, 7> raw{};
    for (std::size_t i = 0; i < 7; ++i) raw[i] = kRawBounds[i].mid();
    EXPECT_TRUE(validate(PrintParams::from_array(raw), ValidationMode::strict).ok());
}

TEST(Validate, StrictErrorCarriesFieldValueAndRange) {
    ModelInputs m{1.0, 15, 17.5, 40.0, 1.0};
    try {
        validate(m, ValidationMode::strict);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.field(), "h_n");
        const std::string what = e.what();
        EXPECT_NE(what.find("40"), std::string::npos);
        EXPECT_NE(what.find("[5, 30]"), std::string::npos);
    }
}

// Rows whose viscosity (32.59 Pa s) exceeds the 1-30 Pa s bound are
// rejected on mu alone; every other field of every row is in range.
TEST(Validate, ReferenceCaseRows) {
    std::vector<PrintParams> rows = fixtures::numerical_cases();
    rows.insert(rows.end(), fixtures::experimental_cases().begin(), fixtures::experimental_cases().end());
    for (const auto& p : rows) {
        const auto r = validate(to_dimensionless(p), ValidationMode::warn);
        if (p.mu > 30.0) {
            ASSERT_EQ(r.violations.size(), 1u);
            EXPECT_EQ(r.violations[0].field, "mu");
        } else {
            EXPECT_TRUE(r.ok()) << r.violations.front().message();
        }
    }
}

TEST(Normalize, LinearEndpointsAndMidpoint) {
    NormStats s;
    s.min = {0.1, 1, 5, 5, 0.03};
    s.max = {7.6, 30, 30, 30, 30};
    const auto lo = normalize(ModelInputs::from_array(s.min), s);
    const auto hi = normalize(ModelInputs::from_array(s.max), s);
    std::array<double, 5> mid{};
    for (std::size_t i = 0; i < 5; ++i) mid[i] = 0.5 * (s.min[i] + s.max[i]);
    const auto m = normalize(ModelInputs::from_array(mid), s);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(lo.values[i], 0.0);
        EXPECT_DOUBLE_EQ(hi.values[i], 1.0);
        EXPECT_NEAR(m.values[i], 0.5, 1e-15);
    }
    EXPECT_TRUE(m.extrapolated.empty());
}

TEST(Normalize, LogScalingEndpointsAndGeometricMidpoint) {
    NormStats s;
    s.min = {0.1, 1, 5, 5, 0.03};
    s.max = {7.6, 30, 30, 30, 30};
    std::array<double, 5> geo{};
    for (std::size_t i = 0; i < 5; ++i) geo[i] = std::sqrt(s.min[i] * s.max[i]);
    const auto m = normalize(ModelInputs::from_array(geo), s, InputScaling::log);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(m.values[i], 0.5, 1e-14);
    EXPECT_NEAR(normalize(ModelInputs::from_array(s.max), s, InputScaling::log).values[4], 1.0, 1e-15);
}

TEST(Normalize, RoundTrip) {
    NormStats s;
    s.min = {0.1, 1, 5, 5, 0.03};
    s.max = {7.6, 30, 30, 30, 30};
    const ModelInputs in{1.2232, 7.5, 25, 7.5, 1.2346};
    for (auto mode : {InputScaling::linear, InputScaling::log}) {
        const auto back = denormalize(normalize(in, s, mode).values, s, mode).as_array();
        const auto a = in.as_array();
        for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(back[i], a[i], 1e-12 * std::abs(a[i]));
    }
}

TEST(Normalize, ExtrapolationFlaggedNotRejected) {
    NormStats s;
    s.min = {0.1, 1, 5, 5, 0.03};
    s.max = {7.6, 30, 30, 30, 30};
    const auto r = normalize(ModelInputs{9.0, 15, 17, 17, 1.0}, s);
    EXPECT_GT(r.values[0], 1.0);
    ASSERT_EQ(r.extrapolated.size(), 1u);
    EXPECT_EQ(r.extrapolated[0], "tau0_star");
}

TEST(Normalize, DegenerateStatsRejected) {
    NormStats s;
    s.min = {1, 1, 5, 5, 1};
    s.max = {1, 30, 30, 30, 30};
    EXPECT_THROW(normalize(ModelInputs{1, 2, 6, 6, 2}, s), DomainError);
}

TEST(NormStats, MinMaxOverSet) {
    std::vector<ModelInputs> v{{1, 2, 10, 12, 0.5}, {3, 1, 20, 6, 2.0}, {2, 5, 15, 9, 1.0}};
    const auto s = compute_norm_stats(v);
    EXPECT_EQ(s.min, (std::array<double, 5>{1, 1, 10, 6, 0.5}));
    EXPECT_EQ(s.max, (std::array<double, 5>{3, 5, 20, 12, 2.0}));
}

TEST(NormStats, ConstantInputFallsBackToDomainRange) {
    std::vector<ModelInputs> v{{1.2, 7.5, 25, 7.5, 1.2}};
    const auto s = compute_norm_stats(v);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_LT(s.min[i], s.max[i]);
        EXPECT_LE(s.min[i], kInputBounds[i].lo);
        EXPECT_GE(s.max[i], kInputBounds[i].hi);
    }
    EXPECT_THROW(compute_norm_stats(std::vector<ModelInputs>{}), DomainError);
}

TEST(Json, ParamsRoundTripAndMissingField) {
    const nlohmann::json j = fixtures::kN1;
    EXPECT_EQ(j.get<PrintParams>().as_array(), fixtures::kN1.as_array());
    nlohmann::json bad = j;
    bad.erase("h_n");
    try {
        (void)bad.get<PrintParams>();
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.field(), "h_n");
    }
    bad = j;
    bad["rho"] = "heavy";
    EXPECT_THROW((void)bad.get<PrintParams>(), FormatError);
}

TEST(Json, NormStatsRoundTrip) {
    NormStats s;
    s.min = {0.1, 1, 5, 5, 0.03};
    s.max = {7.6, 30, 30, 30, 30};
    const nlohmann::json j = s;
    EXPECT_EQ(j.get<NormStats>(), s);
}
