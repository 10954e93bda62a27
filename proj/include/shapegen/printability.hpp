#pragma once

// Closed-form screens for the three deposition failure modes: slug
// formation (vertical tearing under self weight), horizontal tearing and
// filament buckling.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>
#include <string>

#include <json.hpp>

#include "shapegen/params.hpp"

namespace shapegen {

inline constexpr double kSqrt3 = 1.7320508075688772;

struct RheologyExtras {
    std::optional<double> shear_modulus; // G, Pa
    double xi = 1.5;                     // empirical correction on the critical stress
    double r_c_ratio = 0.85;             // critical radius / nozzle radius, in [0.8, 0.9]
    double wolfs_cutoff = 10.0;          // operational reading of "much greater than 1"

    void check() const {
        if (shear_modulus && !(*shear_modulus > 0.0))
            throw DomainError("shear modulus G must be positive", "G");
        if (!(r_c_ratio >= 0.8 && r_c_ratio <= 0.9))
            throw DomainError("r_c_ratio must lie in [0.8, 0.9]", "r_c_ratio");
        if (!(xi > 0.0)) throw DomainError("xi must be positive", "xi");
    }
};

struct SlugCheck {
    bool flagged = false;
    double h_c = 0.0; // mm
};

struct BucklingCheck {
    bool flagged = false;
    double v_star = 0.0;
    double threshold = 0.0; // 1 - 1/h*
};

enum class TearingStatus { ok, flagged, unavailable };

struct TearingCheck {
    TearingStatus status = TearingStatus::unavailable;
    double value = 0.0;     // Wolfs: (G/tau0) ln v*; Geffrault: v*
    double threshold = 0.0; // Wolfs: cutoff; Geffrault: (1 - eps_c)^-2
    std::string note;

    bool flagged() const { return status == TearingStatus::flagged; }
};

struct PrintabilityReport {
    SlugCheck slug;
    BucklingCheck buckling;
    TearingCheck tearing_wolfs;
    TearingCheck tearing_geffrault;

    bool any_flagged() const {
        return slug.flagged || buckling.flagged || tearing_wolfs.flagged() ||
               tearing_geffrault.flagged();
    }
    int flag_count() const {
        return int(slug.flagged) + int(buckling.flagged) + int(tearing_wolfs.flagged()) +
               int(tearing_geffrault.flagged());
    }
};

/// Critical nozzle height (mm) beyond which the filament breaks into slugs.
/// Evaluated in SI units: h_c = sigma_c/(rho g) * r_c/r_n - 4/3 r_n^2/r_c + 6 r_n.
inline double critical_slug_height(const PrintParams& p, const RheologyExtras& extras = {}) {
    const double r_n = 0.5 * p.phi_n * 1e-3;
    const double r_c = extras.r_c_ratio * r_n;
    const double sigma_c = extras.xi * kSqrt3 * p.tau0;
    const double h_c = sigma_c / (p.rho * kGravity) * (r_c / r_n) - (4.0 / 3.0) * r_n * r_n / r_c +
                       6.0 * r_n;
    return h_c * 1e3;
}

inline SlugCheck check_slug(const PrintParams& p, const RheologyExtras& extras = {}) {
    require_positive(p);
    SlugCheck out;
    out.h_c = critical_slug_height(p, extras);
    out.flagged = p.h_n > out.h_c;
    return out;
}

inline BucklingCheck check_buckling(const PrintParams& p) {
    require_positive(p);
    BucklingCheck out;
    out.v_star = p.v_p / p.u_f;
    out.threshold = 1.0 - p.phi_n / p.h_n;
    out.flagged = out.v_star < out.threshold;
    return out;
}

struct TearingChecks {
    TearingCheck wolfs;
    TearingCheck geffrault;
};

inline TearingChecks check_tearing(const PrintParams& p, const RheologyExtras& extras = {}) {
    require_positive(p);
    TearingChecks out;
    if (!extras.shear_modulus) {
        out.wolfs.note = out.geffrault.note = "shear modulus G not provided";
        return out;
    }
    const double G = *extras.shear_modulus;
    const double v_star = p.v_p / p.u_f;

    out.wolfs.value = (G / p.tau0) * std::log(v_star);
    out.wolfs.threshold = extras.wolfs_cutoff;
    out.wolfs.status =
        out.wolfs.value > extras.wolfs_cutoff ? TearingStatus::flagged : TearingStatus::ok;

    const double eps_c = extras.xi * kSqrt3 * p.tau0 / G;
    out.geffrault.value = v_star;
    if (eps_c >= 1.0) {
        out.geffrault.threshold = std::numeric_limits<double>::infinity();
        out.geffrault.status = TearingStatus::flagged;
        out.geffrault.note = "critical strain >= 1: criterion undefined, flagged unconditionally";
    } else {
        out.geffrault.threshold = 1.0 / ((1.0 - eps_c) * (1.0 - eps_c));
        out.geffrault.status =
            v_star > out.geffrault.threshold ? TearingStatus::flagged : TearingStatus::ok;
    }
    return out;
}

inline PrintabilityReport check_all(const PrintParams& p, const RheologyExtras& extras = {}) {
    extras.check();
    PrintabilityReport r;
    r.slug = check_slug(p, extras);
    r.buckling = check_buckling(p);
    auto tearing = check_tearing(p, extras);
    r.tearing_wolfs = std::move(tearing.wolfs);
    r.tearing_geffrault = std::move(tearing.geffrault);
    return r;
}

/// Names of the failure modes flagged in `r`, in a fixed order.
inline std::vector<std::string> flagged_modes(const PrintabilityReport& r) {
    std::vector<std::string> modes;
    if (r.slug.flagged) modes.emplace_back("slug");
    if (r.buckling.flagged) modes.emplace_back("buckling");
    if (r.tearing_wolfs.flagged()) modes.emplace_back("tearing_wolfs");
    if (r.tearing_geffrault.flagged()) modes.emplace_back("tearing_geffrault");
    return modes;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json tearing_json(const TearingCheck& t) {
    nlohmann::json j;
    if (t.status == TearingStatus::unavailable) {
        j = {{"flagged", nullptr}, {"status", "unavailable"}};
    } else {
        j = {{"flagged", t.flagged()},
             {"status", t.flagged() ? "flagged" : "ok"},
             {"value", finite_or_null(t.value)},
             {"threshold", finite_or_null(t.threshold)}};
    }
    j["note"] = t.note;
    return j;
}

} // namespace detail

inline nlohmann::json report_json(const PrintabilityReport& r) {
    return {
        {"format_version", 1},
        {"slug",
         {{"flagged", r.slug.flagged}, {"h_c", r.slug.h_c}, {"threshold", r.slug.h_c}, {"note", ""}}},
        {"buckling",
         {{"flagged", r.buckling.flagged},
          {"value", r.buckling.v_star},
          {"threshold", r.buckling.threshold},
          {"note", ""}}},
        {"tearing_wolfs", detail::tearing_json(r.tearing_wolfs)},
        {"tearing_geffrault", detail::tearing_json(r.tearing_geffrault)},
    };
}

inline RheologyExtras extras_from_json(const nlohmann::json& j) {
    RheologyExtras e;
    if (j.is_null()) return e;
    if (!j.is_object()) throw FormatError("extras must be a JSON object");
    auto number = [&](const char* key) -> std::optional<double> {
        const auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        if (!it->is_number()) throw FormatError(std::string("extras field '") + key + "' must be a number");
        return it->get<double>();
    };
    if (auto g = number("G")) e.shear_modulus = *g;
    if (auto x = number("xi")) e.xi = *x;
    if (auto r = number("r_c_ratio")) e.r_c_ratio = *r;
    if (auto w = number("wolfs_cutoff")) e.wolfs_cutoff = *w;
    return e;
}

} // namespace shapegen
