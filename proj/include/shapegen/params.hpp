#pragma once

// Raw print parameters, the reduced model-input set and its min-max
// normalization.
//
// Units follow the tables of the original study: lengths in mm, speeds in
// mm/s, stresses in Pa, density in kg/m^3.

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shapegen/error.hpp"

namespace shapegen {

/// Standard gravity, m/s^2. Shared by every quantity that involves rho*g.
inline constexpr double kGravity = 9.81;

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
};

struct PrintParams {
    double rho = 0.0;   // kg/m^3
    double mu = 0.0;    // Pa s
    double tau0 = 0.0;  // Pa
    double phi_n = 0.0; // mm
    double h_n = 0.0;   // mm
    double v_p = 0.0;   // mm/s
    double u_f = 0.0;   // mm/s

    static constexpr std::array<std::string_view, 7> kNames{
        "rho", "mu", "tau0", "phi_n", "h_n", "v_p", "u_f"};

    std::array<double, 7> as_array() const { return {rho, mu, tau0, phi_n, h_n, v_p, u_f}; }

    static PrintParams from_array(const std::array<double, 7>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
    }

    friend bool operator==(const PrintParams&, const PrintParams&) = default;
};

/// Reduced input set fed to the network (after dimensionless grouping).
struct ModelInputs {
    double tau0_star = 0.0;
    double mu = 0.0;
    double phi_n = 0.0;
    double h_n = 0.0;
    double v_star = 0.0;

    static constexpr std::array<std::string_view, 5> kNames{
        "tau0_star", "mu", "phi_n", "h_n", "v_star"};

    std::array<double, 5> as_array() const { return {tau0_star, mu, phi_n, h_n, v_star}; }

    static ModelInputs from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }

    friend bool operator==(const ModelInputs&, const ModelInputs&) = default;
};

/// Sampling ranges of the seven raw parameters.
using ParamBounds = std::array<Range, 7>;
/// Learned-domain ranges of the five model inputs.
using InputBounds = std::array<Range, 5>;

inline constexpr ParamBounds kRawBounds{{
    {2000.0, 2500.0}, // rho
    {1.0, 30.0},      // mu
    {100.0, 1500.0},  // tau0
    {5.0, 30.0},      // phi_n
    {5.0, 30.0},      // h_n
    {10.0, 300.0},    // v_p
    {10.0, 300.0},    // u_f
}};

inline constexpr InputBounds kInputBounds{{
    {0.1, 7.6},   // tau0_star
    {1.0, 30.0},  // mu
    {5.0, 30.0},  // phi_n
    {5.0, 30.0},  // h_n
    {0.03, 30.0}, // v_star
}};

inline void require_positive(const PrintParams& p) {
    const auto values = p.as_array();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            std::ostringstream os;
            os << "parameter '" << PrintParams::kNames[i] << "' must be positive and finite, got "
               << values[i];
            throw DomainError(os.str(), std::string(PrintParams::kNames[i]));
        }
    }
}

/// tau0* = tau0 / (rho g phi_n) with phi_n taken in meters; v* = v_p / u_f.
inline ModelInputs to_dimensionless(const PrintParams& p) {
    require_positive(p);
    ModelInputs m;
    m.tau0_star = p.tau0 / (p.rho * kGravity * (p.phi_n * 1e-3));
    m.v_star = p.v_p / p.u_f;
    m.mu = p.mu;
    m.phi_n = p.phi_n;
    m.h_n = p.h_n;
    return m;
}

// ---------------------------------------------------------------------------
// Range validation

enum class ValidationMode { strict, warn };

struct RangeViolation {
    std::string field;
    double value = 0.0;
    Range permitted;

    std::string message() const {
        std::ostringstream os;
        os << field << " = " << value << " outside permitted range [" << permitted.lo << ", "
           << permitted.hi << "]";
        return os.str();
    }
};

struct ValidationResult {
    std::vector<RangeViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

namespace detail {

template <std::size_t N>
ValidationResult check_ranges(const std::array<double, N>& values,
                              const std::array<std::string_view, N>& names,
                              const std::array<Range, N>& bounds, ValidationMode mode) {
    ValidationResult result;
    for (std::size_t i = 0; i < N; ++i) {
        if (!bounds[i].contains(values[i]) || !std::isfinite(values[i]))
            result.violations.push_back({std::string(names[i]), values[i], bounds[i]});
    }
    if (mode == ValidationMode::strict && !result.ok()) {
        const auto& v = result.violations.front();
        throw DomainError("out of range: " + v.message(), v.field);
    }
    return result;
}

} // namespace detail

inline ValidationResult validate(const ModelInputs& inputs, ValidationMode mode,
                                 const InputBounds& bounds = kInputBounds) {
    return detail::check_ranges(inputs.as_array(), ModelInputs::kNames, bounds, mode);
}

inline ValidationResult validate(const PrintParams& params, ValidationMode mode,
                                 const ParamBounds& bounds = kRawBounds) {
    return detail::check_ranges(params.as_array(), PrintParams::kNames, bounds, mode);
}

// ---------------------------------------------------------------------------
// Normalization

/// Per-input min/max over a training set. Persisted with the model.
struct NormStats {
    std::array<double, 5> min{};
    std::array<double, 5> max{};

    friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// Min/max over `inputs`. An input that is constant over the set has no
/// usable spread; its learned-domain range is used instead.
inline NormStats compute_norm_stats(std::span<const ModelInputs> inputs) {
    if (inputs.empty())
        throw DomainError("cannot compute normalization statistics from an empty set");
    NormStats s;
    s.min = inputs.front().as_array();
    s.max = s.min;
    for (const auto& in : inputs) {
        const auto a = in.as_array();
        for (std::size_t i = 0; i < 5; ++i) {
            s.min[i] = std::min(s.min[i], a[i]);
            s.max[i] = std::max(s.max[i], a[i]);
        }
    }
    for (std::size_t i = 0; i < 5; ++i) {
        if (!(s.max[i] > s.min[i])) {
            s.min[i] = std::min(s.min[i], kInputBounds[i].lo);
            s.max[i] = std::max(s.max[i], kInputBounds[i].hi);
        }
    }
    return s;
}

struct NormalizedInputs {
    std::array<double, 5> values{};
    /// Names of inputs that fell outside [0, 1] (extrapolation).
    std::vector<std::string> extrapolated;
};

inline void require_nondegenerate(const NormStats& stats) {
    for (std::size_t i = 0; i < 5; ++i) {
        if (!(stats.max[i] > stats.min[i]))
            throw DomainError("degenerate normalization statistics for '" +
                                  std::string(ModelInputs::kNames[i]) + "' (max <= min)",
                              std::string(ModelInputs::kNames[i]));
    }
}

/// How raw inputs are mapped onto [0, 1] before min-max scaling.
/// `log` applies min-max to log(x), which spreads inputs spanning several
/// decades (v* covers 0.03 to 30) evenly over the unit interval.
enum class InputScaling { linear, log };

inline const char* scaling_name(InputScaling s) { return s == InputScaling::log ? "log" : "linear"; }

inline InputScaling parse_scaling(const std::string& s) {
    if (s == "linear") return InputScaling::linear;
    if (s == "log") return InputScaling::log;
    throw FormatError("unknown input scaling '" + s + "'");
}

inline NormalizedInputs normalize(const ModelInputs& inputs, const NormStats& stats,
                                  InputScaling scaling = InputScaling::linear) {
    require_nondegenerate(stats);
    NormalizedInputs out;
    const auto a = inputs.as_array();
    for (std::size_t i = 0; i < 5; ++i) {
        if (scaling == InputScaling::log) {
            if (!(a[i] > 0.0) || !(stats.min[i] > 0.0))
                throw DomainError("log input scaling needs positive values",
                                  std::string(ModelInputs::kNames[i]));
            out.values[i] = std::log(a[i] / stats.min[i]) / std::log(stats.max[i] / stats.min[i]);
        } else {
            out.values[i] = (a[i] - stats.min[i]) / (stats.max[i] - stats.min[i]);
        }
        if (out.values[i] < 0.0 || out.values[i] > 1.0)
            out.extrapolated.emplace_back(ModelInputs::kNames[i]);
    }
    return out;
}

inline ModelInputs denormalize(const std::array<double, 5>& values, const NormStats& stats,
                               InputScaling scaling = InputScaling::linear) {
    require_nondegenerate(stats);
    std::array<double, 5> a{};
    for (std::size_t i = 0; i < 5; ++i)
        a[i] = scaling == InputScaling::log ? stats.min[i] * std::pow(stats.max[i] / stats.min[i], values[i])
                                            : stats.min[i] + values[i] * (stats.max[i] - stats.min[i]);
    return ModelInputs::from_array(a);
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline double require_number(const nlohmann::json& j, std::string_view key) {
    const auto it = j.find(key);
    if (it == j.end())
        throw FormatError("missing field '" + std::string(key) + "'", std::string(key));
    if (!it->is_number())
        throw FormatError("field '" + std::string(key) + "' must be a number", std::string(key));
    return it->get<double>();
}

} // namespace detail

inline void to_json(nlohmann::json& j, const PrintParams& p) {
    j = nlohmann::json::object();
    const auto a = p.as_array();
    for (std::size_t i = 0; i < a.size(); ++i) j[std::string(PrintParams::kNames[i])] = a[i];
}

inline void from_json(const nlohmann::json& j, PrintParams& p) {
    if (!j.is_object()) throw FormatError("print parameters must be a JSON object");
    std::array<double, 7> a{};
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = detail::require_number(j, PrintParams::kNames[i]);
    p = PrintParams::from_array(a);
}

inline void to_json(nlohmann::json& j, const ModelInputs& m) {
    j = nlohmann::json::object();
    const auto a = m.as_array();
    for (std::size_t i = 0; i < a.size(); ++i) j[std::string(ModelInputs::kNames[i])] = a[i];
}

inline void from_json(const nlohmann::json& j, ModelInputs& m) {
    if (!j.is_object()) throw FormatError("model inputs must be a JSON object");
    std::array<double, 5> a{};
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = detail::require_number(j, ModelInputs::kNames[i]);
    m = ModelInputs::from_array(a);
}

inline void to_json(nlohmann::json& j, const NormStats& s) {
    j = nlohmann::json::object();
    for (std::size_t i = 0; i < 5; ++i)
        j[std::string(ModelInputs::kNames[i])] = {{"min", s.min[i]}, {"max", s.max[i]}};
}

inline void from_json(const nlohmann::json& j, NormStats& s) {
    for (std::size_t i = 0; i < 5; ++i) {
        const auto key = std::string(ModelInputs::kNames[i]);
        if (!j.contains(key)) throw FormatError("normalization stats missing '" + key + "'");
        s.min[i] = detail::require_number(j.at(key), "min");
        s.max[i] = detail::require_number(j.at(key), "max");
    }
}

inline void to_json(nlohmann::json& j, const Range& r) { j = nlohmann::json::array({r.lo, r.hi}); }

} // namespace shapegen
