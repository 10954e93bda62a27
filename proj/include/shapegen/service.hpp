#pragma once

// JSON inference service. Request handling is pure (body in, status and
// body out) so it can be exercised without sockets; `serve` binds the
// handlers to an HTTP listener.

#include <array>
#include <optional>
#include <string>

// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "shapegen/model.hpp"

#include <httplib.h>
#include <json.hpp>

namespace shapegen {

inline constexpr int kApiFormatVersion = 1;

struct PredictRequest {
    int layers = 1;
    PrintParams params;
    RheologyExtras extras;
    std::size_t n_points = kDefaultPredictPoints;
    ValidationMode mode = ValidationMode::warn;
};

/// Parses a /predict body. Throws FormatError (with the offending field when
/// known) on malformed documents.
inline PredictRequest parse_predict_request(const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("request body must be a JSON object");
    PredictRequest r;
    if (j.contains("format_version") &&
        (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kApiFormatVersion))
        throw FormatError("unsupported format_version", "format_version");
    if (j.contains("layers")) {
        if (!j["layers"].is_number_integer()) throw FormatError("layers must be 1 or 2", "layers");
        r.layers = j["layers"].get<int>();
        if (r.layers != 1 && r.layers != 2) throw FormatError("layers must be 1 or 2", "layers");
    }
    if (!j.contains("params")) throw FormatError("missing field 'params'", "params");
    r.params = j["params"].get<PrintParams>();
    if (j.contains("extras")) r.extras = extras_from_json(j["extras"]);
    if (j.contains("n_points")) {
        if (!j["n_points"].is_number_integer() || j["n_points"].get<long long>() < 3)
            throw FormatError("n_points must be an integer >= 3", "n_points");
        r.n_points = j["n_points"].get<std::size_t>();
    }
    if (j.contains("mode")) {
        const auto m = j["mode"].is_string() ? j["mode"].get<std::string>() : std::string();
        if (m == "strict") r.mode = ValidationMode::strict;
        else if (m == "warn") r.mode = ValidationMode::warn;
        else throw FormatError("mode must be 'warn' or 'strict'", "mode");
    }
    return r;
}

inline nlohmann::json points_json(const Contour& c) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points) pts.push_back({p.x, p.y});
    return pts;
}

/// Response body shared by the CLI `predict --json` and POST /predict.
inline nlohmann::json prediction_json(const TrainedModel& model, const Prediction& p) {
    nlohmann::json warnings = nlohmann::json::array();
    for (const auto& w : p.warnings) warnings.push_back(warning_json(w));
    return {{"format_version", kApiFormatVersion},
            {"layers", model.layers},
            {"fourier", p.shape},
            {"points", points_json(p.contour)},
            {"features", features_json(p.features)},
            {"printability", report_json(p.printability)},
            {"warnings", warnings},
            {"model_info",
             {{"layers", model.layers},
              {"version", kModelFormatVersion},
              {"n_coefficients", model.config.outputs()},
              {"best_epoch", model.meta.best_epoch},
              {"best_validation_error", model.meta.best_validation_error}}}};
}

inline nlohmann::json ranges_json() {
    nlohmann::json raw = nlohmann::json::object(), inputs = nlohmann::json::object();
    for (std::size_t i = 0; i < kRawBounds.size(); ++i)
        raw[std::string(PrintParams::kNames[i])] = kRawBounds[i];
    for (std::size_t i = 0; i < kInputBounds.size(); ++i)
        inputs[std::string(ModelInputs::kNames[i])] = kInputBounds[i];
    return {{"format_version", kApiFormatVersion},
            {"params", raw},
            {"model_inputs", inputs},
            {"units",
             {{"rho", "kg/m^3"},
              {"mu", "Pa s"},
              {"tau0", "Pa"},
              {"phi_n", "mm"},
              {"h_n", "mm"},
              {"v_p", "mm/s"},
              {"u_f", "mm/s"},
              {"tau0_star", ""},
              {"v_star", ""}}}};
}

struct Response {
    int status = 200;
    nlohmann::json body;
};

inline Response error_response(int status, const std::string& message, const std::string& field = {}) {
    nlohmann::json body{{"format_version", kApiFormatVersion}, {"error", message}};
    body["field"] = field.empty() ? nlohmann::json(nullptr) : nlohmann::json(field);
    return {status, body};
}

/// Holds up to two immutable models, one per layer count.
class Service {
public:
    void load(TrainedModel model) {
        const int layers = model.layers;
        slots_[static_cast<std::size_t>(layers - 1)] = std::move(model);
    }

    const TrainedModel* model(int layers) const {
        if (layers != 1 && layers != 2) return nullptr;
        const auto& s = slots_[static_cast<std::size_t>(layers - 1)];
        return s ? &*s : nullptr;
    }

    bool empty() const { return !slots_[0] && !slots_[1]; }

    Response predict(const std::string& body) const {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            return error_response(400, std::string("malformed JSON: ") + e.what());
        }
        PredictRequest req;
        try {
            req = parse_predict_request(j);
            req.extras.check();
            require_positive(req.params);
        } catch (const FormatError& e) {
            return error_response(400, e.what(), e.field());
        } catch (const DomainError& e) {
            return error_response(400, e.what(), e.field());
        } catch (const nlohmann::json::exception& e) {
            return error_response(400, e.what());
        }
        const TrainedModel* m = model(req.layers);
        if (!m) return error_response(404, "no " + std::to_string(req.layers) + "-layer model loaded", "layers");
        try {
            const auto p = shapegen::predict(*m, req.params, req.n_points, req.extras, req.mode);
            return {200, prediction_json(*m, p)};
        } catch (const DomainError& e) {
            return error_response(422, e.what(), e.field());
        }
    }

    Response ranges() const { return {200, ranges_json()}; }

    Response health() const {
        nlohmann::json models = nlohmann::json::array();
        for (const auto& s : slots_) {
            if (!s) continue;
            models.push_back({{"layers", s->layers},
                              {"version", kModelFormatVersion},
                              {"n_coefficients", s->config.outputs()},
                              {"best_epoch", s->meta.best_epoch},
                              {"best_validation_error", s->meta.best_validation_error}});
        }
        return {200, {{"format_version", kApiFormatVersion}, {"status", "ok"}, {"models", models}}};
    }

private:
    std::array<std::optional<TrainedModel>, 2> slots_;
};

namespace detail {

inline void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

} // namespace detail

/// Registers the endpoints on `server`, with permissive CORS headers.
inline void mount(httplib::Server& server, const Service& service) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Post("/predict", [&service](const httplib::Request& req, httplib::Response& res) {
        detail::send(res, service.predict(req.body));
    });
    server.Get("/ranges", [&service](const httplib::Request&, httplib::Response& res) {
        detail::send(res, service.ranges());
    });
    server.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
        detail::send(res, service.health());
    });
}

/// Blocks serving requests. Throws DomainError when no model is loaded or
/// the address cannot be bound.
inline void serve(const Service& service, const std::string& host, int port) {
    if (service.empty()) throw DomainError("serve needs at least one model");
    httplib::Server server;
    mount(server, service);
    if (!server.bind_to_port(host, port))
        throw DomainError("cannot bind " + host + ":" + std::to_string(port), "port");
    server.listen_after_bind();
}

} // namespace shapegen
