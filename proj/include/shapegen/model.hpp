#pragma once

// Trained model: weights, normalization statistics, configuration and
// training metadata. Training loop and inference entry points.

#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapegen/dataset.hpp"
#include "shapegen/features.hpp"
#include "shapegen/fourier.hpp"
#include "shapegen/network.hpp"
#include "shapegen/params.hpp"
#include "shapegen/printability.hpp"

namespace shapegen {

inline constexpr int kModelFormatVersion = 1;

struct TrainingMeta {
    int best_epoch = 0;
    double best_validation_error = 0.0;    // mean normalized point distance
    double best_validation_error_mm = 0.0; // mean point distance, mm
    int epochs_run = 0;
    std::size_t train_records = 0;
    std::size_t validation_records = 0;
};

struct TrainedModel {
    NetworkConfig config;
    int layers = 1;
    NormStats stats;
    Network net;
    TrainingMeta meta;
};

struct TrainReport {
    std::vector<double> train_loss; // one per epoch
    struct Validation {
        int epoch = 0;
        double error = 0.0;    // normalized
        double error_mm = 0.0; // mm
    };
    std::vector<Validation> validations;
    int best_epoch = 0;
};

// ---------------------------------------------------------------------------
// Training data

/// One training example: normalized inputs and its target curve.
struct Example {
    std::array<double, 5> x{};
    SampledCurve target;
    LossTarget loss_target;
    FourierShape model_fit; // fit at the model's own harmonic count
};

/// Fits the contour with the ground-truth harmonic count and samples it on
/// the shared grid, which gives point correspondence through the canonical
/// start point.
inline SampledCurve target_curve(const Contour& contour, const NetworkConfig& cfg) {
    const auto gt = fit(contour, cfg.target_harmonics).shape;
    return sample(gt, static_cast<std::size_t>(cfg.n_points));
}

inline Example make_example(const ModelInputs& inputs, const Contour& contour, const NormStats& stats,
                            const NetworkConfig& cfg) {
    Example e;
    e.x = normalize(inputs, stats, cfg.input_scaling).values;
    e.target = target_curve(contour, cfg);
    e.loss_target = make_loss_target(e.target, cfg.lambda);
    e.model_fit = fit(contour, cfg.harmonics).shape;
    return e;
}

/// Per-coefficient RMS of the training targets, used as fixed output scale.
inline Eigen::VectorXd coefficient_scale(const std::vector<Example>& train, int outputs) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(outputs);
    for (const auto& e : train) {
        const auto v = e.model_fit.to_vector();
        for (int k = 0; k < outputs; ++k) s(k) += v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
    }
    s = (s / static_cast<double>(train.size())).cwiseSqrt();
    const double floor = std::max(1e-3 * s.maxCoeff(), 1e-9);
    return s.cwiseMax(floor);
}

/// Mean normalized and absolute point distance of the network on `examples`.
inline std::pair<double, double> evaluate_examples(const Network& net, const std::vector<Example>& examples,
                                                   const Eigen::MatrixXd& basis) {
    if (examples.empty()) return {0.0, 0.0};
    Eigen::MatrixXd x(kInputDim, static_cast<Eigen::Index>(examples.size()));
    for (std::size_t i = 0; i < examples.size(); ++i)
        for (int d = 0; d < kInputDim; ++d) x(d, static_cast<Eigen::Index>(i)) = examples[i].x[static_cast<std::size_t>(d)];
    const Eigen::MatrixXd pts = basis * forward_batch(net, x);
    const Eigen::Index n = basis.rows() / 2;
    double norm_err = 0.0, mm_err = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        double sum = 0.0;
        const auto& tp = examples[i].loss_target.points;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Point p{pts(j, static_cast<Eigen::Index>(i)), pts(n + j, static_cast<Eigen::Index>(i))};
            sum += norm(p - tp[static_cast<std::size_t>(j)]);
        }
        sum /= static_cast<double>(n);
        mm_err += sum;
        norm_err += sum / examples[i].loss_target.max_norm;
    }
    const double m = static_cast<double>(examples.size());
    return {norm_err / m, mm_err / m};
}

/// Mini-batch AdamW training on prepared examples. Returns the snapshot
/// with the lowest validation error.
inline std::pair<TrainedModel, TrainReport> train_examples(const std::vector<Example>& train,
                                                           const std::vector<Example>& validation,
                                                           const NormStats& stats, int layers,
                                                           const NetworkConfig& cfg) {
    cfg.check();
    if (train.empty()) throw DomainError("no training examples");

    TrainedModel model;
    model.config = cfg;
    model.layers = layers;
    model.stats = stats;
    model.net = Network(cfg.latent_dim, cfg.residual_layers, cfg.outputs());
    model.net.initialize(cfg.seed);
    model.net.output_scale() = coefficient_scale(train, cfg.outputs());

    const Eigen::MatrixXd basis = curve_basis(cfg.harmonics, cfg.n_points);
    const auto t = uniform_grid(static_cast<std::size_t>(cfg.n_points));
    AdamW opt(model.net.params().size(), cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay);
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    TrainReport report;
    Eigen::VectorXd best = model.net.params();
    double best_err = std::numeric_limits<double>::infinity();
    double best_err_mm = 0.0;

    const std::size_t n = train.size();
    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    std::vector<const LossTarget*> batch_targets;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double lr = cosine_lr(cfg, epoch - 1);
        const auto order = rng.permutation(n);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += bs) {
            const std::size_t count = std::min(bs, n - start);
            Eigen::MatrixXd x(kInputDim, static_cast<Eigen::Index>(count));
            batch_targets.clear();
            for (std::size_t k = 0; k < count; ++k) {
                const auto& ex = train[order[start + k]];
                for (int d = 0; d < kInputDim; ++d) {
                    double v = ex.x[static_cast<std::size_t>(d)];
                    if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * rng.normal();
                    x(d, static_cast<Eigen::Index>(k)) = v;
                }
                batch_targets.push_back(&ex.loss_target);
            }
            const auto g = loss_and_gradient(model.net, x, batch_targets, basis, t, cfg.lambda);
            if (!std::isfinite(g.loss) || !g.grad.allFinite())
                throw DomainError("training diverged at epoch " + std::to_string(epoch));
            epoch_loss += g.loss * static_cast<double>(count);
            opt.step(model.net.params(), g.grad, lr);
        }
        report.train_loss.push_back(epoch_loss / static_cast<double>(n));

        const bool last_without_validation = epoch == cfg.epochs && report.validations.empty();
        if (epoch % cfg.validate_every == 0 || last_without_validation) {
            const auto& val_set = validation.empty() ? train : validation;
            const auto [err, err_mm] = evaluate_examples(model.net, val_set, basis);
            if (!std::isfinite(err))
                throw DomainError("training diverged at epoch " + std::to_string(epoch));
            report.validations.push_back({epoch, err, err_mm});
            if (err < best_err) {
                best_err = err;
                best_err_mm = err_mm;
                best = model.net.params();
                report.best_epoch = epoch;
            }
        }
    }
    model.net.params() = best;
    model.meta.best_epoch = report.best_epoch;
    model.meta.best_validation_error = best_err;
    model.meta.best_validation_error_mm = best_err_mm;
    model.meta.epochs_run = cfg.epochs;
    model.meta.train_records = train.size();
    model.meta.validation_records = validation.size();
    return {std::move(model), std::move(report)};
}

/// Trains on the dataset's train split, selecting on its validation split.
inline std::pair<TrainedModel, TrainReport> train(const Dataset& ds, const NetworkConfig& cfg) {
    cfg.check();
    const auto train_recs = ds.subset(Split::train);
    const auto val_recs = ds.subset(Split::validation);
    if (train_recs.size() < 3) throw DomainError("training needs at least 3 train records");
    if (val_recs.empty()) throw DomainError("training needs at least 1 validation record");

    std::vector<ModelInputs> inputs;
    for (const auto* r : train_recs) inputs.push_back(r->inputs);
    const NormStats stats = compute_norm_stats(inputs);

    std::vector<Example> train_ex, val_ex;
    for (const auto* r : train_recs) train_ex.push_back(make_example(r->inputs, r->contour, stats, cfg));
    for (const auto* r : val_recs) val_ex.push_back(make_example(r->inputs, r->contour, stats, cfg));
    return train_examples(train_ex, val_ex, stats, ds.layers, cfg);
}

// ---------------------------------------------------------------------------
// Inference

struct Warning {
    std::string kind; // "range", "extrapolation", "printability", "geometry"
    std::string code; // field or failure mode
    std::string message;
    std::optional<double> value;
    std::optional<double> threshold;
};

inline nlohmann::json warning_json(const Warning& w) {
    nlohmann::json j{{"kind", w.kind}, {"code", w.code}, {"message", w.message}};
    j["value"] = w.value ? nlohmann::json(*w.value) : nlohmann::json(nullptr);
    j["threshold"] = w.threshold ? nlohmann::json(*w.threshold) : nlohmann::json(nullptr);
    return j;
}

struct Prediction {
    FourierShape shape;
    Contour contour;
    FeatureSet features;
    PrintabilityReport printability;
    std::vector<Warning> warnings;
};

inline constexpr std::size_t kDefaultPredictPoints = 256;

inline std::vector<Warning> printability_warnings(const PrintabilityReport& r) {
    std::vector<Warning> out;
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    };
    if (r.slug.flagged)
        out.push_back({"printability", "slug",
                       "slug formation likely: nozzle height exceeds critical height h_c = " + fmt(r.slug.h_c) + " mm",
                       std::nullopt, r.slug.h_c});
    if (r.buckling.flagged)
        out.push_back({"printability", "buckling",
                       "filament buckling likely: v* = " + fmt(r.buckling.v_star) + " < 1 - 1/h* = " +
                           fmt(r.buckling.threshold),
                       r.buckling.v_star, r.buckling.threshold});
    if (r.tearing_wolfs.flagged())
        out.push_back({"printability", "tearing_wolfs",
                       "filament tearing likely: (G/tau0) ln v* = " + fmt(r.tearing_wolfs.value) + " > " +
                           fmt(r.tearing_wolfs.threshold),
                       r.tearing_wolfs.value, r.tearing_wolfs.threshold});
    if (r.tearing_geffrault.flagged()) {
        const double thr = r.tearing_geffrault.threshold;
        out.push_back({"printability", "tearing_geffrault",
                       std::isfinite(thr) ? "filament tearing likely: v* = " + fmt(r.tearing_geffrault.value) +
                                                " > (1 - eps_c)^-2 = " + fmt(thr)
                                          : "filament tearing likely: " + r.tearing_geffrault.note,
                       r.tearing_geffrault.value,
                       std::isfinite(thr) ? std::optional<double>(thr) : std::nullopt});
    }
    return out;
}

/// Full inference path: dimensionless grouping, range validation,
/// normalization with the model's statistics, network, sampling, features
/// and failure screens.
inline Prediction predict(const TrainedModel& model, const PrintParams& params,
                          std::size_t n_points = kDefaultPredictPoints, const RheologyExtras& extras = {},
                          ValidationMode mode = ValidationMode::warn) {
    const ModelInputs inputs = to_dimensionless(params);
    Prediction out;
    for (const auto& v : validate(inputs, mode).violations)
        out.warnings.push_back({"range", v.field, v.message(), v.value, std::nullopt});
    const auto normalized = normalize(inputs, model.stats, model.config.input_scaling);
    for (const auto& name : normalized.extrapolated)
        out.warnings.push_back({"extrapolation", name,
                                name + " lies outside the training statistics (extrapolation)", std::nullopt,
                                std::nullopt});

    out.shape = forward(model.net, normalized.values);
    const SampledCurve curve = sample(out.shape, n_points);
    for (const auto& p : curve.points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("network produced a non-finite contour");
    out.contour = to_contour(curve);

    const auto issues = inspect(out.contour);
    if (issues.self_intersecting)
        out.warnings.push_back({"geometry", "self_intersecting", "predicted contour self-intersects", std::nullopt,
                                std::nullopt});
    if (issues.below_bed)
        out.warnings.push_back({"geometry", "below_bed", "predicted contour dips below the print bed",
                                std::nullopt, std::nullopt});
    FeatureOptions fopt;
    fopt.require_simple = false;
    out.features = extract(out.contour, model.layers, fopt);
    for (const auto& d : out.features.diagnostics)
        out.warnings.push_back({"geometry", "pinch", d, std::nullopt, std::nullopt});

    out.printability = check_all(params, extras);
    for (auto& w : printability_warnings(out.printability)) out.warnings.push_back(std::move(w));
    return out;
}

// ---------------------------------------------------------------------------
// Model file (versioned JSON; weights row-major with explicit shapes)

inline nlohmann::json config_json(const NetworkConfig& c) {
    return {{"latent_dim", c.latent_dim},   {"residual_layers", c.residual_layers},
            {"harmonics", c.harmonics},     {"n_coefficients", c.outputs()},
            {"lambda", c.lambda},           {"noise_sigma", c.noise_sigma},
            {"batch_size", c.batch_size},   {"epochs", c.epochs},
            {"lr0", c.lr0},                 {"lr_min", c.lr_min},
            {"lr_schedule", "cosine"},      {"n_points", c.n_points},
            {"validate_every", c.validate_every}, {"target_harmonics", c.target_harmonics},
            {"beta1", c.beta1},             {"beta2", c.beta2},
            {"adam_eps", c.adam_eps},       {"weight_decay", c.weight_decay},
            {"input_scaling", scaling_name(c.input_scaling)},
            {"seed", c.seed}};
}

/// Applies the keys present in `j` on top of `base`; unknown keys are errors.
inline NetworkConfig config_from_json(const nlohmann::json& j, NetworkConfig base = {}) {
    if (!j.is_object()) throw FormatError("network config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        try {
            if (k == "latent_dim") base.latent_dim = v.get<int>();
            else if (k == "residual_layers") base.residual_layers = v.get<int>();
            else if (k == "harmonics") base.harmonics = v.get<int>();
            else if (k == "n_coefficients") base.harmonics = FourierShape::harmonics_for(v.get<int>());
            else if (k == "lambda") base.lambda = v.get<double>();
            else if (k == "noise_sigma") base.noise_sigma = v.get<double>();
            else if (k == "batch_size") base.batch_size = v.get<int>();
            else if (k == "epochs") base.epochs = v.get<int>();
            else if (k == "lr0") base.lr0 = v.get<double>();
            else if (k == "lr_min") base.lr_min = v.get<double>();
            else if (k == "lr_schedule") {
                if (v.get<std::string>() != "cosine") throw FormatError("only the cosine lr schedule is supported");
            } else if (k == "n_points") base.n_points = v.get<int>();
            else if (k == "validate_every") base.validate_every = v.get<int>();
            else if (k == "target_harmonics") base.target_harmonics = v.get<int>();
            else if (k == "beta1") base.beta1 = v.get<double>();
            else if (k == "beta2") base.beta2 = v.get<double>();
            else if (k == "adam_eps") base.adam_eps = v.get<double>();
            else if (k == "weight_decay") base.weight_decay = v.get<double>();
            else if (k == "input_scaling") base.input_scaling = parse_scaling(v.get<std::string>());
            else if (k == "seed") base.seed = v.get<std::uint64_t>();
            else throw FormatError("unknown network config key '" + k + "'");
        } catch (const nlohmann::json::exception&) {
            throw FormatError("network config key '" + k + "' has the wrong type");
        }
    }
    return base;
}

inline nlohmann::json model_json(const TrainedModel& m) {
    nlohmann::json weights = nlohmann::json::array();
    for (const auto& b : m.net.blocks()) {
        const auto mat = Network::block(std::as_const(m.net.params()), b);
        std::vector<double> row_major;
        row_major.reserve(static_cast<std::size_t>(b.size()));
        for (Eigen::Index r = 0; r < b.rows; ++r)
            for (Eigen::Index c = 0; c < b.cols; ++c) row_major.push_back(mat(r, c));
        weights.push_back({{"name", b.name}, {"shape", {b.rows, b.cols}}, {"data", row_major}});
    }
    std::vector<double> scale(m.net.output_scale().data(),
                              m.net.output_scale().data() + m.net.output_scale().size());
    return {{"format_version", kModelFormatVersion},
            {"kind", "shapegen-model"},
            {"layers", m.layers},
            {"config", config_json(m.config)},
            {"norm_stats", m.stats},
            {"output_scale", scale},
            {"weights", weights},
            {"training",
             {{"best_epoch", m.meta.best_epoch},
              {"best_validation_error", m.meta.best_validation_error},
              {"best_validation_error_mm", m.meta.best_validation_error_mm},
              {"epochs_run", m.meta.epochs_run},
              {"train_records", m.meta.train_records},
              {"validation_records", m.meta.validation_records}}}};
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (j.value("format_version", 0) != kModelFormatVersion || j.value("kind", "") != "shapegen-model")
        throw FormatError("not a supported model file");
    TrainedModel m;
    try {
        m.layers = j.at("layers").get<int>();
        if (m.layers != 1 && m.layers != 2) throw FormatError("model layers must be 1 or 2");
        nlohmann::json cfg = j.at("config");
        cfg.erase("n_coefficients");
        m.config = config_from_json(cfg);
        m.config.check();
        m.stats = j.at("norm_stats").get<NormStats>();
        m.net = Network(m.config.latent_dim, m.config.residual_layers, m.config.outputs());
        const auto scale = j.at("output_scale").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(scale.size()) != m.net.outputs())
            throw FormatError("output_scale has the wrong length");
        for (std::size_t k = 0; k < scale.size(); ++k) m.net.output_scale()(static_cast<Eigen::Index>(k)) = scale[k];
        const auto& weights = j.at("weights");
        if (weights.size() != m.net.blocks().size()) throw FormatError("weight block count mismatch");
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const auto& b = m.net.blocks()[i];
            const auto& w = weights[i];
            if (w.at("name").get<std::string>() != b.name) throw FormatError("unexpected weight block '" + w.at("name").get<std::string>() + "'");
            const auto shape = w.at("shape").get<std::vector<Eigen::Index>>();
            if (shape.size() != 2 || shape[0] != b.rows || shape[1] != b.cols)
                throw FormatError("shape mismatch for weight block '" + b.name + "'");
            const auto data = w.at("data").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(data.size()) != b.size())
                throw FormatError("data length mismatch for weight block '" + b.name + "'");
            auto mat = m.net.mat(i);
            std::size_t k = 0;
            for (Eigen::Index r = 0; r < b.rows; ++r)
                for (Eigen::Index c = 0; c < b.cols; ++c) mat(r, c) = data[k++];
        }
        if (!m.net.finite()) throw FormatError("model contains non-finite weights");
        const auto& t = j.at("training");
        m.meta.best_epoch = t.value("best_epoch", 0);
        m.meta.best_validation_error = t.value("best_validation_error", 0.0);
        m.meta.best_validation_error_mm = t.value("best_validation_error_mm", 0.0);
        m.meta.epochs_run = t.value("epochs_run", 0);
        m.meta.train_records = t.value("train_records", std::size_t{0});
        m.meta.validation_records = t.value("validation_records", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
    return m;
}

inline void save_model(const TrainedModel& m, const std::string& path) {
    write_text_file(path, model_json(m).dump() + "\n");
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file '" + path + "'");
    try {
        return model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
}

} // namespace shapegen
