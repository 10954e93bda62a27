// shapegen command-line tool.
//
// Exit codes: 0 success, 1 domain or data error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapegen/dataset.hpp"
#include "shapegen/features.hpp"
#include "shapegen/fourier.hpp"
#include "shapegen/model.hpp"
#include "shapegen/printability.hpp"
#include "shapegen/service.hpp"

namespace sg = shapegen;
using nlohmann::json;

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Random seed");
    app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--out", c.out, "Output path (stdout when omitted)");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sg::FormatError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw sg::FormatError(path + ": " + e.what());
    }
}

/// Section `name` of the --config file, or an empty object.
json config_section(const Common& c, const char* name) {
    if (c.config.empty()) return json::object();
    const json j = read_json_file(c.config);
    if (!j.is_object()) throw sg::FormatError(c.config + ": config must be a JSON object");
    return j.contains(name) ? j.at(name) : json::object();
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) std::cout << text;
    else sg::write_text_file(c.out, text);
}

/// Print parameters from individual flags or a JSON file.
struct ParamArgs {
    std::array<double, 7> values{};
    std::array<bool, 7> given{};
    std::string file;
    std::optional<double> g;

    void add(CLI::App* app) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            const std::string name(sg::PrintParams::kNames[i]);
            app->add_option_function<double>(
                "--" + name, [this, i](double v) { values[i] = v, given[i] = true; }, name);
        }
        app->add_option("--params", file, "JSON file with rho, mu, tau0, phi_n, h_n, v_p, u_f");
        app->add_option("--G", g, "Shear modulus G in Pa (enables tearing checks)");
    }

    sg::PrintParams resolve() const {
        std::array<double, 7> a{};
        if (!file.empty()) a = read_json_file(file).get<sg::PrintParams>().as_array();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (given[i]) a[i] = values[i];
            else if (file.empty())
                throw CLI::RequiredError("--" + std::string(sg::PrintParams::kNames[i]));
        }
        return sg::PrintParams::from_array(a);
    }

    sg::RheologyExtras extras(const json& section) const {
        auto e = sg::extras_from_json(section);
        if (g) e.shear_modulus = *g;
        e.check();
        return e;
    }
};

sg::DatasetOptions dataset_options(const json& j, sg::DatasetOptions o) {
    if (!j.is_object()) throw sg::FormatError("dataset config must be a JSON object");
    try {
        if (j.contains("count")) o.count = j["count"].get<std::size_t>();
        if (j.contains("layers")) o.layers = j["layers"].get<int>();
        if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("split_ratios")) {
            const auto& r = j["split_ratios"];
            o.ratios = sg::SplitRatios{r.at("train").get<double>(), r.at("validation").get<double>(),
                                       r.at("test").get<double>()};
        }
        if (j.contains("surrogate")) {
            const auto& s = j["surrogate"];
            o.surrogate.penetration = s.value("penetration", o.surrogate.penetration);
            o.surrogate.top_width_scale = s.value("top_width_scale", o.surrogate.top_width_scale);
            o.surrogate.points_per_half = s.value("points_per_half", o.surrogate.points_per_half);
        }
    } catch (const json::exception& e) {
        throw sg::FormatError(std::string("dataset config: ") + e.what());
    }
    return o;
}

std::string train_summary(const sg::TrainedModel& m, const sg::TrainReport& r) {
    json j{{"best_epoch", r.best_epoch},
           {"best_validation_error", m.meta.best_validation_error},
           {"best_validation_error_mm", m.meta.best_validation_error_mm},
           {"final_train_loss", r.train_loss.empty() ? 0.0 : r.train_loss.back()},
           {"epochs", m.meta.epochs_run},
           {"train_records", m.meta.train_records},
           {"validation_records", m.meta.validation_records}};
    return j.dump(2) + "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-section prediction for extrusion-based concrete printing"};
    app.require_subcommand(1);

    // dataset generate
    Common ds_common;
    sg::DatasetOptions ds_opt;
    std::size_t ds_count = ds_opt.count;
    int ds_layers = ds_opt.layers;
    auto* dataset = app.add_subcommand("dataset", "Surrogate dataset tools");
    dataset->require_subcommand(1);
    auto* generate = dataset->add_subcommand("generate", "Generate an LHS surrogate dataset");
    add_common(generate, ds_common);
    generate->add_option("--count", ds_count, "Number of LHS samples");
    generate->add_option("--layers", ds_layers, "Layers (1 or 2)")->check(CLI::IsMember({1, 2}));

    // fourier fit / sample
    Common ff_common, fs_common;
    std::string ff_in, fs_in;
    int ff_harmonics = 8;
    std::size_t fs_points = sg::kDefaultPredictPoints;
    auto* fourier = app.add_subcommand("fourier", "Fourier descriptor tools");
    fourier->require_subcommand(1);
    auto* ffit = fourier->add_subcommand("fit", "Fit a FourierShape to a contour file");
    add_common(ffit, ff_common);
    ffit->add_option("input", ff_in, "Contour file (x,y per line)")->required()->check(CLI::ExistingFile);
    ffit->add_option("--harmonics,-N", ff_harmonics, "Harmonic count N (2N-1 coefficients)");
    auto* fsample = fourier->add_subcommand("sample", "Sample a FourierShape JSON into a contour");
    add_common(fsample, fs_common);
    fsample->add_option("input", fs_in, "FourierShape JSON file")->required()->check(CLI::ExistingFile);
    fsample->add_option("--points", fs_points, "Sample count");

    // train
    Common tr_common;
    std::string tr_dataset, tr_report;
    std::optional<int> tr_epochs;
    auto* train = app.add_subcommand("train", "Train a model on a dataset directory");
    add_common(train, tr_common);
    train->add_option("dataset", tr_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    train->add_option("--epochs", tr_epochs, "Override the epoch count");
    train->add_option("--report", tr_report, "Write per-epoch losses and validations as JSON");

    // predict
    Common pr_common;
    ParamArgs pr_params;
    std::string pr_model;
    bool pr_json = false, pr_strict = false;
    std::size_t pr_points = sg::kDefaultPredictPoints;
    auto* predict = app.add_subcommand("predict", "Predict a cross-section");
    add_common(predict, pr_common);
    predict->add_option("--model", pr_model, "Model file")->required()->check(CLI::ExistingFile);
    pr_params.add(predict);
    predict->add_option("--points", pr_points, "Contour sample count");
    predict->add_flag("--json", pr_json, "Full JSON response instead of contour text");
    predict->add_flag("--strict", pr_strict, "Reject out-of-range inputs");

    // features
    Common fe_common;
    std::string fe_in;
    int fe_layers = 1;
    bool fe_csv = false;
    auto* features = app.add_subcommand("features", "Extract features from a contour file");
    add_common(features, fe_common);
    features->add_option("input", fe_in, "Contour file")->required()->check(CLI::ExistingFile);
    features->add_option("--layers", fe_layers, "Layers (1 or 2)")->check(CLI::IsMember({1, 2}));
    features->add_flag("--csv", fe_csv, "CSV output");

    // check
    Common ck_common;
    ParamArgs ck_params;
    auto* check = app.add_subcommand("check", "Screen parameters for deposition failure modes");
    add_common(check, ck_common);
    ck_params.add(check);

    // serve
    Common sv_common;
    std::vector<std::string> sv_models;
    std::string sv_host = "127.0.0.1";
    int sv_port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve /predict, /ranges and /health over HTTP");
    add_common(serve, sv_common);
    serve->add_option("--model", sv_models, "Model file (one per layer count)")->required()->check(CLI::ExistingFile);
    serve->add_option("--host", sv_host, "Bind address");
    serve->add_option("--port", sv_port, "Port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*generate) {
            auto opt = dataset_options(config_section(ds_common, "dataset"), ds_opt);
            if (generate->count("--count")) opt.count = ds_count;
            if (generate->count("--layers")) opt.layers = ds_layers;
            if (ds_common.seed) opt.seed = *ds_common.seed;
            if (ds_common.out.empty()) throw CLI::RequiredError("--out");
            const auto ds = sg::build_dataset(opt);
            sg::write_dataset(ds, ds_common.out);
            std::cerr << ds.records.size() << " of " << opt.count << " samples printable; written to "
                      << ds_common.out << "\n";
        } else if (*ffit) {
            const auto r = sg::fit(sg::read_contour_file(ff_in), ff_harmonics);
            json j = r.shape;
            j["residual"] = r.residual;
            emit(ff_common, j.dump(2) + "\n");
        } else if (*fsample) {
            const auto shape = read_json_file(fs_in).get<sg::FourierShape>();
            emit(fs_common, sg::format_contour(sg::to_contour(sg::sample(shape, fs_points))));
        } else if (*train) {
            const auto ds = sg::read_dataset(tr_dataset);
            auto cfg = sg::config_from_json(config_section(tr_common, "network"),
                                            sg::NetworkConfig::for_layers(ds.layers));
            if (tr_epochs) cfg.epochs = *tr_epochs;
            if (tr_common.seed) cfg.seed = *tr_common.seed;
            if (tr_common.out.empty()) throw CLI::RequiredError("--out");
            const auto [model, report] = sg::train(ds, cfg);
            sg::save_model(model, tr_common.out);
            if (!tr_report.empty()) {
                json v = json::array();
                for (const auto& x : report.validations)
                    v.push_back({{"epoch", x.epoch}, {"error", x.error}, {"error_mm", x.error_mm}});
                sg::write_text_file(tr_report,
                                    json{{"train_loss", report.train_loss}, {"validations", v},
                                         {"best_epoch", report.best_epoch}}
                                            .dump(2) + "\n");
            }
            std::cerr << train_summary(model, report);
        } else if (*predict) {
            const auto model = sg::load_model(pr_model);
            const auto params = pr_params.resolve();
            const auto extras = pr_params.extras(config_section(pr_common, "extras"));
            const auto p = sg::predict(model, params, pr_points, extras,
                                       pr_strict ? sg::ValidationMode::strict : sg::ValidationMode::warn);
            if (pr_json) {
                emit(pr_common, sg::prediction_json(model, p).dump(2) + "\n");
            } else {
                emit(pr_common, sg::format_contour(p.contour));
                for (const auto& w : p.warnings) std::cerr << "warning: " << w.message << "\n";
            }
        } else if (*features) {
            const auto f = sg::extract(sg::read_contour_file(fe_in), fe_layers);
            emit(fe_common, fe_csv ? sg::features_csv(f) : sg::features_json(f).dump(2) + "\n");
        } else if (*check) {
            const auto params = ck_params.resolve();
            const auto extras = ck_params.extras(config_section(ck_common, "extras"));
            emit(ck_common, sg::report_json(sg::check_all(params, extras)).dump(2) + "\n");
        } else if (*serve) {
            sg::Service service;
            for (const auto& path : sv_models) service.load(sg::load_model(path));
            const json section = config_section(sv_common, "serve");
            const std::string host = serve->count("--host") ? sv_host : section.value("host", sv_host);
            const int port = serve->count("--port") ? sv_port : section.value("port", sv_port);
            std::cerr << "listening on http://" << host << ":" << port << "\n";
            sg::serve(service, host, port);
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const sg::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sg::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
