#pragma once

// Surrogate dataset: LHS parameter sets, generated contours and a
// train/validation/test split, persisted as a directory holding
// manifest.json plus one contour text file per record.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapegen/contour.hpp"
#include "shapegen/params.hpp"
#include "shapegen/random.hpp"
#include "shapegen/surrogate.hpp"

namespace shapegen {

inline constexpr int kDatasetFormatVersion = 1;

enum class Split { train, validation, test };

inline const char* split_name(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
    }
    return "train";
}

inline Split parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "validation") return Split::validation;
    if (s == "test") return Split::test;
    throw FormatError("unknown split tag '" + s + "'");
}

/// Relative split weights; defaults follow 154:14:16 (one layer).
struct SplitRatios {
    double train = 154.0;
    double validation = 14.0;
    double test = 16.0;

    static SplitRatios for_layers(int layers) {
        return layers == 2 ? SplitRatios{154.0, 12.0, 6.0} : SplitRatios{};
    }
};

struct DatasetRecord {
    std::string id;
    PrintParams params;
    ModelInputs inputs;
    int layers = 1;
    Contour contour;
    Split split = Split::train;

    std::string contour_file() const { return id + ".txt"; }
};

struct Dataset {
    int layers = 1;
    std::uint64_t seed = 0;
    std::size_t requested = 0;
    ParamBounds bounds = kRawBounds;
    SplitRatios ratios;
    SurrogateConfig surrogate;
    std::vector<DatasetRecord> records;

    std::vector<const DatasetRecord*> subset(Split s) const {
        std::vector<const DatasetRecord*> out;
        for (const auto& r : records)
            if (r.split == s) out.push_back(&r);
        return out;
    }
};

struct SplitCounts {
    std::size_t train = 0, validation = 0, test = 0;
};

/// Proportional split sizes; train keeps the remainder and at least one record.
inline SplitCounts split_counts(std::size_t total, const SplitRatios& ratios) {
    const double sum = ratios.train + ratios.validation + ratios.test;
    if (!(sum > 0.0) || ratios.train < 0 || ratios.validation < 0 || ratios.test < 0)
        throw DomainError("split ratios must be non-negative with a positive sum", "split");
    SplitCounts c;
    c.validation = static_cast<std::size_t>(std::lround(static_cast<double>(total) * ratios.validation / sum));
    c.test = static_cast<std::size_t>(std::lround(static_cast<double>(total) * ratios.test / sum));
    while (c.validation + c.test >= total && (c.validation > 0 || c.test > 0))
        (c.test >= c.validation ? c.test : c.validation) -= 1;
    c.train = total - c.validation - c.test;
    return c;
}

struct DatasetOptions {
    std::size_t count = 184;
    int layers = 1;
    ParamBounds bounds = kRawBounds;
    std::optional<SplitRatios> ratios; // defaults per layer count
    std::uint64_t seed = 0;
    SurrogateConfig surrogate;
};

inline Dataset build_dataset(const DatasetOptions& opt) {
    if (opt.count < 10) throw DomainError("dataset size must be >= 10", "count");
    if (opt.layers != 1 && opt.layers != 2) throw DomainError("layers must be 1 or 2", "layers");

    Dataset ds;
    ds.layers = opt.layers;
    ds.seed = opt.seed;
    ds.requested = opt.count;
    ds.bounds = opt.bounds;
    ds.ratios = opt.ratios.value_or(SplitRatios::for_layers(opt.layers));
    ds.surrogate = opt.surrogate;

    const auto samples = lhs_sample(opt.bounds, opt.count, opt.seed);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (check_all(samples[i]).any_flagged()) continue; // failed deposition, excluded
        DatasetRecord rec;
        char id[32];
        std::snprintf(id, sizeof id, "rec_%04zu", i);
        rec.id = id;
        rec.params = samples[i];
        rec.inputs = to_dimensionless(samples[i]);
        rec.layers = opt.layers;
        rec.contour = surrogate_contour(samples[i], opt.layers, opt.surrogate);
        ds.records.push_back(std::move(rec));
    }
    if (ds.records.size() < 3)
        throw DomainError("only " + std::to_string(ds.records.size()) +
                          " printable records; at least 3 are required");

    const auto counts = split_counts(ds.records.size(), ds.ratios);
    Rng rng(opt.seed ^ 0x5157u);
    const auto order = rng.permutation(ds.records.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        Split s = Split::train;
        if (k < counts.test) s = Split::test;
        else if (k < counts.test + counts.validation) s = Split::validation;
        ds.records[order[k]].split = s;
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::json manifest_json(const Dataset& ds) {
    nlohmann::json bounds = nlohmann::json::object();
    for (std::size_t i = 0; i < ds.bounds.size(); ++i)
        bounds[std::string(PrintParams::kNames[i])] = ds.bounds[i];
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : ds.records) {
        records.push_back({{"id", r.id},
                           {"params", r.params},
                           {"inputs", r.inputs},
                           {"layers", r.layers},
                           {"contour", r.contour_file()},
                           {"split", split_name(r.split)}});
    }
    return {{"format_version", kDatasetFormatVersion},
            {"layers", ds.layers},
            {"seed", ds.seed},
            {"requested", ds.requested},
            {"bounds", bounds},
            {"split_ratios",
             {{"train", ds.ratios.train}, {"validation", ds.ratios.validation}, {"test", ds.ratios.test}}},
            {"surrogate",
             {{"penetration", ds.surrogate.penetration},
              {"top_width_scale", ds.surrogate.top_width_scale},
              {"points_per_half", ds.surrogate.points_per_half}}},
            {"records", records}};
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& r : ds.records)
        write_text_file((dir / r.contour_file()).string(), format_contour(r.contour));
    write_text_file((dir / "manifest.json").string(), manifest_json(ds).dump(2) + "\n");
}

inline Dataset read_dataset(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw FormatError("cannot open '" + (dir / "manifest.json").string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest.json: ") + e.what());
    }
    if (j.value("format_version", 0) != kDatasetFormatVersion)
        throw FormatError("manifest.json: unsupported format_version");
    Dataset ds;
    try {
        ds.layers = j.at("layers").get<int>();
        ds.seed = j.value("seed", std::uint64_t{0});
        ds.requested = j.value("requested", std::size_t{0});
        if (j.contains("bounds")) {
            for (std::size_t i = 0; i < ds.bounds.size(); ++i) {
                const auto& b = j.at("bounds").at(std::string(PrintParams::kNames[i]));
                ds.bounds[i] = {b.at(0).get<double>(), b.at(1).get<double>()};
            }
        }
        if (j.contains("split_ratios")) {
            const auto& r = j.at("split_ratios");
            ds.ratios = {r.at("train").get<double>(), r.at("validation").get<double>(),
                         r.at("test").get<double>()};
        }
        if (j.contains("surrogate")) {
            const auto& s = j.at("surrogate");
            ds.surrogate.penetration = s.value("penetration", ds.surrogate.penetration);
            ds.surrogate.top_width_scale = s.value("top_width_scale", ds.surrogate.top_width_scale);
            ds.surrogate.points_per_half = s.value("points_per_half", ds.surrogate.points_per_half);
        }
        for (const auto& rj : j.at("records")) {
            DatasetRecord r;
            r.id = rj.at("id").get<std::string>();
            r.params = rj.at("params").get<PrintParams>();
            r.inputs = rj.at("inputs").get<ModelInputs>();
            r.layers = rj.at("layers").get<int>();
            r.split = parse_split(rj.at("split").get<std::string>());
            r.contour = read_contour_file((dir / rj.at("contour").get<std::string>()).string());
            ds.records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest.json: ") + e.what());
    }
    return ds;
}

} // namespace shapegen
