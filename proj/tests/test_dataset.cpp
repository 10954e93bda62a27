#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "shapegen/dataset.hpp"

using namespace shapegen;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(SplitCounts, Proportional) {
    const auto c = split_counts(184, SplitRatios{});
    EXPECT_EQ(c.train, 154u);
    EXPECT_EQ(c.validation, 14u);
    EXPECT_EQ(c.test, 16u);
    const auto d = split_counts(172, SplitRatios::for_layers(2));
    EXPECT_EQ(d.train, 154u);
    EXPECT_EQ(d.validation, 12u);
    EXPECT_EQ(d.test, 6u);
    const auto e = split_counts(3, SplitRatios{});
    EXPECT_EQ(e.train + e.validation + e.test, 3u);
    EXPECT_GE(e.train, 1u);
    EXPECT_THROW(split_counts(10, SplitRatios{0, 0, 0}), DomainError);
}

TEST(BuildDataset, DefaultSingleLayer) {
    DatasetOptions o;
    o.seed = 0;
    const auto ds = build_dataset(o);
    EXPECT_GE(ds.records.size(), 150u);
    EXPECT_LE(ds.records.size(), 184u);
    const auto expected = split_counts(ds.records.size(), SplitRatios{});
    EXPECT_EQ(ds.subset(Split::train).size(), expected.train);
    EXPECT_EQ(ds.subset(Split::validation).size(), expected.validation);
    EXPECT_EQ(ds.subset(Split::test).size(), expected.test);
    std::set<std::string> ids;
    for (const auto& r : ds.records) {
        EXPECT_TRUE(ids.insert(r.id).second);
        EXPECT_FALSE(check_all(r.params).any_flagged());
        EXPECT_EQ(r.inputs.as_array(), to_dimensionless(r.params).as_array());
        EXPECT_TRUE(inspect(r.contour).ok());
    }
}

TEST(BuildDataset, CollapsedBounds) {
    DatasetOptions o;
    o.count = 12;
    for (std::size_t i = 0; i < 7; ++i) {
        const double v = fixtures::kN1.as_array()[i];
        o.bounds[i] = {v, v};
    }
    const auto ds = build_dataset(o);
    ASSERT_EQ(ds.records.size(), 12u);
    for (const auto& r : ds.records) EXPECT_EQ(r.params.as_array(), fixtures::kN1.as_array());
    std::size_t total = 0;
    for (auto s : {Split::train, Split::validation, Split::test}) total += ds.subset(s).size();
    EXPECT_EQ(total, 12u);
}

TEST(BuildDataset, Errors) {
    DatasetOptions o;
    o.count = 9;
    EXPECT_THROW(build_dataset(o), DomainError);
    o.count = 20;
    o.layers = 3;
    EXPECT_THROW(build_dataset(o), DomainError);
    // Every sample buckles: v* <= 0.1 while 1 - phi/h >= 0.8.
    o = DatasetOptions{};
    o.count = 20;
    o.bounds[3] = {5, 6};
    o.bounds[4] = {30, 30};
    o.bounds[5] = {10, 10};
    o.bounds[6] = {100, 300};
    EXPECT_THROW(build_dataset(o), DomainError);
}

TEST(Persistence, RoundTripAndDeterminism) {
    DatasetOptions o;
    o.count = 40;
    o.layers = 2;
    o.seed = 17;
    const auto dir_a = fixtures::temp_dir("dataset_a"), dir_b = fixtures::temp_dir("dataset_b");
    write_dataset(build_dataset(o), dir_a);
    write_dataset(build_dataset(o), dir_b);
    EXPECT_EQ(slurp(dir_a / "manifest.json"), slurp(dir_b / "manifest.json"));

    const auto original = build_dataset(o);
    const auto back = read_dataset(dir_a);
    EXPECT_EQ(back.layers, 2);
    ASSERT_EQ(back.records.size(), original.records.size());
    for (std::size_t i = 0; i < back.records.size(); ++i) {
        const auto& a = original.records[i];
        const auto& b = back.records[i];
        EXPECT_EQ(a.id, b.id);
        EXPECT_EQ(a.split, b.split);
        EXPECT_EQ(a.params.as_array(), b.params.as_array());
        ASSERT_EQ(a.contour.size(), b.contour.size());
        for (std::size_t k = 0; k < a.contour.size(); ++k) EXPECT_EQ(a.contour[k], b.contour[k]);
    }
    const auto manifest = nlohmann::json::parse(slurp(dir_a / "manifest.json"));
    EXPECT_EQ(manifest["format_version"], 1);
    EXPECT_EQ(manifest["records"][0]["contour"], original.records[0].id + ".txt");
}

TEST(Persistence, RejectsBadManifest) {
    const auto dir = fixtures::temp_dir("dataset_bad");
    EXPECT_THROW(read_dataset(dir), FormatError);
    write_text_file((dir / "manifest.json").string(), "{\"format_version\": 2}");
    EXPECT_THROW(read_dataset(dir), FormatError);
    write_text_file((dir / "manifest.json").string(), "{not json");
    EXPECT_THROW(read_dataset(dir), FormatError);
}

TEST(Split, Names) {
    for (auto s : {Split::train, Split::validation, Split::test}) EXPECT_EQ(parse_split(split_name(s)), s);
    EXPECT_THROW(parse_split("holdout"), FormatError);
}
