#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "urbanpulse/error.hpp"
#include "urbanpulse/pipeline.hpp"

using namespace urbanpulse;
using namespace urbanpulse::pipeline;
namespace fs = std::filesystem;

namespace {

const fs::path kCity = fs::path(URBANPULSE_DATA_DIR) / "fixtures" / "city";

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("urbanpulse-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

PipelineConfig city(const fs::path& out) {
    auto cfg = PipelineConfig::load(kCity / "config.json");
    cfg.out = out;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(URBANPULSE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, LoadsAndResolvesRelativePaths) {
    const auto cfg = PipelineConfig::load(kCity / "config.json");
    EXPECT_TRUE(cfg.checkins.is_absolute());
    EXPECT_EQ(cfg.checkins.filename(), "checkins_2017.csv");
    EXPECT_EQ(cfg.dbscan.min_pts, 10u);
    EXPECT_EQ(cfg.dbscan.eps.value(), 250.0);
    EXPECT_EQ(cfg.share_subset, (std::set<std::string>{"C", "D"}));
    EXPECT_EQ(cfg.date_from, "2016-06-01");
}

TEST(Config, RejectsBadValues) {
    PipelineConfig cfg;
    EXPECT_THROW(cfg.set("eps", "-5"), ConfigError);
    EXPECT_THROW(cfg.set("eps", "abc"), ConfigError);
    EXPECT_THROW(cfg.set("min_pts", "0"), ConfigError);
    EXPECT_THROW(cfg.set("bogus", "1"), ConfigError);
    EXPECT_THROW(PipelineConfig::from_json(nlohmann::json{{"colour", "red"}}), ConfigError);
    EXPECT_NO_THROW(cfg.set("min_pts", "5"));
    EXPECT_EQ(cfg.dbscan.min_pts, 5u);
}

TEST(Pipeline, ClusterStageOnCity) {
    TempDir tmp;
    const auto result = cmd_cluster(city(tmp.path()));
    EXPECT_EQ(result.outputs.size(), 2u);
    const auto geojson = nlohmann::json::parse(slurp(tmp.path() / "clusters.geojson"));
    EXPECT_EQ(geojson["type"], "FeatureCollection");
    std::set<std::string> names;
    for (const auto& f : geojson["features"]) {
        if (f["properties"]["kind"] == "member") {
            names.insert(f["properties"]["cluster"].get<std::string>());
        }
    }
    EXPECT_EQ(names, (std::set<std::string>{"A", "B", "C", "D", "E", "F", "G", "H"}));
    for (const auto& entry : fs::directory_iterator(tmp.path())) {
        EXPECT_NE(entry.path().extension(), ".partial");
    }
}

TEST(Pipeline, MinPtsAboveDatasetSizeIsAllNoise) {
    TempDir tmp;
    auto cfg = city(tmp.path());
    cfg.dbscan.min_pts = 100'000;
    cmd_cluster(cfg);
    const auto summary = slurp(tmp.path() / "clusters_summary.csv");
    EXPECT_EQ(summary, "cluster,size,core_points,centroid_lat,centroid_lon\n");
    const auto geojson = nlohmann::json::parse(slurp(tmp.path() / "clusters.geojson"));
    for (const auto& f : geojson["features"]) {
        EXPECT_EQ(f["properties"]["kind"], "noise");
    }
}

TEST(Pipeline, EmptyDatasetRaises) {
    TempDir tmp;
    write(tmp.path() / "empty.csv", "user_id,venue_id,beer_style,lat,lon,timestamp\n");
    auto cfg = city(tmp.path() / "out");
    cfg.checkins = tmp.path() / "empty.csv";
    EXPECT_THROW(cmd_cluster(cfg), EmptyDatasetError);
    EXPECT_FALSE(fs::exists(tmp.path() / "out" / "clusters.geojson"));
}

TEST(Pipeline, MissingCategoryMapIsConfigError) {
    TempDir tmp;
    auto cfg = city(tmp.path());
    cfg.category_map.clear();
    EXPECT_THROW(cmd_enrich(cfg), ConfigError);
}

TEST(Pipeline, UnknownShareSubsetFails) {
    TempDir tmp;
    auto cfg = city(tmp.path() / "out");
    cfg.share_subset = {"C", "Q"};
    EXPECT_THROW(cmd_enrich(cfg), Error);
    EXPECT_FALSE(fs::exists(tmp.path() / "out" / "category_counts.json"));
}

TEST(Pipeline, FailureLeavesNoOutputs) {
    TempDir tmp;
    write(tmp.path() / "bad.tsv", "great\t+9\n");
    auto cfg = city(tmp.path() / "out");
    cfg.lexicon = tmp.path() / "bad.tsv";
    EXPECT_THROW(cmd_pipeline(cfg), ParseError);
    if (fs::exists(tmp.path() / "out")) {
        EXPECT_TRUE(fs::is_empty(tmp.path() / "out"));
    }
}

TEST(Pipeline, ReactOutputsAndManifest) {
    TempDir tmp;
    cmd_pipeline(city(tmp.path()));
    const auto sentiment = nlohmann::json::parse(slurp(tmp.path() / "sentiment.json"));
    EXPECT_LT(sentiment["all"]["mean"].get<double>(), 0.0);
    EXPECT_LT(sentiment["quartiles"][0]["mean"].get<double>(), 0.0);
    EXPECT_GT(sentiment["zero_similarity_count"].get<int>(), 0);
    const auto manifest = nlohmann::json::parse(slurp(tmp.path() / "manifest.json"));
    ASSERT_EQ(manifest["stages"].size(), 4u);
    for (const auto& stage : manifest["stages"]) {
        for (const auto& [name, digest] : stage["outputs"].items()) {
            EXPECT_EQ(digest.get<std::string>(), sha256_file(tmp.path() / name));
        }
    }
    EXPECT_EQ(manifest["inputs"]["checkins"]["file"], "checkins_2017.csv");
}

TEST(Sha256, KnownDigest) {
    TempDir tmp;
    write(tmp.path() / "abc", "abc");
    EXPECT_EQ(sha256_file(tmp.path() / "abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Articles, SeparatedByDashes) {
    TempDir tmp;
    write(tmp.path() / "a.txt", "first article\nline two\n---\n\n---\nsecond\n");
    const auto a = read_articles(tmp.path() / "a.txt");
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[1], "second");
}

TEST(Cli, ExitCodes) {
    TempDir tmp;
    const std::string config = "--config " + (kCity / "config.json").string();
    const std::string out = " --out " + (tmp.path() / "out").string();
    EXPECT_EQ(run_cli("cluster " + config + out), 0);
    EXPECT_EQ(run_cli("cluster " + config + out + " --min-pts 100000"), 0);

    write(tmp.path() / "empty.csv", "user_id,venue_id,beer_style,lat,lon,timestamp\n");
    EXPECT_EQ(run_cli("cluster " + config + out + " --checkins " + (tmp.path() / "empty.csv").string()), 3);
    EXPECT_EQ(run_cli("enrich " + config + out + " --category-map " + (tmp.path() / "none.tsv").string()), 2);
    EXPECT_EQ(run_cli("cluster " + config + out + " --eps -1"), 2);
    EXPECT_EQ(run_cli("cluster " + config + out + " --checkins " + (tmp.path() / "missing.csv").string()), 2);
    EXPECT_NE(run_cli("frobnicate"), 0);
}

TEST(Cli, FullPipelineWritesAllOutputs) {
    TempDir tmp;
    ASSERT_EQ(run_cli("pipeline --config " + (kCity / "config.json").string() + " --out " + tmp.path().string()),
              0);
    for (const char* name : {"clusters.geojson", "clusters_summary.csv", "cluster_stats.csv", "category_counts.json",
                             "site_matrix.csv", "site_ranking.csv", "ranked_comments.csv", "sentiment.json",
                             "manifest.json"}) {
        EXPECT_TRUE(fs::exists(tmp.path() / name)) << name;
    }
}
