#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "urbanpulse/cluster.hpp"
#include "urbanpulse/geo.hpp"
#include "urbanpulse/textrank.hpp"

namespace up = urbanpulse;

namespace {

std::vector<up::geo::GeoPoint> city_points(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> blob(0.0, 0.002);
    std::uniform_real_distribution<double> spread(-0.05, 0.05);
    std::uniform_int_distribution<int> which(0, 9);
    std::vector<up::geo::GeoPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int k = which(rng);
        const double clat = -25.43 + 0.004 * k;
        const double clon = -49.27 + 0.006 * (k % 5);
        if (i % 5 == 0) {
            pts.emplace_back(-25.43 + spread(rng), -49.27 + spread(rng));
        } else {
            pts.emplace_back(clat + blob(rng), clon + blob(rng));
        }
    }
    return pts;
}

void BM_Dbscan(benchmark::State& state) {
    const auto pts = city_points(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(up::cluster::dbscan(pts, {up::geo::Meters(250), 10}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond);

void BM_UnionBufferArea(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> jitter(0.0, 0.002);
    std::vector<up::geo::GeoPoint> members;
    for (int i = 0; i < state.range(0); ++i) {
        members.emplace_back(-25.43 + jitter(rng), -49.27 + jitter(rng));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(up::geo::union_buffer_area(members, up::geo::Meters(200)));
    }
}
BENCHMARK(BM_UnionBufferArea)->RangeMultiplier(4)->Range(1, 256)->Unit(benchmark::kMillisecond);

void BM_RankComments(benchmark::State& state) {
    const std::vector<std::string> words{"cerveja", "rua",    "artesanal", "bairro", "prefeitura", "festa",
                                         "bar",     "transito", "barulho", "projeto", "cidade",    "noite"};
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(3, 30);
    up::textrank::LanguageConfig lang;
    std::vector<up::ingest::Comment> comments(static_cast<std::size_t>(state.range(0)));
    std::vector<up::textrank::TokenSequence> corpus;
    for (std::size_t i = 0; i < comments.size(); ++i) {
        comments[i].comment_id = "c" + std::to_string(i);
        for (std::size_t k = len(rng); k > 0; --k) {
            comments[i].text += words[pick(rng)] + " ";
        }
        corpus.push_back(up::textrank::normalize(comments[i].text, lang));
    }
    std::vector<std::string> articles(8, "cerveja artesanal rua projeto prefeitura bairro");
    const auto topic = up::textrank::build_topic_profile(articles, corpus, lang);
    for (auto _ : state) {
        benchmark::DoNotOptimize(up::textrank::rank_comments(comments, topic, lang));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RankComments)->RangeMultiplier(8)->Range(64, 4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
