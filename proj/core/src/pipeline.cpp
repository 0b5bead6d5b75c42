#include "urbanpulse/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "urbanpulse/delimited.hpp"
#include "urbanpulse/enrich.hpp"
#include "urbanpulse/ingest.hpp"
#include "urbanpulse/text.hpp"
#include "urbanpulse/textrank.hpp"

namespace urbanpulse::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kPathKeys{
    "checkins", "checkins_schema", "reports", "reports_schema", "comments", "comments_schema",
    "articles", "category_map",    "lexicon", "language",       "annotations", "out",
};

// Stages write into <name>.partial files and rename them only once every
// output of the run exists; anything left uncommitted is deleted.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;

    ~OutputSet() {
        if (committed_) {
            return;
        }
        std::error_code ec;
        for (const auto& name : names_) {
            fs::remove(partial(name), ec);
        }
    }

    void write(const std::string& name, const std::string& content) {
        if (names_.empty()) {
            std::error_code ec;
            fs::create_directories(dir_, ec);
            if (ec) {
                throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
            }
        }
        std::ofstream out(partial(name), std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + partial(name).string());
        }
        names_.push_back(name);
        out << content;
        out.close();
        if (!out) {
            throw Error("failed writing " + partial(name).string());
        }
    }

    std::vector<fs::path> commit() {
        std::vector<fs::path> done;
        for (const auto& name : names_) {
            fs::rename(partial(name), dir_ / name);
            done.push_back(dir_ / name);
        }
        committed_ = true;
        return done;
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path partial(const std::string& name) const { return dir_ / (name + ".partial"); }

    fs::path dir_;
    std::vector<std::string> names_;
    bool committed_ = false;
};

const fs::path& require(const fs::path& p, const char* key) {
    if (p.empty()) {
        throw ConfigError(std::string("missing required setting '") + key + "'");
    }
    if (!fs::exists(p)) {
        throw ConfigError(std::string("'") + key + "' not found: " + p.string());
    }
    return p;
}

ingest::Schema schema_or_default(const fs::path& p, const char* key) {
    if (p.empty()) {
        return {};
    }
    return ingest::Schema::load(require(p, key));
}

std::string num(double v) {
    return fmt::format("{}", v);
}

double parse_number(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
        throw ConfigError("'" + key + "' must be a number, got '" + value + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("'" + key + "' must be a non-negative integer, got '" + value + "'");
    }
    return v;
}

json distribution_json(const sentiment::Distribution& d) {
    json bins = json::array();
    for (int p = -4; p <= 4; ++p) {
        bins.push_back({{"polarity", p}, {"count", d.at(p)}});
    }
    return json{{"n", d.n}, {"sum", d.sum}, {"mean", d.mean()}, {"bins", bins}};
}

// ---------------------------------------------------------------- cluster

struct ClusterRun {
    std::vector<ingest::CheckIn> checkins;
    std::vector<geo::GeoPoint> points;
    cluster::ClusterAssignment assignment;
    std::size_t parsed = 0;
    std::size_t rejected = 0;
};

ClusterRun run_clustering(const PipelineConfig& cfg) {
    const auto schema = schema_or_default(cfg.checkins_schema, "checkins_schema");
    auto parsed = ingest::read_checkins(require(cfg.checkins, "checkins"), schema);

    ClusterRun run;
    run.parsed = parsed.records.size();
    run.rejected = parsed.rejects.size();
    run.checkins = ingest::dedupe_checkins(parsed.records);
    if (run.checkins.empty()) {
        throw EmptyDatasetError("no check-ins left after validation and de-duplication (" +
                                std::to_string(run.rejected) + " rejected)");
    }
    run.points.reserve(run.checkins.size());
    for (const auto& c : run.checkins) {
        run.points.push_back(c.location);
    }
    run.assignment = cluster::name_clusters(cluster::dbscan(run.points, cfg.dbscan), run.points);
    return run;
}

void emit_cluster(const ClusterRun& run, OutputSet& out, StageResult& result) {
    const auto& a = run.assignment;
    json features = json::array();
    for (std::size_t i = 0; i < run.points.size(); ++i) {
        const int label = a.labels[i];
        json props{{"kind", label == cluster::kNoise ? "noise" : "member"},
                   {"cluster", label == cluster::kNoise ? json(nullptr) : json(a.names[static_cast<std::size_t>(label)])},
                   {"core", static_cast<bool>(a.core[i])},
                   {"user_id", run.checkins[i].user_id},
                   {"venue", run.checkins[i].venue_key()},
                   {"beer_style", run.checkins[i].beer_style}};
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Point"}, {"coordinates", {run.points[i].lon(), run.points[i].lat()}}}},
                            {"properties", props}});
    }
    std::ostringstream summary;
    delimited::write_row(summary, {"cluster", "size", "core_points", "centroid_lat", "centroid_lon"});
    for (std::size_t c = 0; c < a.clusters.size(); ++c) {
        const auto center = cluster::centroid(run.points, a.clusters[c]);
        const auto core = std::count_if(a.clusters[c].begin(), a.clusters[c].end(),
                                        [&](std::size_t i) { return static_cast<bool>(a.core[i]); });
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Point"}, {"coordinates", {center.lon(), center.lat()}}}},
                            {"properties", {{"kind", "centroid"}, {"cluster", a.names[c]}, {"size", a.clusters[c].size()}}}});
        delimited::write_row(summary, {a.names[c], std::to_string(a.clusters[c].size()), std::to_string(core),
                                       num(center.lat()), num(center.lon())});
    }
    const json collection{{"type", "FeatureCollection"}, {"features", features}};
    out.write("clusters.geojson", collection.dump(1) + "\n");
    out.write("clusters_summary.csv", summary.str());

    result.messages.push_back(fmt::format("check-ins: {} parsed, {} rejected, {} after de-duplication", run.parsed,
                                          run.rejected, run.checkins.size()));
    result.messages.push_back(
        fmt::format("clusters: {} found, {} noise points", a.clusters.size(), a.noise_count()));
}

// ----------------------------------------------------------------- enrich

struct EnrichRun {
    std::vector<ingest::Report> reports;  // relevant, in date range
    std::vector<enrich::MetaCategory> categories;
    enrich::ReportAssignment assigned;
    std::vector<enrich::ClusterReportStats> stats;
    std::size_t parsed = 0;
    std::size_t rejected = 0;
    std::size_t out_of_range = 0;
    std::size_t irrelevant = 0;
};

EnrichRun run_enrichment(const PipelineConfig& cfg, const ClusterRun& clusters) {
    if (cfg.category_map.empty() || !fs::exists(cfg.category_map)) {
        throw ConfigError("category map not found: '" + cfg.category_map.string() + "'");
    }
    const auto map = enrich::CategoryMap::load(cfg.category_map);
    const auto schema = schema_or_default(cfg.reports_schema, "reports_schema");
    auto parsed = ingest::read_reports(require(cfg.reports, "reports"), schema);

    EnrichRun run;
    run.parsed = parsed.records.size();
    run.rejected = parsed.rejects.size();
    auto dated = ingest::filter_by_date(parsed.records, cfg.date_from, cfg.date_to);
    run.out_of_range = parsed.records.size() - dated.size();
    run.reports = enrich::filter_relevant(dated, map);
    run.irrelevant = dated.size() - run.reports.size();
    for (const auto& r : run.reports) {
        run.categories.push_back(enrich::categorize_report(r, map));
    }
    const geo::Meters radius(cfg.radius_m);
    run.assigned = enrich::assign_reports(run.reports, clusters.assignment, clusters.points, radius);
    run.stats = enrich::compute_stats(run.assigned, run.categories, clusters.assignment, clusters.points, radius);

    if (!cfg.share_subset.empty()) {
        enrich::share_of_total(run.stats, cfg.share_subset);  // validates the names early
    }
    return run;
}

void emit_enrich(const PipelineConfig& cfg, const EnrichRun& run, const ClusterRun& clusters, OutputSet& out,
                 StageResult& result) {
    std::ostringstream csv;
    std::vector<std::string> header{"cluster", "area_m2", "total", "uncategorized"};
    for (auto c : enrich::kCategories) {
        header.push_back("count_" + std::string(enrich::to_string(c)));
    }
    for (auto c : enrich::kCategories) {
        header.push_back("density_" + std::string(enrich::to_string(c)));
    }
    delimited::write_row(csv, header);

    json clusters_json = json::array();
    for (const auto& s : run.stats) {
        std::vector<std::string> row{s.cluster, num(s.area_m2), std::to_string(s.total), std::to_string(s.uncategorized)};
        json counts = json::object();
        json density = json::object();
        for (std::size_t i = 0; i < enrich::kCategoryCount; ++i) {
            row.push_back(std::to_string(s.counts[i]));
            counts[std::string(enrich::to_string(enrich::kCategories[i]))] = s.counts[i];
        }
        for (std::size_t i = 0; i < enrich::kCategoryCount; ++i) {
            row.push_back(num(s.density_per_100m2[i]));
            density[std::string(enrich::to_string(enrich::kCategories[i]))] = s.density_per_100m2[i];
        }
        delimited::write_row(csv, row);
        const auto top = enrich::most_common_category(s);
        clusters_json.push_back({{"cluster", s.cluster},
                                 {"area_m2", s.area_m2},
                                 {"total", s.total},
                                 {"counts", counts},
                                 {"density_per_100m2", density},
                                 {"most_common", top ? json(std::string(enrich::to_string(*top))) : json(nullptr)}});
    }

    json overlaps = json::array();
    for (const auto& o : run.assigned.overlaps) {
        json candidates = json::array();
        for (const auto& c : o.candidates) {
            candidates.push_back({{"cluster", clusters.assignment.names[c.cluster]}, {"distance_m", c.distance_m}});
        }
        overlaps.push_back({{"report_id", run.reports[o.report].report_id},
                            {"assigned", clusters.assignment.names[o.chosen]},
                            {"candidates", candidates}});
    }
    const auto overall = enrich::most_common_category(run.stats);
    json doc{{"radius_m", cfg.radius_m},
             {"clusters", clusters_json},
             {"reports_parsed", run.parsed},
             {"reports_rejected", run.rejected},
             {"reports_outside_dates", run.out_of_range},
             {"reports_uncategorized", run.irrelevant},
             {"reports_categorized", run.reports.size()},
             {"reports_assigned", run.assigned.assigned_count()},
             {"reports_unassigned", run.assigned.unassigned.size()},
             {"overlaps", overlaps},
             {"most_common_overall", overall ? json(std::string(enrich::to_string(*overall))) : json(nullptr)}};
    if (!cfg.share_subset.empty()) {
        const double share = enrich::share_of_total(run.stats, cfg.share_subset);
        doc["share_of_total"] = {{"subset", cfg.share_subset}, {"percent", share}};
        std::string names;
        for (const auto& n : cfg.share_subset) {
            names += (names.empty() ? "" : ",") + n;
        }
        result.messages.push_back(fmt::format("share of total for {{{}}}: {:.2f}%", names, share));
    }
    out.write("cluster_stats.csv", csv.str());
    out.write("category_counts.json", doc.dump(1) + "\n");

    result.messages.push_back(fmt::format(
        "reports: {} parsed, {} rejected, {} outside dates, {} uncategorized, {} assigned, {} unassigned, {} overlaps",
        run.parsed, run.rejected, run.out_of_range, run.irrelevant, run.assigned.assigned_count(),
        run.assigned.unassigned.size(), run.assigned.overlaps.size()));
}

// ------------------------------------------------------------ score-sites

void emit_sites(const PipelineConfig& cfg, const EnrichRun& run, OutputSet& out, StageResult& result) {
    std::vector<sitescore::ProblemFlags> flags;
    for (const auto& s : run.stats) {
        flags.push_back(sitescore::derive_problem_flags(s, cfg.thresholds));
    }
    std::vector<sitescore::FeatureAnnotation> annotations;
    if (cfg.annotations.empty()) {
        result.messages.push_back("warning: no annotation file; matrix holds data-derived columns only");
    } else {
        annotations = sitescore::load_annotations(require(cfg.annotations, "annotations"));
    }
    const auto matrix = sitescore::build_matrix(flags, annotations);
    for (const auto& w : matrix.warnings) {
        result.messages.push_back("warning: " + w);
    }
    const auto ranking = sitescore::rank_candidates(matrix);

    std::ostringstream matrix_csv;
    sitescore::write_matrix_csv(matrix_csv, matrix);
    std::ostringstream ranking_csv;
    delimited::write_row(ranking_csv, {"rank", "cluster", "marks", "unmet_features"});
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        delimited::write_row(ranking_csv, {std::to_string(i + 1), ranking[i].cluster,
                                           std::to_string(ranking[i].mark_count),
                                           std::to_string(ranking[i].unmet_count)});
    }
    out.write("site_matrix.csv", matrix_csv.str());
    out.write("site_ranking.csv", ranking_csv.str());
    if (!ranking.empty()) {
        result.messages.push_back(
            fmt::format("best candidate: cluster {} ({} marks)", ranking.front().cluster, ranking.front().mark_count));
    }
}

// ------------------------------------------------------------------ react

void emit_react(const PipelineConfig& cfg, OutputSet& out, StageResult& result) {
    const auto articles = read_articles(require(cfg.articles, "articles"));
    if (articles.empty()) {
        throw ConfigError("articles file holds no article text; the topic is undefined");
    }
    const auto lang = textrank::LanguageConfig::load(require(cfg.language, "language"));
    const auto lexicon = sentiment::Lexicon::load(require(cfg.lexicon, "lexicon"));
    for (const auto& w : lexicon.warnings) {
        result.messages.push_back("warning: " + w);
    }
    const auto schema = schema_or_default(cfg.comments_schema, "comments_schema");
    const auto parsed = ingest::read_comments(require(cfg.comments, "comments"), schema);
    const auto& comments = parsed.records;

    std::vector<textrank::TokenSequence> corpus;
    corpus.reserve(comments.size());
    for (const auto& c : comments) {
        corpus.push_back(textrank::normalize(c.text, lang));
    }
    const auto topic = textrank::build_topic_profile(articles, corpus, lang);
    if (topic.degenerate) {
        result.messages.push_back("warning: topic profile is empty after normalization");
    }
    const auto ranked = textrank::rank_comments(comments, topic, lang);

    std::vector<int> polarity(comments.size());
    for (std::size_t i = 0; i < comments.size(); ++i) {
        polarity[i] = sentiment::score_text(comments[i].text, lexicon, cfg.scoring).polarity();
    }

    std::ostringstream csv;
    delimited::write_row(csv, {"comment_id", "score", "polarity"});
    std::vector<int> ranked_polarity;
    std::vector<int> nonzero_polarity;
    for (const auto& r : ranked) {
        delimited::write_row(csv, {r.comment_id, num(r.score), std::to_string(polarity[r.index])});
        ranked_polarity.push_back(polarity[r.index]);
        if (r.score > 0.0) {
            nonzero_polarity.push_back(polarity[r.index]);
        }
    }

    auto quartiles = [](std::span<const int> ranked_values) {
        json q = json::array();
        for (int k = 1; k <= 4; ++k) {
            const auto slice = textrank::quartile_slice(ranked_values, k);
            q.push_back(distribution_json(sentiment::distribution(std::span<const int>(slice))));
        }
        return q;
    };

    json top_terms = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(20, topic.top_terms.size()); ++i) {
        top_terms.push_back({topic.top_terms[i].first, topic.top_terms[i].second});
    }
    const std::size_t zero = ranked_polarity.size() - nonzero_polarity.size();
    json doc{{"articles", topic.source_count},
             {"comments_parsed", comments.size()},
             {"comments_rejected", parsed.rejects.size()},
             {"zero_similarity_count", zero},
             {"topic_degenerate", topic.degenerate},
             {"top_terms", top_terms},
             {"all", distribution_json(sentiment::distribution(std::span<const int>(ranked_polarity)))},
             {"quartiles", quartiles(ranked_polarity)},
             {"nonzero", distribution_json(sentiment::distribution(std::span<const int>(nonzero_polarity)))},
             {"nonzero_quartiles", quartiles(nonzero_polarity)}};
    out.write("ranked_comments.csv", csv.str());
    out.write("sentiment.json", doc.dump(1) + "\n");

    const auto all = sentiment::distribution(std::span<const int>(ranked_polarity));
    const auto q1 = textrank::quartile_slice(std::span<const int>(ranked_polarity), 1);
    result.messages.push_back(fmt::format("comments: {} scored, {} with zero similarity; mean polarity {} (all), {} (first quartile)",
                                          comments.size(), zero, all.mean_text(),
                                          sentiment::distribution(std::span<const int>(q1)).mean_text()));
}

template <typename Body>
StageResult run_stage(const PipelineConfig& cfg, Body body) {
    StageResult result;
    OutputSet out(cfg.out);
    body(out, result);
    result.outputs = out.commit();
    return result;
}

}  // namespace

const std::vector<std::string>& PipelineConfig::keys() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> k = kPathKeys;
        for (const char* extra : {"eps", "min_pts", "radius", "threshold_count", "threshold_density", "from", "to",
                                  "share_subset", "negation_window", "booster_window", "deterministic"}) {
            k.emplace_back(extra);
        }
        return k;
    }();
    return all;
}

void PipelineConfig::set(const std::string& key, const std::string& value, const fs::path& base_dir) {
    auto resolve = [&](const std::string& v) {
        if (v.empty()) {
            return fs::path{};
        }
        fs::path p(v);
        return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).lexically_normal();
    };
    if (key == "checkins") checkins = resolve(value);
    else if (key == "checkins_schema") checkins_schema = resolve(value);
    else if (key == "reports") reports = resolve(value);
    else if (key == "reports_schema") reports_schema = resolve(value);
    else if (key == "comments") comments = resolve(value);
    else if (key == "comments_schema") comments_schema = resolve(value);
    else if (key == "articles") articles = resolve(value);
    else if (key == "category_map") category_map = resolve(value);
    else if (key == "lexicon") lexicon = resolve(value);
    else if (key == "language") language = resolve(value);
    else if (key == "annotations") annotations = resolve(value);
    else if (key == "out") out = resolve(value);
    else if (key == "eps") {
        const double v = parse_number(key, value);
        if (v <= 0.0) throw ConfigError("eps must be positive");
        dbscan.eps = geo::Meters(v);
    } else if (key == "min_pts") {
        dbscan.min_pts = parse_count(key, value);
        if (dbscan.min_pts < 1) throw ConfigError("min_pts must be at least 1");
    } else if (key == "radius") {
        radius_m = parse_number(key, value);
        if (radius_m <= 0.0) throw ConfigError("radius must be positive");
    } else if (key == "threshold_count") {
        const auto v = parse_count(key, value);
        if (v < 1) throw ConfigError("threshold_count must be at least 1");
        for (auto& t : thresholds.per_problem) t.min_count = v;
    } else if (key == "threshold_density") {
        const double v = parse_number(key, value);
        if (v <= 0.0) throw ConfigError("threshold_density must be positive");
        for (auto& t : thresholds.per_problem) t.min_density = v;
    } else if (key == "from" || key == "to") {
        std::optional<std::string> bound;
        if (!value.empty()) {
            if (value.size() != 10 || !ingest::Timestamp::parse(value)) {
                throw ConfigError("'" + key + "' must be YYYY-MM-DD, got '" + value + "'");
            }
            bound = value;
        }
        (key == "from" ? date_from : date_to) = bound;
    } else if (key == "share_subset") {
        share_subset.clear();
        std::stringstream ss(value);
        std::string name;
        while (std::getline(ss, name, ',')) {
            name.erase(0, name.find_first_not_of(' '));
            name.erase(name.find_last_not_of(' ') + 1);
            if (!name.empty()) share_subset.insert(name);
        }
    } else if (key == "negation_window") {
        scoring.negation_window = parse_count(key, value);
    } else if (key == "booster_window") {
        scoring.booster_window = parse_count(key, value);
    } else if (key == "deterministic") {
        if (value != "true" && value != "false") throw ConfigError("deterministic must be true or false");
        deterministic = value == "true";
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    PipelineConfig cfg;
    for (const auto& [key, value] : j.items()) {
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_array()) {
            for (const auto& item : value) {
                if (!item.is_string()) throw ConfigError("'" + key + "' entries must be strings");
                text += (text.empty() ? "" : ",") + item.get<std::string>();
            }
        } else if (value.is_number() || value.is_boolean()) {
            text = value.dump();
        } else if (value.is_null()) {
            continue;
        } else {
            throw ConfigError("unsupported value for '" + key + "'");
        }
        cfg.set(key, text, base_dir);
    }
    return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
        throw ConfigError("config file is not valid JSON: " + path.string());
    }
    return from_json(j, path.parent_path());
}

json PipelineConfig::parameters() const {
    json thresholds_json = json::object();
    for (std::size_t i = 0; i < sitescore::kProblemCount; ++i) {
        thresholds_json[std::string(sitescore::to_string(static_cast<sitescore::Problem>(i)))] = {
            {"min_count", thresholds.per_problem[i].min_count}, {"min_density", thresholds.per_problem[i].min_density}};
    }
    return json{{"eps_m", dbscan.eps.value()},
                {"min_pts", dbscan.min_pts},
                {"radius_m", radius_m},
                {"thresholds", thresholds_json},
                {"from", date_from ? json(*date_from) : json(nullptr)},
                {"to", date_to ? json(*date_to) : json(nullptr)},
                {"share_subset", share_subset},
                {"negation_window", scoring.negation_window},
                {"booster_window", scoring.booster_window},
                {"deterministic", deterministic}};
}

std::vector<std::string> read_articles(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open articles file: " + path.string());
    }
    std::vector<std::string> articles;
    std::string current;
    std::string line;
    auto flush = [&] {
        if (current.find_first_not_of(" \t\r\n") != std::string::npos) {
            articles.emplace_back(text::trim(current));
        }
        current.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line == "---") {
            flush();
        } else {
            current += line;
            current += '\n';
        }
    }
    flush();
    return articles;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw InternalError("sha256 initialization failed");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

StageResult cmd_cluster(const PipelineConfig& cfg) {
    return run_stage(cfg, [&](OutputSet& out, StageResult& result) {
        emit_cluster(run_clustering(cfg), out, result);
    });
}

StageResult cmd_enrich(const PipelineConfig& cfg) {
    return run_stage(cfg, [&](OutputSet& out, StageResult& result) {
        const auto clusters = run_clustering(cfg);
        emit_enrich(cfg, run_enrichment(cfg, clusters), clusters, out, result);
    });
}

StageResult cmd_score_sites(const PipelineConfig& cfg) {
    return run_stage(cfg, [&](OutputSet& out, StageResult& result) {
        const auto clusters = run_clustering(cfg);
        emit_sites(cfg, run_enrichment(cfg, clusters), out, result);
    });
}

StageResult cmd_react(const PipelineConfig& cfg) {
    return run_stage(cfg, [&](OutputSet& out, StageResult& result) { emit_react(cfg, out, result); });
}

StageResult cmd_pipeline(const PipelineConfig& cfg) {
    StageResult result;
    OutputSet out(cfg.out);

    std::vector<std::pair<std::string, std::vector<std::string>>> stages;
    auto track = [&](const std::string& stage, std::vector<std::string> names) {
        stages.emplace_back(stage, std::move(names));
    };

    const auto clusters = run_clustering(cfg);
    emit_cluster(clusters, out, result);
    track("cluster", {"clusters.geojson", "clusters_summary.csv"});
    const auto enriched = run_enrichment(cfg, clusters);
    emit_enrich(cfg, enriched, clusters, out, result);
    track("enrich", {"cluster_stats.csv", "category_counts.json"});
    emit_sites(cfg, enriched, out, result);
    track("score-sites", {"site_matrix.csv", "site_ranking.csv"});
    emit_react(cfg, out, result);
    track("react", {"ranked_comments.csv", "sentiment.json"});

    json inputs = json::object();
    auto add_input = [&](const char* key, const fs::path& p) {
        if (!p.empty()) {
            inputs[key] = {{"file", p.filename().string()}, {"sha256", sha256_file(p)}};
        }
    };
    add_input("checkins", cfg.checkins);
    add_input("checkins_schema", cfg.checkins_schema);
    add_input("reports", cfg.reports);
    add_input("reports_schema", cfg.reports_schema);
    add_input("comments", cfg.comments);
    add_input("comments_schema", cfg.comments_schema);
    add_input("articles", cfg.articles);
    add_input("category_map", cfg.category_map);
    add_input("lexicon", cfg.lexicon);
    add_input("annotations", cfg.annotations);
    if (!cfg.language.empty()) {
        add_input("language_stopwords", cfg.language / "stopwords.txt");
        add_input("language_stemmer", cfg.language / "stemmer.txt");
    }

    json stage_list = json::array();
    for (const auto& [stage, names] : stages) {
        json outputs = json::object();
        for (const auto& name : names) {
            outputs[name] = sha256_file(out.dir() / (name + ".partial"));
        }
        stage_list.push_back({{"stage", stage}, {"outputs", outputs}});
    }
    const json manifest{{"tool", "urbanpulse"},
                        {"inputs", inputs},
                        {"parameters", cfg.parameters()},
                        {"stages", stage_list}};
    out.write("manifest.json", manifest.dump(1) + "\n");
    result.outputs = out.commit();
    return result;
}

}  // namespace urbanpulse::pipeline
