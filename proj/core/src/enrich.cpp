#include "urbanpulse/enrich.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "urbanpulse/error.hpp"
#include "urbanpulse/text.hpp"

namespace urbanpulse::enrich {
namespace {

constexpr std::array<std::string_view, kCategoryCount + 1> kNames{
    "StreetBlocking", "TrafficIssues",      "HealthIssues", "NoiseProblems",
    "CitizenSafety",  "ParkingInfractions", "Uncategorized",
};

std::string display_name(const cluster::ClusterAssignment& a, std::size_t id) {
    return id < a.names.size() && !a.names[id].empty() ? a.names[id] : cluster::cluster_name(id);
}

std::optional<MetaCategory> argmax(const std::array<std::size_t, kCategoryCount>& counts) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kCategoryCount; ++i) {
        if (counts[i] > counts[best]) {
            best = i;
        }
    }
    if (counts[best] == 0) {
        return std::nullopt;
    }
    return kCategories[best];
}

}  // namespace

std::string_view to_string(MetaCategory c) {
    return kNames[static_cast<std::size_t>(c)];
}

std::optional<MetaCategory> parse_category(std::string_view name) {
    std::string squashed;
    for (char ch : text::casefold(name)) {
        if (ch != ' ' && ch != '_' && ch != '-' && ch != '\t') {
            squashed.push_back(ch);
        }
    }
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (text::casefold(kNames[i]) == squashed) {
            return static_cast<MetaCategory>(i);
        }
    }
    return std::nullopt;
}

std::string CategoryMap::normalize(std::string_view subdivision) {
    return text::casefold(text::trim(subdivision));
}

void CategoryMap::add(std::string_view subdivision, MetaCategory category) {
    if (category == MetaCategory::Uncategorized) {
        throw InvalidInput("category map cannot map to Uncategorized");
    }
    std::string key = normalize(subdivision);
    if (key.empty()) {
        throw InvalidInput("category map: empty subdivision");
    }
    if (!entries_.emplace(std::move(key), category).second) {
        throw InvalidInput("category map: duplicate subdivision '" + std::string(subdivision) + "'");
    }
}

MetaCategory CategoryMap::lookup(std::string_view subdivision) const {
    const auto it = entries_.find(normalize(subdivision));
    return it == entries_.end() ? MetaCategory::Uncategorized : it->second;
}

CategoryMap CategoryMap::parse(std::istream& in, const std::string& source) {
    CategoryMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const std::string t = text::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(source, line_no, "expected subdivision<TAB>MetaCategory");
        }
        const auto category = parse_category(text::trim(std::string_view(line).substr(tab + 1)));
        if (!category || *category == MetaCategory::Uncategorized) {
            throw ParseError(source, line_no, "unknown meta-category '" + line.substr(tab + 1) + "'");
        }
        try {
            map.add(std::string_view(line).substr(0, tab), *category);
        } catch (const InvalidInput& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return map;
}

CategoryMap CategoryMap::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open category map: " + path.string());
    }
    return parse(in, path.string());
}

MetaCategory categorize_report(const ingest::Report& report, const CategoryMap& map) {
    return map.lookup(report.subdivision);
}

std::vector<ingest::Report> filter_relevant(const std::vector<ingest::Report>& reports, const CategoryMap& map) {
    std::vector<ingest::Report> out;
    std::copy_if(reports.begin(), reports.end(), std::back_inserter(out),
                 [&](const ingest::Report& r) { return categorize_report(r, map) != MetaCategory::Uncategorized; });
    return out;
}

std::size_t ReportAssignment::assigned_count() const {
    return std::accumulate(by_cluster.begin(), by_cluster.end(), std::size_t{0},
                           [](std::size_t acc, const auto& v) { return acc + v.size(); });
}

ReportAssignment assign_reports(std::span<const ingest::Report> reports, const cluster::ClusterAssignment& assignment,
                                std::span<const geo::GeoPoint> points, geo::Meters radius) {
    if (radius.value() <= 0.0) {
        throw InvalidInput("assign_reports: radius must be positive");
    }
    if (assignment.labels.size() != points.size()) {
        throw InvalidInput("assign_reports: assignment does not match point count");
    }
    const std::size_t k = assignment.clusters.size();

    // Latitude band per cluster: a report further than the radius in latitude
    // alone cannot be within the radius of any member.
    const double pad_deg = radius.value() / geo::kEarthRadiusM * 180.0 / std::numbers::pi;
    std::vector<std::pair<double, double>> bands(k);
    std::vector<std::vector<geo::GeoPoint>> members(k);
    for (std::size_t c = 0; c < k; ++c) {
        members[c] = cluster::member_points(assignment, c, points);
        double lo = 90.0;
        double hi = -90.0;
        for (const auto& p : members[c]) {
            lo = std::min(lo, p.lat());
            hi = std::max(hi, p.lat());
        }
        bands[c] = {lo - pad_deg, hi + pad_deg};
    }

    ReportAssignment out;
    out.by_cluster.resize(k);
    std::vector<OverlapCandidate> hits;
    for (std::size_t r = 0; r < reports.size(); ++r) {
        const geo::GeoPoint& loc = reports[r].location;
        hits.clear();
        for (std::size_t c = 0; c < k; ++c) {
            if (members[c].empty() || loc.lat() < bands[c].first || loc.lat() > bands[c].second) {
                continue;
            }
            const double d = geo::min_distance_to_set(loc, members[c]).value();
            if (d <= radius.value()) {
                hits.push_back({c, d});
            }
        }
        if (hits.empty()) {
            out.unassigned.push_back(r);
            continue;
        }
        const auto best = std::min_element(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
            return a.distance_m != b.distance_m ? a.distance_m < b.distance_m : a.cluster < b.cluster;
        });
        out.by_cluster[best->cluster].push_back(r);
        if (hits.size() > 1) {
            out.overlaps.push_back({r, best->cluster, hits});
        }
    }
    return out;
}

std::vector<ClusterReportStats> compute_stats(const ReportAssignment& assigned, std::span<const MetaCategory> categories,
                                              const cluster::ClusterAssignment& assignment,
                                              std::span<const geo::GeoPoint> points, geo::Meters radius) {
    if (assigned.by_cluster.size() != assignment.clusters.size()) {
        throw InvalidInput("compute_stats: report assignment does not match clusters");
    }
    std::vector<ClusterReportStats> out;
    out.reserve(assignment.clusters.size());
    for (std::size_t c = 0; c < assignment.clusters.size(); ++c) {
        ClusterReportStats s;
        s.cluster = display_name(assignment, c);
        for (std::size_t r : assigned.by_cluster[c]) {
            if (r >= categories.size()) {
                throw InvalidInput("compute_stats: report index without a category");
            }
            if (categories[r] == MetaCategory::Uncategorized) {
                ++s.uncategorized;
            } else {
                ++s.counts[static_cast<std::size_t>(categories[r])];
            }
        }
        s.total = std::accumulate(s.counts.begin(), s.counts.end(), std::size_t{0});
        s.area_m2 = geo::union_buffer_area(cluster::member_points(assignment, c, points), radius);
        if (!(s.area_m2 > 0.0)) {
            throw InternalError("compute_stats: cluster " + s.cluster + " has zero buffer area");
        }
        for (std::size_t i = 0; i < kCategoryCount; ++i) {
            s.density_per_100m2[i] = static_cast<double>(s.counts[i]) / (s.area_m2 / 100.0);
        }
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return cluster::name_less(a.cluster, b.cluster); });
    return out;
}

double share_of_total(std::span<const ClusterReportStats> stats, const std::set<std::string>& subset) {
    std::size_t part = 0;
    std::size_t whole = 0;
    std::set<std::string> seen;
    for (const auto& s : stats) {
        whole += s.total;
        if (subset.contains(s.cluster)) {
            part += s.total;
            seen.insert(s.cluster);
        }
    }
    for (const auto& name : subset) {
        if (!seen.contains(name)) {
            throw InvalidInput("share_of_total: unknown cluster '" + name + "'");
        }
    }
    if (whole == 0) {
        return 0.0;
    }
    return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::optional<MetaCategory> most_common_category(const ClusterReportStats& stats) {
    return argmax(stats.counts);
}

std::optional<MetaCategory> most_common_category(std::span<const ClusterReportStats> stats) {
    std::array<std::size_t, kCategoryCount> sum{};
    for (const auto& s : stats) {
        for (std::size_t i = 0; i < kCategoryCount; ++i) {
            sum[i] += s.counts[i];
        }
    }
    return argmax(sum);
}

}  // namespace urbanpulse::enrich
