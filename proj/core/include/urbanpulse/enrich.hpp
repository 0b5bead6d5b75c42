#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urbanpulse/cluster.hpp"
#include "urbanpulse/geo.hpp"
#include "urbanpulse/ingest.hpp"

namespace urbanpulse::enrich {

/// Problem families for municipal report subdivisions. Declaration order is
/// the tie-break order used by most_common_category().
enum class MetaCategory {
    StreetBlocking,
    TrafficIssues,
    HealthIssues,
    NoiseProblems,
    CitizenSafety,
    ParkingInfractions,
    Uncategorized,
};

inline constexpr std::size_t kCategoryCount = 6;  // excludes Uncategorized
inline constexpr std::array<MetaCategory, kCategoryCount> kCategories{
    MetaCategory::StreetBlocking, MetaCategory::TrafficIssues,  MetaCategory::HealthIssues,
    MetaCategory::NoiseProblems,  MetaCategory::CitizenSafety, MetaCategory::ParkingInfractions,
};

std::string_view to_string(MetaCategory c);
/// Accepts the identifier ("ParkingInfractions") or spaced form ("Parking Infractions"), any case.
std::optional<MetaCategory> parse_category(std::string_view name);

/// Subdivision -> MetaCategory lookup. Keys are trimmed and case-folded.
///
/// File format: `subdivision<TAB>MetaCategoryName` per line; `#` starts a
/// comment line; blank lines are ignored. A key that appears twice after
/// normalization is an error.
class CategoryMap {
public:
    static CategoryMap parse(std::istream& in, const std::string& source = "<category map>");
    static CategoryMap load(const std::filesystem::path& path);

    /// Throws InvalidInput if the normalized key is already present or the category is Uncategorized.
    void add(std::string_view subdivision, MetaCategory category);
    MetaCategory lookup(std::string_view subdivision) const;
    std::size_t size() const { return entries_.size(); }

    static std::string normalize(std::string_view subdivision);

private:
    std::map<std::string, MetaCategory> entries_;
};

MetaCategory categorize_report(const ingest::Report& report, const CategoryMap& map);

/// Reports whose subdivision is in the map's domain, in input order.
std::vector<ingest::Report> filter_relevant(const std::vector<ingest::Report>& reports, const CategoryMap& map);

struct OverlapCandidate {
    std::size_t cluster;
    double distance_m;
};

/// A report that fell inside more than one cluster buffer.
struct Overlap {
    std::size_t report;
    std::size_t chosen;
    std::vector<OverlapCandidate> candidates;  // ascending cluster id
};

struct ReportAssignment {
    std::vector<std::vector<std::size_t>> by_cluster;  // cluster id -> ascending report indices
    std::vector<std::size_t> unassigned;
    std::vector<Overlap> overlaps;

    std::size_t assigned_count() const;
};

inline constexpr double kDefaultBufferRadiusM = 200.0;

/// A report joins cluster C when its distance to the nearest member of C is
/// within the radius. Reports inside several buffers join the nearest cluster
/// (lower id on exact ties) and are listed in overlaps.
ReportAssignment assign_reports(std::span<const ingest::Report> reports, const cluster::ClusterAssignment& assignment,
                                std::span<const geo::GeoPoint> points,
                                geo::Meters radius = geo::Meters(kDefaultBufferRadiusM));

struct ClusterReportStats {
    std::string cluster;
    std::array<std::size_t, kCategoryCount> counts{};
    std::array<double, kCategoryCount> density_per_100m2{};
    std::size_t uncategorized = 0;  // not part of total
    double area_m2 = 0.0;
    std::size_t total = 0;

    std::size_t count(MetaCategory c) const { return counts[static_cast<std::size_t>(c)]; }
    double density(MetaCategory c) const { return density_per_100m2[static_cast<std::size_t>(c)]; }
};

/// Per-cluster category counts and densities per 100 m^2 of dissolved buffer,
/// ordered by cluster name. `categories[i]` is the category of report i.
std::vector<ClusterReportStats> compute_stats(const ReportAssignment& assigned, std::span<const MetaCategory> categories,
                                              const cluster::ClusterAssignment& assignment,
                                              std::span<const geo::GeoPoint> points,
                                              geo::Meters radius = geo::Meters(kDefaultBufferRadiusM));

/// Percentage of all categorized cluster reports that fall in `subset`.
/// Throws InvalidInput for a name not present in `stats`.
double share_of_total(std::span<const ClusterReportStats> stats, const std::set<std::string>& subset);

/// Argmax over the six categories, ties resolved by declaration order.
/// nullopt when the cluster has no categorized reports.
std::optional<MetaCategory> most_common_category(const ClusterReportStats& stats);
/// Same rule over counts summed across all clusters.
std::optional<MetaCategory> most_common_category(std::span<const ClusterReportStats> stats);

}  // namespace urbanpulse::enrich
