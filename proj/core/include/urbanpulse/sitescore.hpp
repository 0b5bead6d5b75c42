#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urbanpulse/enrich.hpp"

namespace urbanpulse::sitescore {

/// Data-derived problem columns, in matrix order.
enum class Problem { Safety, Noise, StreetBlock, Parking, Health };
inline constexpr std::size_t kProblemCount = 5;
inline constexpr std::size_t kFeatureCount = 4;

std::string_view to_string(Problem p);

/// Meta-categories that feed each problem column. StreetBlock takes both
/// StreetBlocking and TrafficIssues; their counts are summed.
std::span<const enrich::MetaCategory> sources(Problem p);

struct Threshold {
    std::size_t min_count = 5;
    double min_density = 0.05;  // reports per 100 m^2
};

/// One threshold per problem column.
struct Thresholds {
    std::array<Threshold, kProblemCount> per_problem{};

    static Thresholds uniform(Threshold t);
    Threshold& operator[](Problem p) { return per_problem[static_cast<std::size_t>(p)]; }
    const Threshold& operator[](Problem p) const { return per_problem[static_cast<std::size_t>(p)]; }
    /// Throws InvalidInput if any count or density threshold is not positive.
    void validate() const;
};

struct ProblemFlags {
    std::string cluster;
    std::array<bool, kProblemCount> flags{};

    bool operator[](Problem p) const { return flags[static_cast<std::size_t>(p)]; }
};

/// A column is flagged when the summed count reaches min_count or the summed
/// density reaches min_density.
ProblemFlags derive_problem_flags(const enrich::ClusterReportStats& stats, const Thresholds& thresholds);

/// Analyst judgment of the planning features F1..F4 for one cluster.
/// `unmet[i]` true means feature F(i+1) is not met.
struct FeatureAnnotation {
    std::string cluster;
    std::array<bool, kFeatureCount> unmet{};
    std::string notes;
};

/// Annotation file: delimited text with header `cluster,f1,f2,f3,f4,notes`
/// (notes optional). Unmet cells are `x`, `1`, `true` or `yes`; met cells are
/// empty, `0`, `false` or `no`.
std::vector<FeatureAnnotation> parse_annotations(std::istream& in, const std::string& source = "<annotations>");
std::vector<FeatureAnnotation> load_annotations(const std::filesystem::path& path);

struct SiteRow {
    std::string cluster;
    std::array<bool, kFeatureCount> unmet{};
    std::array<bool, kProblemCount> problems{};
    bool annotated = false;
    std::size_t mark_count = 0;

    std::size_t unmet_count() const;
};

struct SiteMatrix {
    std::vector<SiteRow> rows;  // ordered by cluster name
    std::vector<std::string> warnings;

    const SiteRow* find(std::string_view cluster) const;
};

/// One row per flagged cluster; cells are the union of data flags and
/// annotation marks. Clusters without an annotation get all features met and
/// a warning. An annotation for an unknown cluster throws InvalidInput.
SiteMatrix build_matrix(std::span<const ProblemFlags> flags, std::span<const FeatureAnnotation> annotations);

struct RankedSite {
    std::string cluster;
    std::size_t mark_count;
    std::size_t unmet_count;
};

/// Fewest marks first, then fewest unmet features, then cluster name.
std::vector<RankedSite> rank_candidates(const SiteMatrix& matrix);

/// CSV with header cluster,F1,F2,F3,F4,Safety,Noise,StreetBlock,Parking,Health,marks; marked cells are "x".
void write_matrix_csv(std::ostream& out, const SiteMatrix& matrix);

}  // namespace urbanpulse::sitescore
