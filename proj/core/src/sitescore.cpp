#include "urbanpulse/sitescore.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "urbanpulse/delimited.hpp"
#include "urbanpulse/error.hpp"
#include "urbanpulse/text.hpp"

namespace urbanpulse::sitescore {
namespace {

using enrich::MetaCategory;

constexpr std::array<std::string_view, kProblemCount> kProblemNames{"Safety", "Noise", "StreetBlock", "Parking",
                                                                    "Health"};

constexpr std::array<MetaCategory, 1> kSafety{MetaCategory::CitizenSafety};
constexpr std::array<MetaCategory, 1> kNoise{MetaCategory::NoiseProblems};
constexpr std::array<MetaCategory, 2> kStreet{MetaCategory::StreetBlocking, MetaCategory::TrafficIssues};
constexpr std::array<MetaCategory, 1> kParking{MetaCategory::ParkingInfractions};
constexpr std::array<MetaCategory, 1> kHealth{MetaCategory::HealthIssues};

bool parse_mark(const std::string& raw, bool& out) {
    const std::string v = text::casefold(text::trim(raw));
    if (v == "x" || v == "1" || v == "true" || v == "yes") {
        out = true;
        return true;
    }
    if (v.empty() || v == "0" || v == "false" || v == "no") {
        out = false;
        return true;
    }
    return false;
}

}  // namespace

std::string_view to_string(Problem p) {
    return kProblemNames[static_cast<std::size_t>(p)];
}

std::span<const MetaCategory> sources(Problem p) {
    switch (p) {
        case Problem::Safety: return kSafety;
        case Problem::Noise: return kNoise;
        case Problem::StreetBlock: return kStreet;
        case Problem::Parking: return kParking;
        case Problem::Health: return kHealth;
    }
    throw InternalError("unknown problem column");
}

Thresholds Thresholds::uniform(Threshold t) {
    Thresholds out;
    out.per_problem.fill(t);
    return out;
}

void Thresholds::validate() const {
    for (std::size_t i = 0; i < kProblemCount; ++i) {
        if (per_problem[i].min_count < 1 || !(per_problem[i].min_density > 0.0)) {
            throw InvalidInput("thresholds must be positive (column " + std::string(kProblemNames[i]) + ")");
        }
    }
}

ProblemFlags derive_problem_flags(const enrich::ClusterReportStats& stats, const Thresholds& thresholds) {
    thresholds.validate();
    ProblemFlags out;
    out.cluster = stats.cluster;
    for (std::size_t i = 0; i < kProblemCount; ++i) {
        const auto p = static_cast<Problem>(i);
        std::size_t count = 0;
        double density = 0.0;
        for (MetaCategory c : sources(p)) {
            count += stats.count(c);
            density += stats.density(c);
        }
        out.flags[i] = count >= thresholds[p].min_count || density >= thresholds[p].min_density;
    }
    return out;
}

std::vector<FeatureAnnotation> parse_annotations(std::istream& in, const std::string& source) {
    delimited::Reader reader(in);
    auto header = reader.next();
    if (!header) {
        return {};
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header->fields.size(); ++i) {
        index.emplace(text::casefold(text::trim(header->fields[i])), i);
    }
    for (const char* required : {"cluster", "f1", "f2", "f3", "f4"}) {
        if (!index.contains(required)) {
            throw ParseError(source, header->line, std::string("missing column '") + required + "'");
        }
    }
    const auto notes = index.find("notes");

    std::vector<FeatureAnnotation> out;
    std::set<std::string> seen;
    while (auto rec = reader.next()) {
        if (!rec->error.empty() || rec->fields.size() != header->fields.size()) {
            throw ParseError(source, rec->line, "malformed annotation row");
        }
        FeatureAnnotation a;
        a.cluster = text::trim(rec->fields[index["cluster"]]);
        if (a.cluster.empty()) {
            throw ParseError(source, rec->line, "empty cluster name");
        }
        if (!seen.insert(a.cluster).second) {
            throw ParseError(source, rec->line, "duplicate annotation for cluster " + a.cluster);
        }
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const std::string& cell = rec->fields[index["f" + std::to_string(f + 1)]];
            if (!parse_mark(cell, a.unmet[f])) {
                throw ParseError(source, rec->line, "unrecognized mark '" + cell + "'");
            }
        }
        if (notes != index.end()) {
            a.notes = rec->fields[notes->second];
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<FeatureAnnotation> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open annotation file: " + path.string());
    }
    return parse_annotations(in, path.string());
}

std::size_t SiteRow::unmet_count() const {
    return static_cast<std::size_t>(std::count(unmet.begin(), unmet.end(), true));
}

const SiteRow* SiteMatrix::find(std::string_view cluster) const {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const SiteRow& r) { return r.cluster == cluster; });
    return it == rows.end() ? nullptr : &*it;
}

SiteMatrix build_matrix(std::span<const ProblemFlags> flags, std::span<const FeatureAnnotation> annotations) {
    std::map<std::string, const FeatureAnnotation*> by_cluster;
    for (const auto& a : annotations) {
        by_cluster[a.cluster] = &a;
    }
    for (const auto& [name, a] : by_cluster) {
        const bool known =
            std::any_of(flags.begin(), flags.end(), [&](const ProblemFlags& f) { return f.cluster == name; });
        if (!known) {
            throw InvalidInput("annotation references unknown cluster '" + name + "'");
        }
    }

    SiteMatrix m;
    for (const auto& f : flags) {
        SiteRow row;
        row.cluster = f.cluster;
        row.problems = f.flags;
        if (const auto it = by_cluster.find(f.cluster); it != by_cluster.end()) {
            row.unmet = it->second->unmet;
            row.annotated = true;
        } else {
            m.warnings.push_back("no feature annotation for cluster " + f.cluster + "; F1-F4 treated as met");
        }
        row.mark_count = row.unmet_count() +
                         static_cast<std::size_t>(std::count(row.problems.begin(), row.problems.end(), true));
        m.rows.push_back(std::move(row));
    }
    std::sort(m.rows.begin(), m.rows.end(),
              [](const SiteRow& a, const SiteRow& b) { return cluster::name_less(a.cluster, b.cluster); });
    return m;
}

std::vector<RankedSite> rank_candidates(const SiteMatrix& matrix) {
    std::vector<RankedSite> out;
    out.reserve(matrix.rows.size());
    for (const auto& row : matrix.rows) {
        out.push_back({row.cluster, row.mark_count, row.unmet_count()});
    }
    std::sort(out.begin(), out.end(), [](const RankedSite& a, const RankedSite& b) {
        if (a.mark_count != b.mark_count) {
            return a.mark_count < b.mark_count;
        }
        if (a.unmet_count != b.unmet_count) {
            return a.unmet_count < b.unmet_count;
        }
        return cluster::name_less(a.cluster, b.cluster);
    });
    return out;
}

void write_matrix_csv(std::ostream& out, const SiteMatrix& matrix) {
    std::vector<std::string> header{"cluster", "F1", "F2", "F3", "F4"};
    for (auto name : kProblemNames) {
        header.emplace_back(name);
    }
    header.emplace_back("marks");
    delimited::write_row(out, header);
    for (const auto& row : matrix.rows) {
        std::vector<std::string> cells{row.cluster};
        for (bool b : row.unmet) {
            cells.emplace_back(b ? "x" : "");
        }
        for (bool b : row.problems) {
            cells.emplace_back(b ? "x" : "");
        }
        cells.push_back(std::to_string(row.mark_count));
        delimited::write_row(out, cells);
    }
}

}  // namespace urbanpulse::sitescore
