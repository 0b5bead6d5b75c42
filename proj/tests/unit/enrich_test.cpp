#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "urbanpulse/enrich.hpp"
#include "urbanpulse/error.hpp"

using namespace urbanpulse;
using namespace urbanpulse::enrich;
using geo::GeoPoint;
using geo::Meters;

namespace {

constexpr double kMetersPerDegree = geo::kEarthRadiusM * std::numbers::pi / 180.0;

GeoPoint east_of_origin(double m) { return {0.0, m / kMetersPerDegree}; }

ingest::Report report(std::string id, std::string subdivision, GeoPoint where) {
    ingest::Report r;
    r.report_id = std::move(id);
    r.subdivision = std::move(subdivision);
    r.location = where;
    r.timestamp = *ingest::Timestamp::parse("2017-01-01");
    return r;
}

// Single-member clusters at the given points, named A, B, ...
cluster::ClusterAssignment singletons(std::size_t n) {
    cluster::ClusterAssignment a;
    for (std::size_t i = 0; i < n; ++i) {
        a.labels.push_back(static_cast<int>(i));
        a.core.push_back(true);
        a.clusters.push_back({i});
        a.names.push_back(cluster::cluster_name(i));
    }
    return a;
}

CategoryMap default_map() {
    std::istringstream in(
        "# comment\n"
        "Events blocking streets\tStreetBlocking\n"
        "Speed excess\tTrafficIssues\n"
        "Open sewage\tHealth Issues\n"
        "Loud noise at night\tNoiseProblems\n"
        "Requesting greater security\tCitizenSafety\n"
        "\n"
        "Parking on sidewalk\tParkingInfractions\n");
    return CategoryMap::parse(in);
}

}  // namespace

TEST(CategoryMap, LookupIsNormalized) {
    const auto map = default_map();
    EXPECT_EQ(map.size(), 6u);
    EXPECT_EQ(map.lookup("Parking on sidewalk"), MetaCategory::ParkingInfractions);
    EXPECT_EQ(map.lookup("  PARKING ON SIDEWALK "), MetaCategory::ParkingInfractions);
    EXPECT_EQ(map.lookup("Open sewage"), MetaCategory::HealthIssues);
    EXPECT_EQ(map.lookup("Pothole"), MetaCategory::Uncategorized);
    EXPECT_EQ(categorize_report(report("r", "Speed excess", {}), map), MetaCategory::TrafficIssues);
}

TEST(CategoryMap, Errors) {
    std::istringstream dup("a\tStreetBlocking\n A \tHealthIssues\n");
    EXPECT_THROW(CategoryMap::parse(dup), ParseError);
    std::istringstream unknown("a\tWeather\n");
    EXPECT_THROW(CategoryMap::parse(unknown), ParseError);
    std::istringstream notab("just text\n");
    EXPECT_THROW(CategoryMap::parse(notab), ParseError);
    EXPECT_THROW(CategoryMap::load("/nonexistent/map.tsv"), ParseError);
    CategoryMap m;
    EXPECT_THROW(m.add("x", MetaCategory::Uncategorized), InvalidInput);
}

TEST(CategoryMap, ParseCategoryForms) {
    EXPECT_EQ(parse_category("ParkingInfractions"), MetaCategory::ParkingInfractions);
    EXPECT_EQ(parse_category("parking infractions"), MetaCategory::ParkingInfractions);
    EXPECT_FALSE(parse_category("Parking"));
    for (auto c : kCategories) {
        EXPECT_EQ(parse_category(to_string(c)), c);
    }
}

TEST(FilterRelevant, KeepsMappedSubdivisionsInOrder) {
    const auto map = default_map();
    const std::vector<ingest::Report> reports{report("1", "Pothole", {}), report("2", "Speed excess", {}),
                                              report("3", "Parking on sidewalk", {})};
    const auto kept = filter_relevant(reports, map);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].report_id, "2");
    EXPECT_EQ(kept[1].report_id, "3");
}

TEST(AssignReports, OverlapGoesToNearestCluster) {
    // A at x=0, B at x=330: a report at x=150 is 150 m from A and 180 m from B.
    const std::vector<GeoPoint> points{east_of_origin(0), east_of_origin(330)};
    const auto clusters = singletons(2);
    const std::vector<ingest::Report> reports{report("r", "Speed excess", east_of_origin(150))};
    const auto out = assign_reports(reports, clusters, points);
    ASSERT_EQ(out.by_cluster[0], std::vector<std::size_t>{0});
    EXPECT_TRUE(out.by_cluster[1].empty());
    ASSERT_EQ(out.overlaps.size(), 1u);
    EXPECT_EQ(out.overlaps[0].chosen, 0u);
    ASSERT_EQ(out.overlaps[0].candidates.size(), 2u);
    EXPECT_NEAR(out.overlaps[0].candidates[0].distance_m, 150, 0.01);
    EXPECT_NEAR(out.overlaps[0].candidates[1].distance_m, 180, 0.01);
}

TEST(AssignReports, OutsideBufferIsUnassigned) {
    const std::vector<GeoPoint> points{east_of_origin(0)};
    const auto clusters = singletons(1);
    const std::vector<ingest::Report> reports{report("in", "x", east_of_origin(199.9)),
                                              report("out", "x", east_of_origin(201))};
    const auto out = assign_reports(reports, clusters, points);
    EXPECT_EQ(out.by_cluster[0], std::vector<std::size_t>{0});
    EXPECT_EQ(out.unassigned, std::vector<std::size_t>{1});
    EXPECT_EQ(out.assigned_count() + out.unassigned.size(), reports.size());
}

TEST(AssignReports, NoClustersLeavesEverythingUnassigned) {
    const std::vector<GeoPoint> points{east_of_origin(0)};
    cluster::ClusterAssignment noise;
    noise.labels = {cluster::kNoise};
    noise.core = {false};
    const std::vector<ingest::Report> reports{report("a", "x", east_of_origin(0))};
    const auto out = assign_reports(reports, noise, points);
    EXPECT_EQ(out.unassigned.size(), 1u);
}

TEST(ComputeStats, DensityMatchesHandComputation) {
    const std::vector<GeoPoint> points{{-25.4284, -49.2733}};
    const auto clusters = singletons(1);
    std::vector<ingest::Report> reports;
    std::vector<MetaCategory> categories;
    for (int i = 0; i < 10; ++i) {
        reports.push_back(report(std::to_string(i), "Parking on sidewalk", points[0]));
        categories.push_back(MetaCategory::ParkingInfractions);
    }
    const auto assigned = assign_reports(reports, clusters, points);
    const auto stats = compute_stats(assigned, categories, clusters, points);
    ASSERT_EQ(stats.size(), 1u);
    const auto& s = stats[0];
    EXPECT_EQ(s.cluster, "A");
    EXPECT_EQ(s.count(MetaCategory::ParkingInfractions), 10u);
    EXPECT_EQ(s.total, 10u);
    const double expected = 10.0 / (s.area_m2 / 100.0);
    EXPECT_NEAR(s.density(MetaCategory::ParkingInfractions), expected, expected * 1e-9);
    const double analytic = 10.0 / (std::numbers::pi * 200 * 200 / 100);
    EXPECT_NEAR(s.density(MetaCategory::ParkingInfractions), analytic, analytic * 0.01);
    EXPECT_NEAR(analytic, 0.00796, 1e-5);
    EXPECT_EQ(s.density(MetaCategory::NoiseProblems), 0.0);
}

TEST(ComputeStats, EmptyReportSet) {
    const std::vector<GeoPoint> points{east_of_origin(0)};
    const auto clusters = singletons(1);
    const auto assigned = assign_reports({}, clusters, points);
    const auto stats = compute_stats(assigned, {}, clusters, points);
    ASSERT_EQ(stats.size(), 1u);
    EXPECT_EQ(stats[0].total, 0u);
    for (auto c : kCategories) {
        EXPECT_EQ(stats[0].count(c), 0u);
        EXPECT_EQ(stats[0].density(c), 0.0);
    }
    EXPECT_FALSE(most_common_category(stats[0]));
}

TEST(ComputeStats, OrderedByName) {
    std::vector<GeoPoint> points;
    for (int i = 0; i < 28; ++i) {
        points.push_back(east_of_origin(1000.0 * i));
    }
    const auto clusters = singletons(28);
    const auto stats = compute_stats(assign_reports({}, clusters, points), {}, clusters, points);
    EXPECT_EQ(stats[25].cluster, "Z");
    EXPECT_EQ(stats[26].cluster, "AA");
}

namespace {

ClusterReportStats with_total(std::string name, std::size_t parking) {
    ClusterReportStats s;
    s.cluster = std::move(name);
    s.counts[static_cast<std::size_t>(MetaCategory::ParkingInfractions)] = parking;
    s.total = parking;
    return s;
}

}  // namespace

TEST(Share, EightyFourOfOneHundred) {
    const std::vector<ClusterReportStats> stats{with_total("A", 6), with_total("B", 10), with_total("C", 50),
                                                with_total("D", 34)};
    EXPECT_EQ(share_of_total(stats, {"C", "D"}), 84.0);
    EXPECT_EQ(share_of_total(stats, {"A", "B", "C", "D"}), 100.0);
    EXPECT_EQ(share_of_total(stats, {}), 0.0);
    EXPECT_THROW(share_of_total(stats, {"Z"}), InvalidInput);
    const std::vector<ClusterReportStats> empty{with_total("A", 0)};
    EXPECT_EQ(share_of_total(empty, {"A"}), 0.0);
}

TEST(MostCommon, TiesFollowDeclarationOrder) {
    ClusterReportStats s;
    s.counts[static_cast<std::size_t>(MetaCategory::ParkingInfractions)] = 4;
    s.counts[static_cast<std::size_t>(MetaCategory::NoiseProblems)] = 4;
    s.total = 8;
    EXPECT_EQ(most_common_category(s), MetaCategory::NoiseProblems);
    s.counts[static_cast<std::size_t>(MetaCategory::ParkingInfractions)] = 5;
    EXPECT_EQ(most_common_category(s), MetaCategory::ParkingInfractions);

    ClusterReportStats t;
    t.counts[static_cast<std::size_t>(MetaCategory::NoiseProblems)] = 3;
    t.total = 3;
    const std::vector<ClusterReportStats> both{s, t};
    EXPECT_EQ(most_common_category(both), MetaCategory::NoiseProblems);  // 7 vs 5
}
