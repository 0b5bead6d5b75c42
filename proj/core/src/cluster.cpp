#include "urbanpulse/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "urbanpulse/error.hpp"

namespace urbanpulse::cluster {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

using NeighborLists = std::vector<std::vector<std::size_t>>;

NeighborLists brute_force_neighbors(std::span<const geo::GeoPoint> points, double eps) {
    NeighborLists out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (geo::haversine_distance(points[i], points[j]).value() <= eps) {
                out[i].push_back(j);
            }
        }
    }
    return out;
}

// Buckets points into latitude bands of eps arc length and longitude columns
// wide enough that any pair within eps sits in adjacent cells. Every candidate
// is re-checked with the exact haversine distance, so the index only prunes.
NeighborLists grid_neighbors(std::span<const geo::GeoPoint> points, double eps) {
    const double angular = eps / geo::kEarthRadiusM;
    double max_abs_lat = 0.0;
    for (const auto& p : points) {
        max_abs_lat = std::max(max_abs_lat, std::abs(p.lat()) * kDegToRad);
    }
    const double cos_lat = std::cos(max_abs_lat);
    const double s = std::sin(angular / 2.0) / cos_lat;
    if (!(cos_lat > 1e-9) || s >= 1.0) {
        return brute_force_neighbors(points, eps);
    }
    const double max_dlon = 2.0 * std::asin(s) * (1.0 + 1e-9);
    const auto columns = static_cast<std::int64_t>(std::floor(2.0 * std::numbers::pi / max_dlon));
    if (columns < 3) {
        return brute_force_neighbors(points, eps);
    }
    const double column_width = 2.0 * std::numbers::pi / static_cast<double>(columns);

    auto cell_of = [&](const geo::GeoPoint& p) {
        const auto row = static_cast<std::int64_t>(std::floor(p.lat() * kDegToRad / angular));
        auto col = static_cast<std::int64_t>(std::floor((p.lon() * kDegToRad + std::numbers::pi) / column_width));
        col = ((col % columns) + columns) % columns;
        return std::pair{row, col};
    };
    auto key = [](std::int64_t row, std::int64_t col) { return (row << 32) ^ col; };

    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;
    std::vector<std::pair<std::int64_t, std::int64_t>> cells(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        cells[i] = cell_of(points[i]);
        grid[key(cells[i].first, cells[i].second)].push_back(i);
    }

    NeighborLists out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [row, col] = cells[i];
        for (std::int64_t dr = -1; dr <= 1; ++dr) {
            for (std::int64_t dc = -1; dc <= 1; ++dc) {
                const std::int64_t c = ((col + dc) % columns + columns) % columns;
                const auto it = grid.find(key(row + dr, c));
                if (it == grid.end()) {
                    continue;
                }
                for (std::size_t j : it->second) {
                    if (geo::haversine_distance(points[i], points[j]).value() <= eps) {
                        out[i].push_back(j);
                    }
                }
            }
        }
        // With three or fewer columns the wrapped offsets can revisit a cell.
        std::sort(out[i].begin(), out[i].end());
        out[i].erase(std::unique(out[i].begin(), out[i].end()), out[i].end());
    }
    return out;
}

}  // namespace

void DbscanParams::validate() const {
    if (eps.value() <= 0.0) {
        throw InvalidInput("dbscan: eps must be positive");
    }
    if (min_pts < 1) {
        throw InvalidInput("dbscan: min_pts must be at least 1");
    }
}

std::size_t ClusterAssignment::noise_count() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

int ClusterAssignment::find(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? kNoise : static_cast<int>(it - names.begin());
}

ClusterAssignment dbscan(std::span<const geo::GeoPoint> points, const DbscanParams& params) {
    params.validate();
    const double eps = params.eps.value();

    ClusterAssignment out;
    out.labels.assign(points.size(), kNoise);
    out.core.assign(points.size(), false);
    if (points.empty()) {
        return out;
    }

    const NeighborLists neighbors = grid_neighbors(points, eps);
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.core[i] = neighbors[i].size() >= params.min_pts;
    }

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tuple(points[a].lat(), points[a].lon(), a) < std::tuple(points[b].lat(), points[b].lon(), b);
    });

    // Expand connected components of core points.
    int next_id = 0;
    std::vector<std::size_t> stack;
    for (std::size_t seed : order) {
        if (!out.core[seed] || out.labels[seed] != kNoise) {
            continue;
        }
        const int id = next_id++;
        out.labels[seed] = id;
        stack.assign(1, seed);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            for (std::size_t q : neighbors[p]) {
                if (out.core[q] && out.labels[q] == kNoise) {
                    out.labels[q] = id;
                    stack.push_back(q);
                }
            }
        }
    }

    // Border points: nearest core neighbor wins, then the older cluster.
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (out.core[i]) {
            continue;
        }
        double best_distance = 0.0;
        int best_label = kNoise;
        for (std::size_t q : neighbors[i]) {
            if (!out.core[q]) {
                continue;
            }
            const double d = geo::haversine_distance(points[i], points[q]).value();
            if (best_label == kNoise || d < best_distance || (d == best_distance && out.labels[q] < best_label)) {
                best_distance = d;
                best_label = out.labels[q];
            }
        }
        out.labels[i] = best_label;
    }

    out.clusters.resize(static_cast<std::size_t>(next_id));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (out.labels[i] != kNoise) {
            out.clusters[static_cast<std::size_t>(out.labels[i])].push_back(i);
        }
    }
    out.names.assign(out.clusters.size(), std::string{});
    return out;
}

std::string cluster_name(std::size_t index) {
    std::string name;
    std::size_t n = index + 1;
    while (n > 0) {
        --n;
        name.insert(name.begin(), static_cast<char>('A' + n % 26));
        n /= 26;
    }
    return name;
}

bool name_less(const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
}

geo::GeoPoint centroid(std::span<const geo::GeoPoint> points, std::span<const std::size_t> members) {
    if (members.empty()) {
        throw InvalidInput("centroid: empty member set");
    }
    double lat = 0.0;
    double lon = 0.0;
    for (std::size_t i : members) {
        lat += points[i].lat();
        lon += points[i].lon();
    }
    const auto n = static_cast<double>(members.size());
    return geo::GeoPoint(lat / n, lon / n);
}

std::vector<geo::GeoPoint> member_points(const ClusterAssignment& assignment, std::size_t cluster,
                                         std::span<const geo::GeoPoint> points) {
    std::vector<geo::GeoPoint> out;
    out.reserve(assignment.clusters.at(cluster).size());
    for (std::size_t i : assignment.clusters[cluster]) {
        out.push_back(points[i]);
    }
    return out;
}

ClusterAssignment name_clusters(ClusterAssignment assignment, std::span<const geo::GeoPoint> points) {
    if (assignment.labels.size() != points.size()) {
        throw InvalidInput("name_clusters: assignment does not match point count");
    }
    const std::size_t k = assignment.clusters.size();
    std::vector<geo::GeoPoint> centers;
    centers.reserve(k);
    for (const auto& members : assignment.clusters) {
        centers.push_back(centroid(points, members));
    }

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ma = assignment.clusters[a];
        const auto& mb = assignment.clusters[b];
        if (ma.size() != mb.size()) {
            return ma.size() > mb.size();
        }
        if (centers[a].lon() != centers[b].lon()) {
            return centers[a].lon() < centers[b].lon();
        }
        if (centers[a].lat() != centers[b].lat()) {
            return centers[a].lat() < centers[b].lat();
        }
        return ma.front() < mb.front();
    });

    std::vector<int> remap(k);
    ClusterAssignment named;
    named.core = std::move(assignment.core);
    named.clusters.reserve(k);
    for (std::size_t rank = 0; rank < k; ++rank) {
        remap[order[rank]] = static_cast<int>(rank);
        named.clusters.push_back(std::move(assignment.clusters[order[rank]]));
        named.names.push_back(cluster_name(rank));
    }
    named.labels = std::move(assignment.labels);
    for (int& label : named.labels) {
        if (label != kNoise) {
            label = remap[static_cast<std::size_t>(label)];
        }
    }
    return named;
}

}  // namespace urbanpulse::cluster
