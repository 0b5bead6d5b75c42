#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "urbanpulse/geo.hpp"

namespace urbanpulse::cluster {

struct DbscanParams {
    geo::Meters eps{250.0};
    std::size_t min_pts = 10;

    /// Throws InvalidInput when eps <= 0 or min_pts < 1.
    void validate() const;
};

/// Label value for points that belong to no cluster.
inline constexpr int kNoise = -1;

struct ClusterAssignment {
    /// Per input point: a cluster id in [0, clusters.size()) or kNoise.
    std::vector<int> labels;
    /// Per input point: whether its eps-neighborhood (itself included) holds >= min_pts points.
    std::vector<bool> core;
    /// Cluster id -> ascending member indices.
    std::vector<std::vector<std::size_t>> clusters;
    /// Cluster id -> display name. Empty until name_clusters() runs.
    std::vector<std::string> names;

    std::size_t noise_count() const;
    /// Cluster id for a name, or kNoise if there is none.
    int find(const std::string& name) const;
};

/// DBSCAN with the haversine metric.
///
/// A point is core when at least min_pts points (itself included) lie within
/// eps (inclusive). Clusters are the connected components of core points,
/// seeded in (lat, lon) order. A border point reachable from several clusters
/// joins the one owning its nearest core neighbor, and on an exact distance tie
/// the cluster created first. The result does not depend on input order.
ClusterAssignment dbscan(std::span<const geo::GeoPoint> points, const DbscanParams& params);

/// Letter name for the n-th cluster: A..Z, then AA, AB, ...
std::string cluster_name(std::size_t index);

/// Orders names so that "B" < "Z" < "AA".
bool name_less(const std::string& a, const std::string& b);

/// Relabels clusters so that id 0 is "A", id 1 is "B", ...
///
/// Order: descending member count, then ascending centroid longitude, then
/// ascending centroid latitude. Membership is unchanged.
ClusterAssignment name_clusters(ClusterAssignment assignment, std::span<const geo::GeoPoint> points);

/// Mean latitude and longitude of the given members.
geo::GeoPoint centroid(std::span<const geo::GeoPoint> points, std::span<const std::size_t> members);

/// Copies out the coordinates of one cluster's members.
std::vector<geo::GeoPoint> member_points(const ClusterAssignment& assignment, std::size_t cluster,
                                         std::span<const geo::GeoPoint> points);

}  // namespace urbanpulse::cluster
