#pragma once

#include <span>

namespace urbanpulse::geo {

/// Mean Earth radius used for every distance and area computation.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// A WGS-84 style coordinate pair in decimal degrees.
///
/// Construction validates the ranges; a default-constructed point is (0, 0).
class GeoPoint {
public:
    constexpr GeoPoint() = default;
    /// Throws InvalidInput if either value is non-finite or out of range.
    GeoPoint(double lat, double lon);

    constexpr double lat() const noexcept { return lat_; }
    constexpr double lon() const noexcept { return lon_; }

    static bool is_valid(double lat, double lon) noexcept;

    friend constexpr bool operator==(const GeoPoint&, const GeoPoint&) = default;

private:
    double lat_ = 0.0;
    double lon_ = 0.0;
};

/// Non-negative distance in meters.
class Meters {
public:
    constexpr Meters() = default;
    /// Throws InvalidInput on negative or non-finite values.
    explicit Meters(double value);

    constexpr double value() const noexcept { return value_; }

    friend constexpr auto operator<=>(const Meters&, const Meters&) = default;

private:
    double value_ = 0.0;
};

/// Great-circle distance on a sphere of radius kEarthRadiusM.
Meters haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Smallest haversine distance from p to any member. Throws InvalidInput on an empty set.
Meters min_distance_to_set(const GeoPoint& p, std::span<const GeoPoint> members);

/// Area in square meters of the union of geodesic disks of the given radius
/// around each member ("dissolved buffer").
///
/// The estimate counts grid cells whose centers fall inside the union. Rows
/// are fixed bands of `cell_m` meters of arc along the meridian; within a row
/// columns are `cell_m` wide along the row's parallel (a sinusoidal, hence
/// equal-area, grid). The grid does not depend on the member set, so adding
/// members can only add cells. Per-row disk extents are solved exactly from
/// the haversine relation. Clusters spanning the antimeridian are not
/// supported.
///
/// Throws InvalidInput for an empty member set, radius <= 0 or cell_m <= 0.
double union_buffer_area(std::span<const GeoPoint> members, Meters radius, double cell_m = 5.0);

}  // namespace urbanpulse::geo
