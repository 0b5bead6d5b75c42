#include "urbanpulse/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "urbanpulse/error.hpp"

namespace urbanpulse::geo {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double hav(double angle) {
    const double s = std::sin(angle / 2.0);
    return s * s;
}

struct RowSpan {
    std::int64_t row;
    std::int64_t first;
    std::int64_t last;

    friend bool operator<(const RowSpan& a, const RowSpan& b) {
        return a.row != b.row ? a.row < b.row : a.first < b.first;
    }
};

}  // namespace

bool GeoPoint::is_valid(double lat, double lon) noexcept {
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 && lon >= -180.0 &&
           lon <= 180.0;
}

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
    if (!is_valid(lat, lon)) {
        throw InvalidInput("coordinate out of range: (" + std::to_string(lat) + ", " + std::to_string(lon) + ")");
    }
}

Meters::Meters(double value) : value_(value) {
    if (!std::isfinite(value) || value < 0.0) {
        throw InvalidInput("distance must be finite and non-negative, got " + std::to_string(value));
    }
}

Meters haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = a.lat() * kDegToRad;
    const double lat2 = b.lat() * kDegToRad;
    const double h = hav(lat2 - lat1) + std::cos(lat1) * std::cos(lat2) * hav((b.lon() - a.lon()) * kDegToRad);
    const double central = 2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
    return Meters(kEarthRadiusM * central);
}

Meters min_distance_to_set(const GeoPoint& p, std::span<const GeoPoint> members) {
    if (members.empty()) {
        throw InvalidInput("min_distance_to_set: empty member set");
    }
    Meters best = haversine_distance(p, members.front());
    for (const GeoPoint& m : members.subspan(1)) {
        best = std::min(best, haversine_distance(p, m));
    }
    return best;
}

double union_buffer_area(std::span<const GeoPoint> members, Meters radius, double cell_m) {
    if (members.empty()) {
        throw InvalidInput("union_buffer_area: empty member set");
    }
    if (radius.value() <= 0.0) {
        throw InvalidInput("union_buffer_area: radius must be positive");
    }
    if (!std::isfinite(cell_m) || cell_m <= 0.0) {
        throw InvalidInput("union_buffer_area: cell size must be positive");
    }

    const double angular = radius.value() / kEarthRadiusM;
    const double hav_radius = hav(angular);

    std::vector<RowSpan> spans;
    for (const GeoPoint& m : members) {
        const double phi = m.lat() * kDegToRad;
        const double lambda = m.lon() * kDegToRad;
        const double y_lo = kEarthRadiusM * (phi - angular);
        const double y_hi = kEarthRadiusM * (phi + angular);
        const auto row_first = static_cast<std::int64_t>(std::ceil(y_lo / cell_m - 0.5));
        const auto row_last = static_cast<std::int64_t>(std::floor(y_hi / cell_m - 0.5));

        for (std::int64_t row = row_first; row <= row_last; ++row) {
            const double row_phi = (static_cast<double>(row) + 0.5) * cell_m / kEarthRadiusM;
            const double hav_dphi = hav(row_phi - phi);
            if (hav_dphi > hav_radius) {
                continue;
            }
            const double cos_product = std::cos(row_phi) * std::cos(phi);
            if (cos_product <= 0.0) {
                continue;
            }
            const double s = (hav_radius - hav_dphi) / cos_product;
            const double half_width = s >= 1.0 ? std::numbers::pi : 2.0 * std::asin(std::sqrt(s));

            // Column j has its center at (j + 0.5) * cell_m meters along this parallel.
            const double parallel_radius = kEarthRadiusM * std::cos(row_phi);
            const double x_lo = parallel_radius * (lambda - half_width);
            const double x_hi = parallel_radius * (lambda + half_width);
            const auto first = static_cast<std::int64_t>(std::ceil(x_lo / cell_m - 0.5));
            const auto last = static_cast<std::int64_t>(std::floor(x_hi / cell_m - 0.5));
            if (first <= last) {
                spans.push_back({row, first, last});
            }
        }
    }

    std::sort(spans.begin(), spans.end());

    std::int64_t cells = 0;
    std::size_t i = 0;
    while (i < spans.size()) {
        const std::int64_t row = spans[i].row;
        std::int64_t cur_first = spans[i].first;
        std::int64_t cur_last = spans[i].last;
        for (++i; i < spans.size() && spans[i].row == row; ++i) {
            if (spans[i].first > cur_last + 1) {
                cells += cur_last - cur_first + 1;
                cur_first = spans[i].first;
                cur_last = spans[i].last;
            } else {
                cur_last = std::max(cur_last, spans[i].last);
            }
        }
        cells += cur_last - cur_first + 1;
    }

    return static_cast<double>(cells) * cell_m * cell_m;
}

}  // namespace urbanpulse::geo
