#pragma once

#include <array>
#include <optional>

#include "gallery_sync/collection.hpp"

namespace gsync::geo {

/// Mean Earth radius in meters; the sphere every distance here is measured on.
inline constexpr double kEarthRadius = 6'371'000.0;

/// Cartesian point on the sphere for a (lat, lon) in degrees.
std::array<double, 3> to_sphere(double lat_deg, double lon_deg);

/// Great-circle distance in meters via the chord length: 2R asin(|za - zb| / 2R).
double orthodromic_distance(const GeoPoint& a, const GeoPoint& b);

/// Missing coordinates on either side mean "no information": distance 0.
double orthodromic_distance(const std::optional<GeoPoint>& a, const std::optional<GeoPoint>& b);

}  // namespace gsync::geo
