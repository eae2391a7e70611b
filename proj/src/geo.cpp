#include "gallery_sync/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gsync::geo {

std::array<double, 3> to_sphere(double lat_deg, double lon_deg) {
  const double lat = lat_deg * std::numbers::pi / 180.0;
  const double lon = lon_deg * std::numbers::pi / 180.0;
  return {kEarthRadius * std::cos(lat) * std::cos(lon), kEarthRadius * std::cos(lat) * std::sin(lon),
          kEarthRadius * std::sin(lat)};
}

double orthodromic_distance(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return 0.0;
  const auto za = to_sphere(a.lat, a.lon);
  const auto zb = to_sphere(b.lat, b.lon);
  const double chord = std::hypot(za[0] - zb[0], za[1] - zb[1], za[2] - zb[2]);
  // Rounding can push the chord a hair past the diameter for antipodes.
  return 2.0 * kEarthRadius * std::asin(std::min(1.0, chord / (2.0 * kEarthRadius)));
}

double orthodromic_distance(const std::optional<GeoPoint>& a, const std::optional<GeoPoint>& b) {
  if (!a || !b) return 0.0;
  return orthodromic_distance(*a, *b);
}

}  // namespace gsync::geo
