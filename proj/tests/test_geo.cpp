#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gallery_sync/geo.hpp"

using namespace gsync;
using geo::kEarthRadius;

namespace {

double haversine(GeoPoint a, GeoPoint b) {
  const double r = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * r, dlon = (b.lon - a.lon) * r;
  const double h = std::pow(std::sin(dlat / 2), 2) + std::cos(a.lat * r) * std::cos(b.lat * r) * std::pow(std::sin(dlon / 2), 2);
  return 2 * kEarthRadius * std::asin(std::sqrt(h));
}

}  // namespace

TEST_CASE("sphere axes") {
  auto x = geo::to_sphere(0, 0);
  CHECK(x[0] == doctest::Approx(kEarthRadius));
  CHECK(std::abs(x[1]) < 1e-6);
  CHECK(std::abs(x[2]) < 1e-6);
  auto pole = geo::to_sphere(90, 37);
  CHECK(std::abs(pole[0]) < 1e-6);
  CHECK(std::abs(pole[1]) < 1e-6);
  CHECK(pole[2] == doctest::Approx(kEarthRadius));
  auto y = geo::to_sphere(0, 90);
  CHECK(std::abs(y[0]) < 1e-6);
  CHECK(y[1] == doctest::Approx(kEarthRadius));
}

TEST_CASE("quarter circle and antipode") {
  const double quarter = geo::orthodromic_distance(GeoPoint{0, 0}, GeoPoint{0, 90});
  CHECK(std::abs(quarter - std::numbers::pi * kEarthRadius / 2) / quarter < 1e-6);
  CHECK(std::abs(quarter - 10'007'543.0) < 1.0);
  const double half = geo::orthodromic_distance(GeoPoint{0, 0}, GeoPoint{0, 180});
  CHECK(std::abs(half - std::numbers::pi * kEarthRadius) / half < 1e-6);
}

TEST_CASE("zero for coincident or missing points") {
  const GeoPoint p{49.28, -123.12};
  CHECK(geo::orthodromic_distance(p, p) == 0.0);
  CHECK(geo::orthodromic_distance(std::optional<GeoPoint>{}, std::optional<GeoPoint>{p}) == 0.0);
  CHECK(geo::orthodromic_distance(std::optional<GeoPoint>{p}, std::optional<GeoPoint>{}) == 0.0);
  CHECK(geo::orthodromic_distance(std::optional<GeoPoint>{p}, std::optional<GeoPoint>{GeoPoint{49.29, -123.12}}) > 0.0);
}

TEST_CASE("symmetric and consistent with the haversine form") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  for (int i = 0; i < 200; ++i) {
    GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)};
    const double d = geo::orthodromic_distance(a, b);
    CHECK(d == geo::orthodromic_distance(b, a));
    CHECK(d > 0.0);
    CHECK(d <= std::numbers::pi * kEarthRadius * (1 + 1e-12));
    CHECK(d == doctest::Approx(haversine(a, b)).epsilon(1e-6));
  }
}
