#include "afrp/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmt/core.h"

#include "afrp/error.hpp"

namespace afrp::geo {

namespace {

// Relative slack applied to bbox buffers so boundary points survive
// floating-point rounding in the containment test.
constexpr double kBufferSlack = 1e-9;
constexpr double kMaxPlanarSpanDeg = 1.0;

}  // namespace

LatLon::LatLon(double const lat, double const lon) : lat_{lat}, lon_{lon} {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw input_error{"non-finite coordinate"};
  }
  if (lat < -90.0 || lat > 90.0) {
    throw input_error{fmt::format("latitude {} out of range [-90, 90]", lat)};
  }
  if (lon < -180.0 || lon > 180.0) {
    throw input_error{
        fmt::format("longitude {} out of range [-180, 180]", lon)};
  }
}

double to_radians(double const deg) { return deg * std::numbers::pi / 180.0; }
double to_degrees(double const rad) { return rad * 180.0 / std::numbers::pi; }

double haversine_distance(LatLon const& a, LatLon const& b) {
  auto const lat1 = to_radians(a.lat());
  auto const lat2 = to_radians(b.lat());
  auto const dlat = lat2 - lat1;
  auto const dlon = to_radians(b.lon() - a.lon());
  auto const s_lat = std::sin(dlat / 2.0);
  auto const s_lon = std::sin(dlon / 2.0);
  auto const h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

PlanarPoint to_planar(LatLon const& p, LatLon const& origin) {
  return PlanarFrame{origin}.to_planar(p);
}

LatLon from_planar(PlanarPoint const& p, LatLon const& origin) {
  return PlanarFrame{origin}.to_geo(p);
}

PlanarFrame::PlanarFrame(LatLon origin)
    : origin_{origin}, cos_lat_{std::cos(to_radians(origin.lat()))} {}

PlanarPoint PlanarFrame::to_planar(LatLon const& p) const {
  return {.x = kEarthRadiusMeters * to_radians(p.lon() - origin_.lon()) *
               cos_lat_,
          .y = kEarthRadiusMeters * to_radians(p.lat() - origin_.lat())};
}

LatLon PlanarFrame::to_geo(PlanarPoint const& p) const {
  return {origin_.lat() + to_degrees(p.y / kEarthRadiusMeters),
          origin_.lon() + to_degrees(p.x / (kEarthRadiusMeters * cos_lat_))};
}

bool PlanarFrame::accurate_for(LatLon const& p) const {
  return std::abs(p.lat() - origin_.lat()) < kMaxPlanarSpanDeg &&
         std::abs(p.lon() - origin_.lon()) < kMaxPlanarSpanDeg;
}

SegmentProjection project_point_to_segment(PlanarPoint const& p,
                                           PlanarPoint const& a,
                                           PlanarPoint const& b) {
  auto const dx = b.x - a.x;
  auto const dy = b.y - a.y;
  auto const len2 = dx * dx + dy * dy;
  auto t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  auto const foot = PlanarPoint{a.x + t * dx, a.y + t * dy};
  return {.t = t,
          .foot = foot,
          .distance_m = std::hypot(p.x - foot.x, p.y - foot.y)};
}

BBox buffered_bbox(std::span<LatLon const> points, double const buffer_m) {
  if (points.empty()) {
    throw input_error{"empty geometry"};
  }
  if (!(buffer_m >= 0.0)) {
    throw input_error{fmt::format("negative buffer {}", buffer_m)};
  }

  auto box = BBox{points.front().lat(), points.front().lon(),
                  points.front().lat(), points.front().lon()};
  auto max_abs_lat = 0.0;
  for (auto const& p : points) {
    box.min_lat = std::min(box.min_lat, p.lat());
    box.max_lat = std::max(box.max_lat, p.lat());
    box.min_lon = std::min(box.min_lon, p.lon());
    box.max_lon = std::max(box.max_lon, p.lon());
    max_abs_lat = std::max(max_abs_lat, std::abs(p.lat()));
  }
  if (buffer_m == 0.0) {
    return box;
  }

  auto const arc = buffer_m / kEarthRadiusMeters * (1.0 + kBufferSlack);
  auto const dlat = to_degrees(arc);

  // Planar frames anchored at any input point need dlat / cos(lat). The
  // spherical cap around a point reaches further in longitude, up to
  // asin(sin(arc) / cos(lat')) with lat' the most poleward latitude inside
  // the cap, so take the larger of both.
  auto const cos_geom = std::cos(to_radians(max_abs_lat));
  auto const cos_cap =
      std::cos(to_radians(std::min(max_abs_lat + dlat, 89.999999)));
  auto const planar_dlon = dlat / cos_geom;
  auto const sphere_dlon =
      to_degrees(std::asin(std::min(1.0, std::sin(arc) / cos_cap)));
  auto const dlon = std::max(planar_dlon, sphere_dlon) * (1.0 + kBufferSlack);

  box.min_lat -= dlat;
  box.max_lat += dlat;
  box.min_lon -= dlon;
  box.max_lon += dlon;
  return box;
}

}  // namespace afrp::geo
