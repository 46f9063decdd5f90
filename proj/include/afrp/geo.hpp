#pragma once

#include <span>
#include <vector>

namespace afrp::geo {

constexpr double kEarthRadiusMeters = 6'371'000.0;

// Geographic coordinate in degrees. Construction rejects non-finite or
// out-of-range values with afrp::input_error.
class LatLon {
public:
  LatLon() = default;
  LatLon(double lat, double lon);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  friend bool operator==(LatLon const&, LatLon const&) = default;

private:
  double lat_{0.0};
  double lon_{0.0};
};

// Meters east (x) and north (y) of a local reference origin.
struct PlanarPoint {
  double x{0.0};
  double y{0.0};

  friend bool operator==(PlanarPoint const&, PlanarPoint const&) = default;
};

struct SegmentProjection {
  double t{0.0};  // clamp parameter in [0, 1]
  PlanarPoint foot;
  double distance_m{0.0};
};

struct BBox {
  double min_lat{0.0};
  double min_lon{0.0};
  double max_lat{0.0};
  double max_lon{0.0};

  bool contains(LatLon const& p) const {
    return p.lat() >= min_lat && p.lat() <= max_lat && p.lon() >= min_lon &&
           p.lon() <= max_lon;
  }

  friend bool operator==(BBox const&, BBox const&) = default;
};

double to_radians(double deg);
double to_degrees(double rad);

// Great-circle distance on a sphere of radius kEarthRadiusMeters.
double haversine_distance(LatLon const& a, LatLon const& b);

// Equirectangular projection about `origin`:
//   x = R * dlon * cos(origin.lat), y = R * dlat.
// Accurate to ~0.5% while p stays within one degree of the origin on both
// axes; see PlanarFrame::accurate_for.
PlanarPoint to_planar(LatLon const& p, LatLon const& origin);
LatLon from_planar(PlanarPoint const& p, LatLon const& origin);

class PlanarFrame {
public:
  explicit PlanarFrame(LatLon origin);

  LatLon const& origin() const { return origin_; }
  PlanarPoint to_planar(LatLon const& p) const;
  LatLon to_geo(PlanarPoint const& p) const;

  // False when p is far enough from the origin that planar distances
  // degrade. Callers may warn; the projection still works.
  bool accurate_for(LatLon const& p) const;

private:
  LatLon origin_;
  double cos_lat_;
};

// Perpendicular foot of p on the closed segment [a, b], clamped to the
// endpoints. A degenerate segment (a == b) projects to a with t = 0.
SegmentProjection project_point_to_segment(PlanarPoint const& p,
                                           PlanarPoint const& a,
                                           PlanarPoint const& b);

// Minimum bounding box of `points` grown outward by at least `buffer_m` on
// every side. Never under-sized: every location within buffer_m of an input
// point, by haversine or by the equirectangular frame of any input point,
// lies inside. Throws input_error("empty geometry") on empty input.
BBox buffered_bbox(std::span<LatLon const> points, double buffer_m);

}  // namespace afrp::geo
