#pragma once

#include <random>
#include <string>
#include <vector>

#include "afrp/apt.hpp"
#include "afrp/elevation.hpp"
#include "afrp/graph.hpp"
#include "afrp/osm_io.hpp"

namespace afrp::testing {

// Rounds to the 7 decimals used by OSM files so in-memory fixtures survive
// a write/parse cycle bit for bit.
double round7(double deg);

// Synthetic city: a 12 x 12 street grid with 100 m blocks (one way per
// block edge), diagonal footways and steps, non-walkable motorway and some
// service spurs (~300 ways). A north-south ridge crosses the middle and
// flattens towards the southern edge. Sixty amenities sit in two districts
// along row 8 and twenty handrails mark a corridor along row 3.
struct FixtureCity {
  OsmDocument doc;
  std::vector<Amenity> amenities;
  std::string dem_text;
  elevation::ElevationRaster dem;

  geo::LatLon node_pos(int col, int row) const;
  static osm_id_t node_id(int col, int row);
};

FixtureCity make_fixture_city();

// Origin and destination used to compare the four weight profiles.
struct FixtureTrip {
  geo::LatLon from;
  geo::LatLon to;
};
FixtureTrip fixture_trip(FixtureCity const&);

std::string format_ascii_grid(elevation::ElevationRaster const&);

struct AptInstance {
  OsmDocument doc;
  std::vector<Amenity> amenities;
  double max_distance{20.0};
};

// Up to `max_ways` random polyline ways and `max_amenities` amenities, half
// of them placed close to way nodes. Some ways reference missing nodes.
AptInstance random_apt_instance(std::mt19937_64& rng, std::size_t max_ways,
                                std::size_t max_amenities);

// Small random walking graph built through build_graph: random node
// positions and elevations (some missing), mixed highway classes including
// steps, and random amenity witnesses drawn from a shared id pool.
graph::RoutingGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes);

}  // namespace afrp::testing
