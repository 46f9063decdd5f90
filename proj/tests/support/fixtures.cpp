#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmt/core.h"

namespace afrp::testing {

namespace {

constexpr double kR = 6'371'000.0;
constexpr double kOriginLat = 43.4600000;
constexpr double kOriginLon = -3.8200000;
constexpr int kGrid = 12;
constexpr double kBlock = 100.0;

double deg_per_meter_lat() { return 180.0 / (std::numbers::pi * kR); }
double deg_per_meter_lon() {
  return deg_per_meter_lat() / std::cos(kOriginLat * std::numbers::pi / 180.0);
}

// Meters east/north of the grid origin to rounded coordinates.
geo::LatLon at_meters(double x, double y) {
  return {round7(kOriginLat + y * deg_per_meter_lat()),
          round7(kOriginLon + x * deg_per_meter_lon())};
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Ridge along x = 550 m; 45 m high from y = 300 m northwards, dropping to
// 8 m at the southern edge.
double terrain(double x, double y) {
  auto const height = 8.0 + 37.0 * smoothstep(y / 300.0);
  auto const u = (x - 550.0) / 220.0;
  return 5.0 + height * std::exp(-u * u);
}

Tags way_tags(std::string highway) {
  return Tags{{"highway", std::move(highway)}};
}

}  // namespace

double round7(double const deg) {
  return std::stod(fmt::format("{:.7f}", deg));
}

geo::LatLon FixtureCity::node_pos(int const col, int const row) const {
  return doc.nodes.at(node_id(col, row)).pos;
}

osm_id_t FixtureCity::node_id(int const col, int const row) {
  return 1 + row * kGrid + col;
}

FixtureCity make_fixture_city() {
  auto city = FixtureCity{};
  auto& doc = city.doc;
  auto const add_node = [&](osm_id_t id, double x, double y) {
    doc.nodes.emplace(id, OsmNode{.id = id, .pos = at_meters(x, y), .tags = {}});
  };
  auto const add_way = [&](osm_id_t id, std::vector<osm_id_t> refs,
                           std::string highway) {
    doc.ways.emplace(id, OsmWay{.id = id, .node_refs = std::move(refs),
                                .tags = way_tags(std::move(highway))});
  };

  for (auto row = 0; row < kGrid; ++row) {
    for (auto col = 0; col < kGrid; ++col) {
      add_node(FixtureCity::node_id(col, row), col * kBlock, row * kBlock);
    }
  }

  // Block edges: horizontal 10000 + row*100 + col, vertical 20000 + col*100 + row.
  for (auto row = 0; row < kGrid; ++row) {
    for (auto col = 0; col + 1 < kGrid; ++col) {
      add_way(10000 + row * 100 + col,
              {FixtureCity::node_id(col, row), FixtureCity::node_id(col + 1, row)},
              row == 6 ? "tertiary" : "residential");
    }
  }
  for (auto col = 0; col < kGrid; ++col) {
    for (auto row = 0; row + 1 < kGrid; ++row) {
      add_way(20000 + col * 100 + row,
              {FixtureCity::node_id(col, row), FixtureCity::node_id(col, row + 1)},
              col == 0 || col == 11 ? "footway" : "residential");
    }
  }

  // Diagonal footways through blocks, with a midpoint node: the north-west
  // quarter (rows 9-10) and the south-east (rows 0-1). Steps climb the
  // ridge in the far north.
  auto next_node = osm_id_t{500};
  auto next_way = osm_id_t{30000};
  auto const diagonal = [&](int col, int row, std::string highway) {
    auto const mid = next_node++;
    add_node(mid, (col + 0.5) * kBlock, (row + 0.5) * kBlock);
    add_way(next_way++,
            {FixtureCity::node_id(col, row), mid,
             FixtureCity::node_id(col + 1, row + 1)},
            std::move(highway));
  };
  for (auto col = 0; col < 5; ++col) {
    diagonal(col, 9, "footway");
    diagonal(col, 10, "footway");
  }
  for (auto col = 7; col < 11; ++col) {
    diagonal(col, 0, "footway");
    diagonal(col, 1, "path");
  }
  for (auto col = 4; col < 8; ++col) {
    diagonal(col, 10, "steps");
  }

  // Motorway north of the grid, tied to the corners: never walkable.
  auto const motorway_first = next_node;
  for (auto k = 0; k < 7; ++k) {
    add_node(next_node++, k * 1100.0 / 6.0, 1250.0);
  }
  for (auto k = 0; k < 6; ++k) {
    add_way(40000 + k, {motorway_first + k, motorway_first + k + 1}, "motorway");
  }
  // Service spurs, 40 m dead ends.
  for (auto k = 0; k < 6; ++k) {
    auto const col = 1 + 2 * k;
    auto const spur = next_node++;
    add_node(spur, col * kBlock + 40.0, 5 * kBlock + 50.0);
    add_way(50000 + k, {FixtureCity::node_id(col, 5), spur}, "service");
  }

  // Amenities: districts along row 8, west (cols 1-4) and east (cols 6-9).
  auto const kinds = std::array{AmenityKind::bench, AmenityKind::bench,
                                AmenityKind::drinking_water, AmenityKind::bench,
                                AmenityKind::toilets};
  auto n = 0;
  for (auto const first_col : {1, 6}) {
    for (auto k = 0; k < 30; ++k) {
      auto const col = first_col + k % 4;
      auto const frac = 0.3 + 0.4 * (k / 4) / 7.0;
      auto const side = k % 2 == 0 ? 5.0 : -6.0;
      auto const kind = kinds[static_cast<std::size_t>(n) % kinds.size()];
      city.amenities.push_back(Amenity{
          .id = fmt::format("am{:03}", n),
          .kind = kind,
          .pos = at_meters((col + frac) * kBlock, 8 * kBlock + side),
          .name = kind == AmenityKind::toilets
                      ? std::optional<std::string>{fmt::format("Aseo {}", n)}
                      : std::nullopt});
      ++n;
    }
  }

  // Handrails: row 3 (11 ways), columns 0 and 11 between rows 3 and 6, and
  // three of the steps.
  auto h = 0;
  auto const handrail = [&](double x, double y) {
    city.amenities.push_back(Amenity{.id = fmt::format("hr{:02}", h++),
                                     .kind = AmenityKind::handrail,
                                     .pos = at_meters(x, y),
                                     .name = std::nullopt});
  };
  for (auto col = 0; col < 11; ++col) {
    handrail((col + 0.5) * kBlock, 3 * kBlock + 3.0);
  }
  for (auto const col : {0, 11}) {
    for (auto row = 3; row < 6; ++row) {
      handrail(col * kBlock + (col == 0 ? -3.0 : 3.0), (row + 0.5) * kBlock);
    }
  }
  for (auto col = 4; col < 7; ++col) {
    handrail((col + 0.5) * kBlock + 3.0, 10.5 * kBlock);
  }

  // Elevation raster, 0.0002 degree cells with a margin around the grid.
  auto dem = elevation::ElevationRaster{};
  dem.cellsize = 0.0002;
  dem.xll = kOriginLon - 0.002;
  dem.yll = kOriginLat - 0.002;
  dem.ncols = 89;
  dem.nrows = 75;
  dem.nodata = -9999.0;
  for (auto row = std::size_t{0}; row < dem.nrows; ++row) {
    for (auto col = std::size_t{0}; col < dem.ncols; ++col) {
      auto const c = dem.cell_center(row, col);
      auto const x = (c.lon() - kOriginLon) / deg_per_meter_lon();
      auto const y = (c.lat() - kOriginLat) / deg_per_meter_lat();
      dem.values.push_back(std::round(terrain(x, y) * 100.0) / 100.0);
    }
  }
  city.dem_text = format_ascii_grid(dem);
  city.dem = elevation::load_ascii_grid(city.dem_text);
  return city;
}

FixtureTrip fixture_trip(FixtureCity const& city) {
  return {city.node_pos(0, 6), city.node_pos(11, 6)};
}

std::string format_ascii_grid(elevation::ElevationRaster const& r) {
  auto out = fmt::format(
      "ncols {}\nnrows {}\nxllcorner {:.7f}\nyllcorner {:.7f}\ncellsize "
      "{}\nNODATA_value {}\n",
      r.ncols, r.nrows, r.xll, r.yll, r.cellsize, r.nodata);
  for (auto row = std::size_t{0}; row < r.nrows; ++row) {
    for (auto col = std::size_t{0}; col < r.ncols; ++col) {
      out += fmt::format("{}{:.2f}", col == 0 ? "" : " ", r.at(row, col));
    }
    out += '\n';
  }
  return out;
}

AptInstance random_apt_instance(std::mt19937_64& rng, std::size_t max_ways,
                                std::size_t max_amenities) {
  auto inst = AptInstance{};
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>{lo, hi}(rng);
  };
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>{lo, hi}(rng);
  };
  auto const distances = std::array{5.0, 20.0, 50.0};
  inst.max_distance = distances[pick(0, 2)];

  auto const lat0 = uni(-60.0, 60.0);
  auto const lon0 = uni(-170.0, 170.0);
  auto const mlat = deg_per_meter_lat();
  auto const mlon = mlat / std::cos(lat0 * std::numbers::pi / 180.0);
  auto const point = [&](double x, double y) {
    return geo::LatLon{round7(lat0 + y * mlat), round7(lon0 + x * mlon)};
  };

  auto next_node = osm_id_t{1};
  auto const ways = pick(1, max_ways);
  for (auto w = std::size_t{0}; w < ways; ++w) {
    auto way = OsmWay{.id = static_cast<osm_id_t>(1000 + w), .node_refs = {},
                      .tags = way_tags("residential")};
    auto x = uni(-1000.0, 1000.0);
    auto y = uni(-1000.0, 1000.0);
    auto const count = pick(1, 10) == 1 ? 1 : pick(2, 5);
    for (auto k = std::size_t{0}; k < count; ++k) {
      auto const id = next_node++;
      inst.doc.nodes.emplace(id, OsmNode{.id = id, .pos = point(x, y), .tags = {}});
      way.node_refs.push_back(id);
      x += uni(-150.0, 150.0);
      y += uni(-150.0, 150.0);
    }
    if (pick(1, 20) == 1) {
      way.node_refs.push_back(999'999'000 + static_cast<osm_id_t>(w));
    }
    inst.doc.ways.emplace(way.id, std::move(way));
  }

  auto node_ids = std::vector<osm_id_t>{};
  for (auto const& [id, n] : inst.doc.nodes) {
    node_ids.push_back(id);
  }
  auto const amenities = pick(0, max_amenities);
  for (auto a = std::size_t{0}; a < amenities; ++a) {
    auto pos = geo::LatLon{};
    if (a % 2 == 0) {
      pos = point(uni(-1200.0, 1200.0), uni(-1200.0, 1200.0));
    } else {
      auto const& near = inst.doc.nodes.at(node_ids[pick(0, node_ids.size() - 1)]).pos;
      auto const spread = inst.max_distance * 2.0;
      pos = geo::LatLon{round7(near.lat() + uni(-spread, spread) * mlat),
                        round7(near.lon() + uni(-spread, spread) * mlon)};
    }
    inst.amenities.push_back(Amenity{
        .id = fmt::format("a{}", a),
        .kind = kAllAmenityKinds[pick(0, kAmenityKindCount - 1)],
        .pos = pos,
        .name = std::nullopt});
  }
  return inst;
}

graph::RoutingGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes) {
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>{lo, hi}(rng);
  };
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>{lo, hi}(rng);
  };

  auto doc = OsmDocument{};
  auto elevations = std::map<osm_id_t, double>{};
  auto const n = pick(2, max_nodes);
  for (auto i = std::size_t{0}; i < n; ++i) {
    auto const id = static_cast<osm_id_t>(i + 1);
    doc.nodes.emplace(id, OsmNode{.id = id,
                                  .pos = at_meters(uni(0.0, 600.0), uni(0.0, 600.0)),
                                  .tags = {}});
    if (pick(1, 10) != 1) {
      elevations.emplace(id, uni(0.0, 40.0));
    }
  }

  auto const highways =
      std::array<std::string, 4>{"residential", "footway", "steps", "path"};
  auto const ways = pick(n - 1, 2 * n);
  auto witnesses = std::vector<apt::Correlation>{};
  for (auto w = std::size_t{0}; w < ways; ++w) {
    auto const id = static_cast<osm_id_t>(100 + w);
    auto refs = std::vector<osm_id_t>{};
    // Spanning tree first so most graphs are connected, then random extras.
    if (w + 1 < n) {
      refs = {static_cast<osm_id_t>(w + 2), static_cast<osm_id_t>(pick(1, w + 1))};
    } else {
      for (auto k = pick(2, 3); k != 0; --k) {
        refs.push_back(static_cast<osm_id_t>(pick(1, n)));
      }
    }
    doc.ways.emplace(id, OsmWay{.id = id, .node_refs = refs,
                                .tags = way_tags(highways[pick(0, 3)])});
    for (auto k = pick(0, 4); k != 0; --k) {
      auto const pool = pick(0, 11);
      witnesses.push_back(apt::Correlation{
          .way_id = id,
          .amenity_id = fmt::format("p{}", pool),
          .kind = kAllAmenityKinds[pool % kAmenityKindCount],
          .distance_m = 1.0});
    }
  }
  return graph::build_graph(doc, witnesses, &elevations).graph;
}

}  // namespace afrp::testing
