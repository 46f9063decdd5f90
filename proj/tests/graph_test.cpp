#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "afrp/error.hpp"
#include "afrp/graph.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace afrp;
using graph::build_graph;

namespace {

OsmDocument street(std::vector<geo::LatLon> const& pts,
                   std::string highway = "residential") {
  auto doc = OsmDocument{};
  auto way = OsmWay{.id = 100, .node_refs = {}, .tags = {{"highway", highway}}};
  for (auto i = std::size_t{0}; i < pts.size(); ++i) {
    auto const id = static_cast<osm_id_t>(i + 1);
    doc.nodes.emplace(id, OsmNode{.id = id, .pos = pts[i], .tags = {}});
    way.node_refs.push_back(id);
  }
  doc.ways.emplace(way.id, way);
  return doc;
}

geo::LatLon north_of(geo::LatLon p, double meters) {
  auto const [lat, lon] = testing::destination(p.lat(), p.lon(), 0.0, meters);
  return {lat, lon};
}

apt::Correlation witness(osm_id_t way, std::string id, AmenityKind k) {
  return {.way_id = way, .amenity_id = std::move(id), .kind = k, .distance_m = 1.0};
}

void check_invariants(graph::RoutingGraph const& g) {
  REQUIRE(g.first_out.size() == g.vertices.size() + 1);
  REQUIRE(g.first_out.back() == g.edges.size());
  REQUIRE(std::is_sorted(begin(g.amenity_ids), end(g.amenity_ids)));
  for (auto v = graph::vertex_id{0}; v < g.vertices.size(); ++v) {
    REQUIRE(g.vertices[v].id == v);
    REQUIRE_FALSE(g.out_edges(v).empty());
    for (auto const& e : g.out_edges(v)) {
      REQUIRE(e.from == v);
    }
  }
  for (auto i = graph::edge_id{0}; i < g.edges.size(); ++i) {
    auto const& e = g.edges[i];
    auto const& r = g.edges[e.reverse];
    REQUIRE(r.reverse == i);
    REQUIRE(r.from == e.to);
    REQUIRE(r.to == e.from);
    REQUIRE(r.way == e.way);
    REQUIRE(r.length_m == e.length_m);
    REQUIRE(r.grade == -e.grade);
    REQUIRE(r.grade_unknown == e.grade_unknown);
    REQUIRE(e.length_m > 0.0);
    REQUIRE(std::abs(e.grade) <= g.config.max_grade_clamp);
  }
}

}  // namespace

TEST_CASE("a three-node way becomes two edge pairs") {
  auto const a = geo::LatLon{43.46, -3.81};
  auto const doc = street({a, north_of(a, 50), north_of(a, 120)});
  auto const [g, report] = build_graph(doc, {}, nullptr);
  CHECK(g.vertices.size() == 3);
  CHECK(g.edges.size() == 4);
  CHECK(g.ways.size() == 1);
  CHECK(report.unknown_elevations == 3);
  for (auto const& e : g.edges) {
    CHECK(e.grade == 0.0);
    CHECK(e.grade_unknown);
  }
  CHECK(g.ways[0].length_m == doctest::Approx(120.0).epsilon(1e-9));
  check_invariants(g);
}

TEST_CASE("grades follow elevation") {
  auto const a = geo::LatLon{43.46, -3.81};
  auto const b = north_of(a, 100);
  auto const doc = street({a, b});
  auto const len = testing::vector_distance(a.lat(), a.lon(), b.lat(), b.lon());

  SUBCASE("rise of 8 m over 100 m") {
    auto const elev = std::map<osm_id_t, double>{{1, 0.0}, {2, 8.0}};
    auto const [g, report] = build_graph(doc, {}, &elev);
    REQUIRE(g.edges.size() == 2);
    auto const& fwd = g.edges[g.first_edge(0)];
    CHECK(fwd.to == 1);
    CHECK(fwd.grade == doctest::Approx(8.0 / len).epsilon(1e-12));
    CHECK(fwd.grade == doctest::Approx(0.08).epsilon(1e-6));
    CHECK(g.edges[fwd.reverse].grade == -fwd.grade);
    CHECK_FALSE(fwd.grade_unknown);
    CHECK(report.unknown_elevations == 0);
    CHECK(g.duration_s(fwd) == doctest::Approx(len / 1.33));
  }

  SUBCASE("flat elevations give zero grades") {
    auto const elev = std::map<osm_id_t, double>{{1, 12.0}, {2, 12.0}};
    auto const [g, report] = build_graph(doc, {}, &elev);
    for (auto const& e : g.edges) {
      CHECK(e.grade == 0.0);
      CHECK_FALSE(e.grade_unknown);
    }
  }

  SUBCASE("clamped to the configured maximum") {
    auto const elev = std::map<osm_id_t, double>{{1, 0.0}, {2, 300.0}};
    auto cfg = graph::BuildConfig{};
    cfg.max_grade_clamp = 0.5;
    auto const [g, report] = build_graph(doc, {}, &elev, cfg);
    CHECK(g.edges[0].grade == 0.5);
    CHECK(g.edges[1].grade == -0.5);
  }

  SUBCASE("one missing elevation flags the edge") {
    auto const elev = std::map<osm_id_t, double>{{1, 5.0}};
    auto const [g, report] = build_graph(doc, {}, &elev);
    CHECK(report.unknown_elevations == 1);
    CHECK(g.edges[0].grade == 0.0);
    CHECK(g.edges[0].grade_unknown);
  }

  SUBCASE("steps carry the fixed grade signed by the climb") {
    auto const down = std::map<osm_id_t, double>{{1, 10.0}, {2, 9.0}};
    auto const s = street({a, b}, "steps");
    auto const [g, report] = build_graph(s, {}, &down);
    auto const& fwd = g.edges[g.first_edge(0)];
    CHECK(fwd.grade == -0.35);
    CHECK(g.edges[fwd.reverse].grade == 0.35);
  }
}

TEST_CASE("way filtering and degenerate segments") {
  auto const a = geo::LatLon{43.46, -3.81};
  auto doc = street({a, north_of(a, 30)});
  doc.nodes.emplace(3, OsmNode{.id = 3, .pos = north_of(a, 60), .tags = {}});
  doc.ways.emplace(200, OsmWay{.id = 200, .node_refs = {2, 3},
                               .tags = {{"highway", "motorway"}}});
  doc.ways.emplace(300, OsmWay{.id = 300, .node_refs = {2, 3, 404},
                               .tags = {{"highway", "footway"}}});
  doc.ways.emplace(400, OsmWay{.id = 400, .node_refs = {2, 2, 3},
                               .tags = {{"highway", "path"}}});
  doc.ways.emplace(500, OsmWay{.id = 500, .node_refs = {1},
                               .tags = {{"highway", "path"}}});
  doc.ways.emplace(600, OsmWay{.id = 600, .node_refs = {1, 2}, .tags = {}});

  auto const [g, report] = build_graph(doc, {}, nullptr);
  CHECK(report.skipped_ways == 1);
  CHECK(report.dropped_segments == 1);
  REQUIRE(g.ways.size() == 2);
  CHECK(g.ways[0].way_id == 100);
  CHECK(g.ways[1].way_id == 400);
  CHECK(g.vertices.size() == 3);
  CHECK(g.edges.size() == 4);
  check_invariants(g);

  CHECK(build_graph(OsmDocument{}, {}, nullptr).graph.empty());
}

TEST_CASE("witnesses attach to every edge of their way") {
  auto const a = geo::LatLon{43.46, -3.81};
  auto doc = street({a, north_of(a, 40), north_of(a, 80)});
  doc.ways.emplace(200, OsmWay{.id = 200, .node_refs = {1, 3},
                               .tags = {{"highway", "motorway"}}});
  auto const ws = std::vector{
      witness(100, "b2", AmenityKind::bench),
      witness(100, "b1", AmenityKind::bench),
      witness(100, "b1", AmenityKind::bench),
      witness(100, "h", AmenityKind::handrail),
      witness(200, "t", AmenityKind::toilets),
  };
  auto const [g, report] = build_graph(doc, ws, nullptr);
  CHECK(g.amenity_ids == std::vector<std::string>{"b1", "b2", "h"});
  for (auto const& e : g.edges) {
    auto const& w = g.way_of(e);
    CHECK(w.of(AmenityKind::bench).size() == 2);
    CHECK(w.of(AmenityKind::handrail).size() == 1);
    CHECK(w.of(AmenityKind::toilets).empty());
  }

  SUBCASE("unknown way is an error") {
    auto bad = ws;
    bad.push_back(witness(999, "x", AmenityKind::bench));
    CHECK_THROWS_WITH_AS(build_graph(doc, bad, nullptr),
                         doctest::Contains("way 999"), input_error);
  }
  SUBCASE("conflicting kinds are an error") {
    auto bad = ws;
    bad.push_back(witness(100, "h", AmenityKind::bench));
    CHECK_THROWS_WITH_AS(build_graph(doc, bad, nullptr),
                         doctest::Contains("conflicting kinds"), input_error);
  }
}

TEST_CASE("random graphs satisfy the structural invariants") {
  auto rng = std::mt19937_64{11};
  for (auto trial = 0; trial < 100; ++trial) {
    auto const g = testing::random_graph(rng, 25);
    check_invariants(g);
    auto out_sum = std::size_t{0};
    for (auto v = graph::vertex_id{0}; v < g.vertices.size(); ++v) {
      out_sum += g.out_edges(v).size();
    }
    REQUIRE(out_sum == g.edges.size());
    REQUIRE(g.edges.size() % 2 == 0);
  }
}

TEST_CASE("building is deterministic") {
  auto const city = testing::make_fixture_city();
  auto const ws = apt::correlate(city.doc, city.amenities, 20.0).correlations;
  auto const elev = elevation::assign_elevations(city.doc, city.dem).meters;
  auto const a = build_graph(city.doc, ws, &elev).graph;
  auto shuffled = ws;
  auto rng = std::mt19937_64{1};
  std::shuffle(begin(shuffled), end(shuffled), rng);
  auto const b = build_graph(city.doc, shuffled, &elev).graph;
  CHECK(a == b);
  CHECK(graph::serialize(a) == graph::serialize(b));
  check_invariants(a);
}

TEST_CASE("nearest_vertex") {
  auto rng = std::mt19937_64{21};
  auto u = std::uniform_real_distribution{-0.003, 0.003};
  for (auto trial = 0; trial < 30; ++trial) {
    auto const g = testing::random_graph(rng, 30);
    for (auto q = 0; q < 20; ++q) {
      auto const p = geo::LatLon{43.46 + u(rng), -3.81 + u(rng)};
      REQUIRE(graph::nearest_vertex(g, p) ==
              testing::scan_nearest(g, p.lat(), p.lon()));
    }
    auto const& v = g.vertices.back();
    REQUIRE(graph::nearest_vertex(g, v.pos) == v.id);
  }

  SUBCASE("ties go to the smaller id") {
    auto const a = geo::LatLon{0.001, 0.0};
    auto const b = geo::LatLon{-0.001, 0.0};
    auto const g = build_graph(street({b, a}), {}, nullptr).graph;
    CHECK(graph::nearest_vertex(g, {0.0, 0.0}) == 0);
    CHECK(graph::nearest_vertex(g, {0.0, 0.0}) ==
          testing::scan_nearest(g, 0.0, 0.0));
  }

  SUBCASE("empty graph") {
    CHECK_THROWS_AS(graph::nearest_vertex(graph::RoutingGraph{}, {0, 0}),
                    input_error);
  }
}

TEST_CASE("graph cache") {
  auto rng = std::mt19937_64{31};
  auto const g = testing::random_graph(rng, 20);
  auto const bytes = graph::serialize(g);
  CHECK(graph::deserialize(bytes) == g);
  CHECK(graph::serialize(graph::deserialize(bytes)) == bytes);

  SUBCASE("on disk") {
    auto const dir = std::filesystem::temp_directory_path() / "afrp_graph_test";
    std::filesystem::create_directories(dir);
    auto const p = (dir / "g.bin").string();
    graph::write_graph_cache(g, p);
    CHECK(graph::read_graph_cache(p) == g);
    std::filesystem::remove_all(dir);
  }

  SUBCASE("corruption is detected") {
    CHECK_THROWS_WITH_AS(graph::deserialize("not a graph"),
                         doctest::Contains("graph cache"), parse_error);
    CHECK_THROWS_AS(graph::deserialize(""), parse_error);
    for (auto const pos : {std::size_t{9}, bytes.size() / 2, bytes.size() - 1}) {
      auto flipped = bytes;
      flipped[pos] = static_cast<char>(flipped[pos] ^ 0x5a);
      CHECK_THROWS_AS(graph::deserialize(flipped), parse_error);
    }
    CHECK_THROWS_AS(graph::deserialize(bytes.substr(0, bytes.size() - 3)),
                    parse_error);
    CHECK_THROWS_AS(graph::read_graph_cache("/nonexistent/g.bin"), io_error);
  }

  SUBCASE("empty graph round trip") {
    auto const empty = build_graph(OsmDocument{}, {}, nullptr).graph;
    CHECK(graph::deserialize(graph::serialize(empty)) == empty);
  }
}

TEST_CASE("graph_stats") {
  auto const a = geo::LatLon{43.46, -3.81};
  auto const doc = street({a, north_of(a, 100), north_of(a, 200)});
  auto const elev = std::map<osm_id_t, double>{{1, 0.0}, {2, 10.0}, {3, 10.0}};
  auto const ws = std::vector{witness(100, "b", AmenityKind::bench)};
  auto const g = build_graph(doc, ws, &elev).graph;
  auto const s = graph::graph_stats(g);
  CHECK(s.vertices == 3);
  CHECK(s.edges == 4);
  CHECK(s.ways == 1);
  CHECK(s.amenities_per_kind[0] == 1);
  CHECK(s.grade_unknown_edges == 0);
  CHECK(s.abs_grade_quantiles[0] == 0.0);
  CHECK(s.abs_grade_quantiles[4] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(s.to_json().find(R"("vertices":3)") != std::string::npos);
}
