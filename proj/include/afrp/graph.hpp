#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "afrp/apt.hpp"
#include "afrp/geo.hpp"
#include "afrp/osm_io.hpp"

namespace afrp::graph {

using vertex_id = std::uint32_t;
using edge_id = std::uint32_t;
using way_idx = std::uint32_t;
using amenity_idx = std::uint32_t;

struct BuildConfig {
  std::set<std::string> walkable_highways{
      "footway",     "path",      "pedestrian", "living_street",
      "residential", "service",   "steps",      "track",
      "unclassified", "tertiary", "secondary",  "primary"};
  double walking_speed_mps{1.33};
  double max_grade_clamp{1.0};
  // Grade magnitude forced onto highway=steps edges.
  double steps_grade{0.35};

  // FNV-1a over a canonical rendering; stored with the graph.
  std::uint64_t hash() const;

  friend bool operator==(BuildConfig const&, BuildConfig const&) = default;
};

struct Vertex {
  vertex_id id{0};
  osm_id_t osm_node_id{0};
  geo::LatLon pos;
  std::optional<double> elevation;

  friend bool operator==(Vertex const&, Vertex const&) = default;
};

// Per-way data shared by every edge of the way.
struct WayInfo {
  osm_id_t way_id{0};
  std::string highway;
  double length_m{0.0};
  // Indices into RoutingGraph::amenity_ids, ascending, per AmenityKind.
  std::array<std::vector<amenity_idx>, kAmenityKindCount> amenities;

  std::span<amenity_idx const> of(AmenityKind k) const {
    return amenities[static_cast<std::size_t>(k)];
  }

  friend bool operator==(WayInfo const&, WayInfo const&) = default;
};

struct Edge {
  vertex_id from{0};
  vertex_id to{0};
  way_idx way{0};
  double length_m{0.0};
  double grade{0.0};  // rise over run in travel direction
  bool grade_unknown{false};
  edge_id reverse{0};  // twin edge to -> from

  friend bool operator==(Edge const&, Edge const&) = default;
};

// Immutable bidirectional walking graph in forward-star layout: the
// outgoing edges of v are edges[first_out[v] .. first_out[v + 1]).
struct RoutingGraph {
  BuildConfig config;
  std::uint64_t config_hash{0};
  std::vector<std::string> amenity_ids;  // sorted, unique
  std::vector<WayInfo> ways;             // ascending way_id
  std::vector<Vertex> vertices;          // ascending osm_node_id
  std::vector<Edge> edges;
  std::vector<edge_id> first_out;

  std::span<Edge const> out_edges(vertex_id v) const {
    return std::span{edges}.subspan(first_out[v],
                                    first_out[v + 1] - first_out[v]);
  }
  edge_id first_edge(vertex_id v) const { return first_out[v]; }
  WayInfo const& way_of(Edge const& e) const { return ways[e.way]; }
  double duration_s(Edge const& e) const {
    return e.length_m / config.walking_speed_mps;
  }
  bool empty() const { return vertices.empty(); }

  friend bool operator==(RoutingGraph const&, RoutingGraph const&) = default;
};

struct BuildReport {
  std::size_t skipped_ways{0};      // walkable ways with unresolved refs
  std::size_t dropped_segments{0};  // zero-length consecutive pairs
  std::size_t unknown_elevations{0};  // vertices without elevation
};

struct BuildResult {
  RoutingGraph graph;
  BuildReport report;
};

// One edge pair per consecutive node pair of every walkable way. Witnesses
// attach their amenity ids to all edges of their way; witnesses on
// non-walkable ways are ignored, witnesses on unknown ways are an error.
// Without elevations every grade is 0 and flagged unknown.
BuildResult build_graph(OsmDocument const& doc,
                        std::span<apt::Correlation const> witnesses,
                        std::map<osm_id_t, double> const* elevations,
                        BuildConfig const& config = {});

// Haversine-closest vertex, ties to the smaller id. Throws on empty graph.
vertex_id nearest_vertex(RoutingGraph const&, geo::LatLon const& p);

struct GraphStats {
  std::size_t vertices{0};
  std::size_t edges{0};
  std::size_t ways{0};
  std::array<std::size_t, kAmenityKindCount> amenities_per_kind{};
  std::size_t grade_unknown_edges{0};
  // |grade| over directed edges: min, p25, median, p75, max.
  std::array<double, 5> abs_grade_quantiles{};

  std::string to_json() const;
  friend bool operator==(GraphStats const&, GraphStats const&) = default;
};

GraphStats graph_stats(RoutingGraph const&);

// Versioned binary container with trailing checksum. Reading rejects bad
// magic, unsupported versions, checksum mismatches and inconsistent
// indices with afrp::parse_error.
std::string serialize(RoutingGraph const&);
RoutingGraph deserialize(std::string_view bytes);

void write_graph_cache(RoutingGraph const&, std::string const& path);
RoutingGraph read_graph_cache(std::string const& path);

}  // namespace afrp::graph
