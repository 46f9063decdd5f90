#include "afrp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "fmt/core.h"
#include "nlohmann/json.hpp"

#include "afrp/error.hpp"

namespace afrp::graph {

namespace {

struct segment {
  osm_id_t from, to;
  way_idx way;
  double length_m;
};

std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t h = 14695981039346656037ULL) {
  for (auto const c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::uint64_t BuildConfig::hash() const {
  auto s = fmt::format("speed={:a};clamp={:a};steps={:a};walkable=",
                       walking_speed_mps, max_grade_clamp, steps_grade);
  for (auto const& h : walkable_highways) {
    s += h;
    s += ',';
  }
  return fnv1a(s);
}

BuildResult build_graph(OsmDocument const& doc,
                        std::span<apt::Correlation const> witnesses,
                        std::map<osm_id_t, double> const* elevations,
                        BuildConfig const& config) {
  if (!(config.walking_speed_mps > 0.0)) {
    throw input_error{fmt::format("walking speed must be > 0, got {}",
                                  config.walking_speed_mps)};
  }
  if (!(config.max_grade_clamp > 0.0)) {
    throw input_error{fmt::format("max grade clamp must be > 0, got {}",
                                  config.max_grade_clamp)};
  }

  auto result = BuildResult{};
  auto& g = result.graph;
  g.config = config;
  g.config_hash = config.hash();

  // Walkable ways and their segments.
  auto segments = std::vector<segment>{};
  auto way_index = std::map<osm_id_t, way_idx>{};
  for (auto const& [id, way] : doc.ways) {
    auto const hw = way.tags.find("highway");
    if (hw == end(way.tags) || !config.walkable_highways.contains(hw->second)) {
      continue;
    }
    auto const unresolved =
        std::any_of(begin(way.node_refs), end(way.node_refs),
                    [&](osm_id_t ref) { return !doc.nodes.contains(ref); });
    if (unresolved) {
      ++result.report.skipped_ways;
      continue;
    }

    auto const idx = static_cast<way_idx>(g.ways.size());
    auto info = WayInfo{.way_id = id, .highway = hw->second, .length_m = 0.0,
                        .amenities = {}};
    auto const first_segment = segments.size();
    for (auto i = std::size_t{1}; i < way.node_refs.size(); ++i) {
      auto const a = way.node_refs[i - 1];
      auto const b = way.node_refs[i];
      auto const len = a == b ? 0.0
                              : geo::haversine_distance(doc.nodes.at(a).pos,
                                                        doc.nodes.at(b).pos);
      if (!(len > 0.0)) {
        ++result.report.dropped_segments;
        continue;
      }
      segments.push_back({a, b, idx, len});
      info.length_m += len;
    }
    if (segments.size() == first_segment) {
      continue;
    }
    way_index.emplace(id, idx);
    g.ways.push_back(std::move(info));
  }

  // Amenity attachment.
  auto kind_of = std::map<std::string, AmenityKind>{};
  for (auto const& w : witnesses) {
    if (!doc.ways.contains(w.way_id)) {
      throw input_error{fmt::format(
          "correlation references way {} which is not in the map", w.way_id)};
    }
    auto const [it, inserted] = kind_of.emplace(w.amenity_id, w.kind);
    if (!inserted && it->second != w.kind) {
      throw input_error{fmt::format("amenity '{}' has conflicting kinds {} and {}",
                                    w.amenity_id, to_string(it->second),
                                    to_string(w.kind))};
    }
  }
  auto attached = std::set<std::string>{};
  for (auto const& w : witnesses) {
    if (way_index.contains(w.way_id)) {
      attached.insert(w.amenity_id);
    }
  }
  g.amenity_ids.assign(begin(attached), end(attached));
  for (auto const& w : witnesses) {
    auto const it = way_index.find(w.way_id);
    if (it == end(way_index)) {
      continue;
    }
    auto const pos = std::lower_bound(begin(g.amenity_ids), end(g.amenity_ids),
                                      w.amenity_id);
    g.ways[it->second].amenities[static_cast<std::size_t>(w.kind)].push_back(
        static_cast<amenity_idx>(pos - begin(g.amenity_ids)));
  }
  for (auto& info : g.ways) {
    for (auto& ids : info.amenities) {
      std::sort(begin(ids), end(ids));
      ids.erase(std::unique(begin(ids), end(ids)), end(ids));
    }
  }

  // Vertices: OSM nodes touched by at least one kept segment.
  auto used = std::set<osm_id_t>{};
  for (auto const& s : segments) {
    used.insert(s.from);
    used.insert(s.to);
  }
  auto vertex_of = std::unordered_map<osm_id_t, vertex_id>{};
  for (auto const osm_id : used) {
    auto const id = static_cast<vertex_id>(g.vertices.size());
    auto v = Vertex{.id = id, .osm_node_id = osm_id,
                    .pos = doc.nodes.at(osm_id).pos, .elevation = {}};
    if (elevations != nullptr) {
      if (auto const e = elevations->find(osm_id); e != end(*elevations)) {
        v.elevation = e->second;
      }
    }
    if (!v.elevation) {
      ++result.report.unknown_elevations;
    }
    vertex_of.emplace(osm_id, id);
    g.vertices.push_back(v);
  }

  // Edges in pairs; `pair` keeps twins together through the sort.
  struct pending {
    Edge edge;
    std::size_t pair;
  };
  auto pend = std::vector<pending>{};
  pend.reserve(segments.size() * 2);
  for (auto i = std::size_t{0}; i < segments.size(); ++i) {
    auto const& s = segments[i];
    auto const u = vertex_of.at(s.from);
    auto const v = vertex_of.at(s.to);
    auto const& hu = g.vertices[u].elevation;
    auto const& hv = g.vertices[v].elevation;
    auto const known = hu.has_value() && hv.has_value();
    auto const rise = known ? *hv - *hu : 0.0;

    auto grade = known ? std::clamp(rise / s.length_m, -config.max_grade_clamp,
                                    config.max_grade_clamp)
                       : 0.0;
    if (g.ways[s.way].highway == "steps") {
      grade = rise < 0.0 ? -config.steps_grade : config.steps_grade;
    }

    pend.push_back({Edge{.from = u, .to = v, .way = s.way,
                         .length_m = s.length_m, .grade = grade,
                         .grade_unknown = !known, .reverse = 0},
                    i});
    pend.push_back({Edge{.from = v, .to = u, .way = s.way,
                         .length_m = s.length_m, .grade = -grade,
                         .grade_unknown = !known, .reverse = 0},
                    i});
  }
  std::sort(begin(pend), end(pend), [](pending const& a, pending const& b) {
    return std::tie(a.edge.from, a.edge.to, a.edge.way, a.pair) <
           std::tie(b.edge.from, b.edge.to, b.edge.way, b.pair);
  });

  auto twins = std::vector<std::array<edge_id, 2>>(
      segments.size(), {std::numeric_limits<edge_id>::max(),
                        std::numeric_limits<edge_id>::max()});
  g.edges.reserve(pend.size());
  for (auto i = std::size_t{0}; i < pend.size(); ++i) {
    auto& t = twins[pend[i].pair];
    (t[0] == std::numeric_limits<edge_id>::max() ? t[0] : t[1]) =
        static_cast<edge_id>(i);
    g.edges.push_back(pend[i].edge);
  }
  for (auto const& [a, b] : twins) {
    g.edges[a].reverse = b;
    g.edges[b].reverse = a;
  }

  g.first_out.assign(g.vertices.size() + 1, 0);
  for (auto const& e : g.edges) {
    ++g.first_out[e.from + 1];
  }
  for (auto v = std::size_t{0}; v < g.vertices.size(); ++v) {
    g.first_out[v + 1] += g.first_out[v];
  }
  return result;
}

vertex_id nearest_vertex(RoutingGraph const& g, geo::LatLon const& p) {
  if (g.vertices.empty()) {
    throw input_error{"nearest vertex: graph is empty"};
  }
  auto best = vertex_id{0};
  auto best_d = std::numeric_limits<double>::infinity();
  for (auto const& v : g.vertices) {
    auto const d = geo::haversine_distance(p, v.pos);
    if (d < best_d) {
      best_d = d;
      best = v.id;
    }
  }
  return best;
}

std::string GraphStats::to_json() const {
  auto j = nlohmann::ordered_json{};
  j["vertices"] = vertices;
  j["edges"] = edges;
  j["ways"] = ways;
  auto per_kind = nlohmann::ordered_json::object();
  for (auto const k : kAllAmenityKinds) {
    per_kind[std::string{to_string(k)}] =
        amenities_per_kind[static_cast<std::size_t>(k)];
  }
  j["amenities"] = std::move(per_kind);
  j["grade_unknown_edges"] = grade_unknown_edges;
  auto q = nlohmann::ordered_json::object();
  auto const names = std::array{"min", "p25", "p50", "p75", "max"};
  for (auto i = std::size_t{0}; i < names.size(); ++i) {
    q[names[i]] = std::round(abs_grade_quantiles[i] * 1e4) / 1e4;
  }
  j["abs_grade"] = std::move(q);
  return j.dump();
}

GraphStats graph_stats(RoutingGraph const& g) {
  auto s = GraphStats{};
  s.vertices = g.vertices.size();
  s.edges = g.edges.size();
  s.ways = g.ways.size();
  for (auto const k : kAllAmenityKinds) {
    auto ids = std::set<amenity_idx>{};
    for (auto const& w : g.ways) {
      ids.insert(begin(w.of(k)), end(w.of(k)));
    }
    s.amenities_per_kind[static_cast<std::size_t>(k)] = ids.size();
  }
  auto grades = std::vector<double>{};
  grades.reserve(g.edges.size());
  for (auto const& e : g.edges) {
    grades.push_back(std::abs(e.grade));
    s.grade_unknown_edges += e.grade_unknown ? 1U : 0U;
  }
  std::sort(begin(grades), end(grades));
  if (!grades.empty()) {
    auto const qs = std::array{0.0, 0.25, 0.5, 0.75, 1.0};
    for (auto i = std::size_t{0}; i < qs.size(); ++i) {
      auto const rank = static_cast<std::size_t>(
          std::lround(qs[i] * static_cast<double>(grades.size() - 1)));
      s.abs_grade_quantiles[i] = grades[rank];
    }
  }
  return s;
}

}  // namespace afrp::graph
