#include "afrp/router.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "fmt/core.h"

#include "afrp/error.hpp"

namespace afrp::router {

namespace {

constexpr auto kInf = std::numeric_limits<double>::infinity();
constexpr auto kNoEdge = std::numeric_limits<graph::edge_id>::max();

double density(graph::WayInfo const& w, bool comfort) {
  auto n = std::size_t{0};
  for (auto const k : kAllAmenityKinds) {
    if (is_comfort_kind(k) == comfort) {
      n += w.of(k).size();
    }
  }
  return static_cast<double>(n) / (w.length_m / kDensityLength);
}

double sum_sorted(std::vector<double> v) {
  std::sort(begin(v), end(v));
  return std::accumulate(begin(v), end(v), 0.0);
}

struct backward_search {
  std::vector<double> dist;       // cost from vertex to target
  std::vector<graph::edge_id> next;  // first edge of a cheapest path
};

// Label-setting search towards `dst` over incoming edges (the twins of
// outgoing ones). Stops once labels exceed the source's by the tie window.
backward_search search_to(graph::RoutingGraph const& g, graph::vertex_id src,
                          graph::vertex_id dst, PreferenceWeights const& w) {
  auto s = backward_search{
      .dist = std::vector<double>(g.vertices.size(), kInf),
      .next = std::vector<graph::edge_id>(g.vertices.size(), kNoEdge)};
  using label = std::pair<double, graph::vertex_id>;
  auto pq = std::priority_queue<label, std::vector<label>, std::greater<>>{};
  auto settled = std::vector<bool>(g.vertices.size(), false);

  s.dist[dst] = 0.0;
  pq.emplace(0.0, dst);
  while (!pq.empty()) {
    auto const [d, v] = pq.top();
    pq.pop();
    if (settled[v]) {
      continue;
    }
    if (settled[src] && d > s.dist[src] + kTieTolerance) {
      break;
    }
    settled[v] = true;
    for (auto const& out : g.out_edges(v)) {
      auto const in_id = out.reverse;  // out.to -> v
      auto const& in = g.edges[in_id];
      auto const u = in.from;
      auto const nd = d + edge_cost(g, in, w);
      if (nd < s.dist[u]) {
        s.dist[u] = nd;
        s.next[u] = in_id;
        pq.emplace(nd, u);
      }
    }
  }
  // Labels beyond the stop point were never settled and may be too high;
  // they exceed the window anyway, so mark them unreachable.
  for (auto v = std::size_t{0}; v < settled.size(); ++v) {
    if (!settled[v]) {
      s.dist[v] = kInf;
    }
  }
  return s;
}

}  // namespace

PreferenceWeights normalize_weights(double const slope_pct,
                                    double const duration_pct,
                                    double const amenity_pct,
                                    double const comfort_pct) {
  for (auto const v : {slope_pct, duration_pct, amenity_pct, comfort_pct}) {
    if (!std::isfinite(v)) {
      throw input_error{"weights must be finite numbers"};
    }
    if (v < 0.0) {
      throw input_error{fmt::format("weights must be >= 0, got {}", v)};
    }
  }
  auto const sum = slope_pct + duration_pct + amenity_pct + comfort_pct;
  if (std::abs(sum - 100.0) > 0.01) {
    throw input_error{fmt::format("weights sum to {}", sum)};
  }
  return {.slope = slope_pct / sum,
          .duration = duration_pct / sum,
          .amenity = amenity_pct / sum,
          .comfort = comfort_pct / sum};
}

double slope_penalty(double const grade) {
  return std::min(std::abs(grade) / kReferenceGrade, kMaxSlopePenalty);
}

double amenity_density(graph::RoutingGraph const& g, graph::Edge const& e) {
  return density(g.way_of(e), false);
}

double comfort_density(graph::RoutingGraph const& g, graph::Edge const& e) {
  return density(g.way_of(e), true);
}

double edge_cost(graph::RoutingGraph const& g, graph::Edge const& e,
                 PreferenceWeights const& w) {
  auto const t = g.duration_s(e);
  auto const& way = g.way_of(e);
  auto const factor = w.duration + w.slope * slope_penalty(e.grade) +
                      w.amenity / (1.0 + density(way, false)) +
                      w.comfort / (1.0 + density(way, true));
  return t * factor + kEpsilon * t;
}

std::optional<RoutePlan> shortest_path(graph::RoutingGraph const& g,
                                       graph::vertex_id const src,
                                       graph::vertex_id const dst,
                                       PreferenceWeights const& w) {
  if (src >= g.vertices.size() || dst >= g.vertices.size()) {
    throw input_error{
        fmt::format("vertex out of range ({} / {}, graph has {})", src, dst,
                    g.vertices.size())};
  }

  auto plan = RoutePlan{};
  plan.vertices.push_back(src);
  plan.geometry.push_back(g.vertices[src].pos);
  if (src == dst) {
    return plan;
  }

  auto const to_dst = search_to(g, src, dst, w);
  if (to_dst.dist[src] == kInf) {
    return std::nullopt;
  }
  auto const bound = to_dst.dist[src] + kTieTolerance;

  // Greedy walk: always take the smallest next vertex that still admits a
  // completion within the tie window. Yields the lexicographically smallest
  // near-optimal vertex sequence.
  auto visited = std::vector<bool>(g.vertices.size(), false);
  visited[src] = true;
  auto cost = 0.0;
  auto u = src;
  auto ok = true;
  while (u != dst) {
    auto best = kNoEdge;
    auto best_cost = kInf;
    for (auto i = g.first_edge(u); i < g.first_out[u + 1]; ++i) {
      auto const& e = g.edges[i];
      if (visited[e.to] || to_dst.dist[e.to] == kInf) {
        continue;
      }
      auto const c = edge_cost(g, e, w);
      if (cost + c + to_dst.dist[e.to] > bound) {
        continue;
      }
      if (best == kNoEdge || e.to < g.edges[best].to ||
          (e.to == g.edges[best].to && c < best_cost)) {
        best = i;
        best_cost = c;
      }
    }
    if (best == kNoEdge) {
      ok = false;
      break;
    }
    cost += best_cost;
    u = g.edges[best].to;
    visited[u] = true;
    plan.edges.push_back(best);
  }

  if (!ok) {
    // Numerically degenerate windows (near-zero edge costs) can strand the
    // greedy walk; the search tree path is always valid.
    plan.edges.clear();
    for (auto v = src; v != dst; v = g.edges[to_dst.next[v]].to) {
      plan.edges.push_back(to_dst.next[v]);
    }
  }

  plan.total_cost = 0.0;
  for (auto const id : plan.edges) {
    auto const& e = g.edges[id];
    plan.total_cost += edge_cost(g, e, w);
    plan.vertices.push_back(e.to);
    plan.geometry.push_back(g.vertices[e.to].pos);
  }
  plan.metrics = route_metrics(g, plan.edges);
  return plan;
}

RouteMetrics route_metrics(graph::RoutingGraph const& g,
                           std::span<graph::edge_id const> edges) {
  auto m = RouteMetrics{};
  auto rises = std::vector<double>{};
  auto falls = std::vector<double>{};
  auto amenities = std::set<graph::amenity_idx>{};
  auto comfort = std::set<graph::amenity_idx>{};
  for (auto const id : edges) {
    auto const& e = g.edges[id];
    auto const t = g.duration_s(e);
    auto const& way = g.way_of(e);
    m.duration_s += t;
    m.slope_score += t * slope_penalty(e.grade);
    m.amenity_penalty_s += t / (1.0 + density(way, false));
    m.comfort_penalty_s += t / (1.0 + density(way, true));
    if (!e.grade_unknown) {
      auto const dh = *g.vertices[e.to].elevation - *g.vertices[e.from].elevation;
      (dh > 0.0 ? rises : falls).push_back(std::abs(dh));
    }
    for (auto const k : kAllAmenityKinds) {
      auto& into = is_comfort_kind(k) ? comfort : amenities;
      into.insert(begin(way.of(k)), end(way.of(k)));
    }
  }
  // Canonical summation order so a reversed route swaps ascent and descent
  // bit for bit.
  m.ascent_m = sum_sorted(std::move(rises));
  m.descent_m = sum_sorted(std::move(falls));
  m.amenities = amenities.size();
  m.comfortable_elements = comfort.size();
  return m;
}

double cost_from_metrics(RouteMetrics const& m, PreferenceWeights const& w) {
  return (w.duration + kEpsilon) * m.duration_s + w.slope * m.slope_score +
         w.amenity * m.amenity_penalty_s + w.comfort * m.comfort_penalty_s;
}

}  // namespace afrp::router
