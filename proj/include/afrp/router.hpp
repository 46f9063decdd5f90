#pragma once

#include <optional>
#include <vector>

#include "afrp/geo.hpp"
#include "afrp/graph.hpp"

namespace afrp::router {

// Reference grade for the slope penalty and its cap: s(g) = min(|g| / 0.10, 3).
constexpr double kReferenceGrade = 0.10;
constexpr double kMaxSlopePenalty = 3.0;
// Keeps every edge strictly positive, e.g. pure slope weights on flat ground.
constexpr double kEpsilon = 1e-6;
// Amenity densities are measured per this many meters of way.
constexpr double kDensityLength = 100.0;
// Cost window inside which paths count as tied.
constexpr double kTieTolerance = 1e-9;

// Four preference fractions summing to 1.
struct PreferenceWeights {
  double slope{0.0};
  double duration{1.0};
  double amenity{0.0};
  double comfort{0.0};

  friend bool operator==(PreferenceWeights const&,
                         PreferenceWeights const&) = default;
};

// Percentages must each be >= 0 and sum to 100 within 0.01; otherwise
// throws input_error ("weights sum to 120"). No renormalization beyond
// dividing by the (validated) sum.
PreferenceWeights normalize_weights(double slope_pct, double duration_pct,
                                    double amenity_pct, double comfort_pct);

double slope_penalty(double grade);

// Distinct bench/toilets/drinking_water (amenity) or handrail (comfort) ids
// of the edge's way per 100 m of way length.
double amenity_density(graph::RoutingGraph const&, graph::Edge const&);
double comfort_density(graph::RoutingGraph const&, graph::Edge const&);

// Generalized seconds:
//   t * (w_dur + w_slope * s(grade) + w_amen / (1 + rho_a)
//        + w_comf / (1 + rho_c)) + eps * t
// with t the walking time of the edge. Always > 0 and finite.
double edge_cost(graph::RoutingGraph const&, graph::Edge const&,
                 PreferenceWeights const&);

// Aggregates of a route. The *_penalty_s fields are the
// per-factor generalized-time terms, so
//   total_cost = (w_dur + eps) * duration_s + w_slope * slope_score
//              + w_amen * amenity_penalty_s + w_comf * comfort_penalty_s.
struct RouteMetrics {
  double duration_s{0.0};
  double ascent_m{0.0};
  double descent_m{0.0};
  double slope_score{0.0};        // sum of t_e * s(grade_e)
  double amenity_penalty_s{0.0};  // sum of t_e / (1 + rho_a)
  double comfort_penalty_s{0.0};  // sum of t_e / (1 + rho_c)
  std::size_t amenities{0};             // distinct bench/toilets/water ids
  std::size_t comfortable_elements{0};  // distinct handrail ids

  friend bool operator==(RouteMetrics const&, RouteMetrics const&) = default;
};

struct RoutePlan {
  std::vector<graph::vertex_id> vertices;
  std::vector<graph::edge_id> edges;
  std::vector<geo::LatLon> geometry;
  RouteMetrics metrics;
  double total_cost{0.0};

  friend bool operator==(RoutePlan const&, RoutePlan const&) = default;
};

// Minimum-cost path by label-setting search. Among paths within
// kTieTolerance of the optimum the lexicographically smallest vertex
// sequence wins. nullopt when dst is unreachable. src == dst yields a
// single-vertex plan with zero metrics.
std::optional<RoutePlan> shortest_path(graph::RoutingGraph const&,
                                       graph::vertex_id src,
                                       graph::vertex_id dst,
                                       PreferenceWeights const&);

RouteMetrics route_metrics(graph::RoutingGraph const&,
                           std::span<graph::edge_id const> edges);

// Recombines metric components with the weights; equals the plan's
// total_cost up to rounding.
double cost_from_metrics(RouteMetrics const&, PreferenceWeights const&);

}  // namespace afrp::router
