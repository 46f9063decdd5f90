#pragma once

#include <array>
#include <optional>
#include <string>

#include "afrp/apt.hpp"
#include "afrp/graph.hpp"
#include "afrp/service.hpp"
#include "afrp/soet.hpp"

// File-to-file stages behind the CLI subcommands.
namespace afrp::pipeline {

struct EnrichArgs {
  std::string osm;
  std::string csv;
  std::string out;
};

soet::EnrichmentReport run_enrich(EnrichArgs const&);

struct ProjectArgs {
  std::string osm;
  // Amenities come from ref:afrp/amenity nodes of `osm` unless a CSV is
  // given.
  std::optional<std::string> csv;
  double max_distance{apt::kDefaultMaxDistance};
  std::string out;
  bool witnesses{false};
};

apt::CorrelationStats run_project(ProjectArgs const&);

struct BuildArgs {
  std::string osm;
  std::optional<std::string> correlations;
  std::optional<std::string> dem;
  std::string out;
  graph::BuildConfig config;
};

struct BuildSummary {
  graph::GraphStats stats;
  graph::BuildReport report;
  std::size_t elevation_misses{0};
  bool has_dem{false};

  std::string to_json() const;
};

BuildSummary run_build(BuildArgs const&);

struct PlanArgs {
  std::string graph;
  geo::LatLon from;
  geo::LatLon to;
  std::array<double, 4> weights_pct{};  // slope, duration, amenity, comfort
};

service::Reply run_plan(PlanArgs const&);

}  // namespace afrp::pipeline
