#include "afrp/pipeline.hpp"

#include "nlohmann/json.hpp"

#include "afrp/elevation.hpp"
#include "afrp/error.hpp"

namespace afrp::pipeline {

soet::EnrichmentReport run_enrich(EnrichArgs const& args) {
  auto doc = parse_osm(read_file(args.osm));
  auto const amenities = parse_amenity_csv(read_file(args.csv));
  auto result = soet::enrich(std::move(doc), amenities);
  write_file(args.out, write_osm(result.doc));
  return result.report;
}

apt::CorrelationStats run_project(ProjectArgs const& args) {
  if (!(args.max_distance >= 0.0)) {
    throw input_error{"max distance must be >= 0"};
  }
  auto const doc = parse_osm(read_file(args.osm));
  auto const amenities = args.csv ? parse_amenity_csv(read_file(*args.csv))
                                  : soet::extract_amenities(doc);
  auto const result = apt::correlate(doc, amenities, args.max_distance);
  apt::write_correlation_csv(
      result.correlations, args.out,
      args.witnesses ? apt::CsvMode::witnesses : apt::CsvMode::counts);
  return result.stats;
}

std::string BuildSummary::to_json() const {
  auto j = nlohmann::ordered_json::parse(stats.to_json());
  j["skipped_ways"] = report.skipped_ways;
  j["dropped_segments"] = report.dropped_segments;
  j["dem"] = has_dem;
  j["elevation_misses"] = elevation_misses;
  j["vertices_without_elevation"] = report.unknown_elevations;
  return j.dump();
}

BuildSummary run_build(BuildArgs const& args) {
  auto const doc = parse_osm(read_file(args.osm));
  auto const witnesses =
      args.correlations
          ? apt::parse_correlation_csv(read_file(*args.correlations))
          : std::vector<apt::Correlation>{};

  auto summary = BuildSummary{};
  auto elevations = std::optional<elevation::NodeElevations>{};
  if (args.dem) {
    auto const raster = elevation::load_ascii_grid(read_file(*args.dem));
    elevations = elevation::assign_elevations(doc, raster);
    summary.has_dem = true;
    summary.elevation_misses = elevations->miss_count;
  }

  auto const built = graph::build_graph(
      doc, witnesses, elevations ? &elevations->meters : nullptr, args.config);
  graph::write_graph_cache(built.graph, args.out);
  summary.stats = graph::graph_stats(built.graph);
  summary.report = built.report;
  return summary;
}

service::Reply run_plan(PlanArgs const& args) {
  auto const g = graph::read_graph_cache(args.graph);
  auto const req = service::PlanRequest{.from = args.from,
                                        .to = args.to,
                                        .slope_pct = args.weights_pct[0],
                                        .duration_pct = args.weights_pct[1],
                                        .amenity_pct = args.weights_pct[2],
                                        .comfort_pct = args.weights_pct[3]};
  return service::plan(&g, req);
}

}  // namespace afrp::pipeline
