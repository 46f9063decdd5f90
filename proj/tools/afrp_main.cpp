#include <charconv>
#include <cstdio>
#include <iostream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fmt/core.h"

#include "afrp/error.hpp"
#include "afrp/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

std::vector<double> parse_number_list(std::string const& s,
                                      std::string_view what,
                                      std::size_t expected) {
  auto out = std::vector<double>{};
  auto rest = std::string_view{s};
  while (true) {
    auto const comma = rest.find(',');
    auto tok = rest.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') {
      tok.remove_prefix(1);
    }
    while (!tok.empty() && tok.back() == ' ') {
      tok.remove_suffix(1);
    }
    if (!tok.empty() && tok.front() == '+') {
      tok.remove_prefix(1);
    }
    double v{};
    auto const [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw afrp::input_error{fmt::format("{}: '{}' is not a number", what, tok)};
    }
    out.push_back(v);
    if (comma == std::string_view::npos) {
      break;
    }
    rest.remove_prefix(comma + 1);
  }
  if (out.size() != expected) {
    throw afrp::input_error{fmt::format("{}: expected {} comma-separated values, got {}",
                                        what, expected, out.size())};
  }
  return out;
}

afrp::geo::LatLon parse_latlon(std::string const& s, std::string_view what) {
  auto const v = parse_number_list(s, what, 2);
  return afrp::geo::LatLon{v[0], v[1]};
}

int serve(std::string const& graph_path, std::optional<int> port_flag) {
  auto const port = afrp::service::resolve_port(port_flag);
  auto server = afrp::service::Server{};

  auto load_failed = std::atomic<bool>{false};
  auto loader = std::thread{[&] {
    try {
      server.set_graph(std::make_shared<afrp::graph::RoutingGraph const>(
          afrp::graph::read_graph_cache(graph_path)));
      auto const g = server.graph();
      std::cerr << fmt::format("graph loaded: {} vertices, {} edges\n",
                               g->vertices.size(), g->edges.size());
    } catch (std::exception const& e) {
      std::cerr << "error: " << e.what() << '\n';
      load_failed = true;
      server.wait_until_ready();
      server.stop();
    }
  }};

  std::cerr << fmt::format("listening on 0.0.0.0:{}\n", port);
  auto const ok = server.listen("0.0.0.0", port);
  loader.join();
  if (load_failed) {
    return kExitInput;
  }
  if (!ok) {
    std::cerr << fmt::format("error: cannot listen on port {}\n", port);
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  auto app = CLI::App{"Age-friendly pedestrian route planner"};
  app.require_subcommand(1);

  auto enrich = afrp::pipeline::EnrichArgs{};
  auto* enrich_cmd = app.add_subcommand(
      "enrich", "Merge an amenity CSV into an OSM file as tagged nodes");
  enrich_cmd->add_option("--osm", enrich.osm, "Input OSM XML")->required();
  enrich_cmd->add_option("--csv", enrich.csv, "Amenity CSV")->required();
  enrich_cmd->add_option("--out", enrich.out, "Enriched OSM XML")->required();

  auto project = afrp::pipeline::ProjectArgs{};
  auto project_csv = std::string{};
  auto* project_cmd = app.add_subcommand(
      "project", "Correlate ways with nearby amenities");
  project_cmd->add_option("--osm", project.osm, "Enriched OSM XML")->required();
  project_cmd->add_option("--csv", project_csv,
                          "Read amenities from this CSV instead of the OSM file");
  project_cmd->add_option("--max-distance", project.max_distance,
                          "Maximum amenity-to-way distance in meters")
      ->capture_default_str();
  project_cmd->add_option("--out", project.out, "Correlation CSV")->required();
  project_cmd->add_flag("--witnesses", project.witnesses,
                        "Write one row per way/amenity pair instead of counts");

  auto build = afrp::pipeline::BuildArgs{};
  auto build_corr = std::string{};
  auto build_dem = std::string{};
  auto walkable = std::vector<std::string>{};
  auto* build_cmd = app.add_subcommand("build", "Build the routing graph cache");
  build_cmd->add_option("--osm", build.osm, "Enriched OSM XML")->required();
  build_cmd->add_option("--correlations", build_corr,
                        "Correlation CSV (witnesses or counts)");
  build_cmd->add_option("--dem", build_dem, "ESRI ASCII elevation grid");
  build_cmd->add_option("--out", build.out, "Graph cache")->required();
  build_cmd->add_option("--walking-speed", build.config.walking_speed_mps,
                        "Walking speed in m/s")
      ->capture_default_str();
  build_cmd->add_option("--max-grade", build.config.max_grade_clamp,
                        "Grade clamp")
      ->capture_default_str();
  build_cmd->add_option("--steps-grade", build.config.steps_grade,
                        "Grade magnitude forced onto steps")
      ->capture_default_str();
  build_cmd->add_option("--walkable", walkable,
                        "Comma-separated walkable highway values")
      ->delimiter(',');

  auto plan_graph = std::string{};
  auto plan_from = std::string{};
  auto plan_to = std::string{};
  auto plan_weights = std::string{};
  auto* plan_cmd = app.add_subcommand("plan", "Plan one route");
  plan_cmd->add_option("--graph", plan_graph, "Graph cache")->required();
  plan_cmd->add_option("--from", plan_from, "lat,lon")->required();
  plan_cmd->add_option("--to", plan_to, "lat,lon")->required();
  plan_cmd->add_option("--weights", plan_weights,
                       "slope,duration,amenity,comfort percentages")
      ->required();

  auto serve_graph = std::string{};
  auto serve_port = std::optional<int>{};
  auto* serve_cmd = app.add_subcommand("serve", "Serve /plan and /health");
  serve_cmd->add_option("--graph", serve_graph, "Graph cache")->required();
  serve_cmd->add_option("--port", serve_port, "Port (default AFRP_PORT or 8080)")
      ->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*enrich_cmd) {
      std::cout << afrp::pipeline::run_enrich(enrich).to_json() << '\n';
    } else if (*project_cmd) {
      if (!project_csv.empty()) {
        project.csv = project_csv;
      }
      std::cout << afrp::pipeline::run_project(project).to_json() << '\n';
    } else if (*build_cmd) {
      if (!build_corr.empty()) {
        build.correlations = build_corr;
      }
      if (!build_dem.empty()) {
        build.dem = build_dem;
      }
      if (!walkable.empty()) {
        build.config.walkable_highways = {begin(walkable), end(walkable)};
      }
      std::cout << afrp::pipeline::run_build(build).to_json() << '\n';
    } else if (*plan_cmd) {
      auto const w = parse_number_list(plan_weights, "--weights", 4);
      auto const reply = afrp::pipeline::run_plan(
          {.graph = plan_graph,
           .from = parse_latlon(plan_from, "--from"),
           .to = parse_latlon(plan_to, "--to"),
           .weights_pct = {w[0], w[1], w[2], w[3]}});
      if (reply.status == 200 || reply.status == 422) {
        std::cout << reply.body << '\n';
      }
      if (reply.status != 200) {
        std::cerr << fmt::format("error: plan failed ({}): {}\n", reply.status,
                                 reply.body);
        return kExitInput;
      }
    } else if (*serve_cmd) {
      return serve(serve_graph, serve_port);
    }
  } catch (afrp::input_error const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (std::exception const& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
