#include "afrp/service.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "fmt/core.h"
#include "httplib.h"
#include "nlohmann/json.hpp"

#include "afrp/error.hpp"

namespace afrp::service {

namespace {

double number_param(ParamLookup const& get, std::string_view name) {
  auto const raw = get(name);
  if (!raw) {
    throw input_error{fmt::format("missing parameter '{}'", name)};
  }
  auto s = std::string_view{*raw};
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  double v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw input_error{fmt::format("parameter '{}' is not a number: '{}'", name,
                                  *raw)};
  }
  return v;
}

geo::LatLon coordinate_param(ParamLookup const& get, std::string_view lat,
                             std::string_view lon) {
  auto const la = number_param(get, lat);
  auto const lo = number_param(get, lon);
  try {
    return geo::LatLon{la, lo};
  } catch (input_error const& e) {
    throw input_error{fmt::format("{}/{}: {}", lat, lon, e.what())};
  }
}

std::string quoted(std::string_view s) { return nlohmann::json(s).dump(); }

// Meters and seconds are rendered with exactly two decimals, coordinates
// with seven; fixed formatting keeps identical queries byte-identical.
std::string fixed2(double v) {
  auto s = fmt::format("{:.2f}", v);
  return s == "-0.00" ? "0.00" : s;
}

std::string fixed7(double v) { return fmt::format("{:.7f}", v); }

std::string latlon_json(geo::LatLon const& p) {
  return fmt::format(R"({{"lat":{},"lon":{}}})", fixed7(p.lat()),
                     fixed7(p.lon()));
}

}  // namespace

PlanRequest parse_plan_request(ParamLookup const& get) {
  return PlanRequest{.from = coordinate_param(get, "fromLat", "fromLon"),
                     .to = coordinate_param(get, "toLat", "toLon"),
                     .slope_pct = number_param(get, "slope"),
                     .duration_pct = number_param(get, "duration"),
                     .amenity_pct = number_param(get, "amenity"),
                     .comfort_pct = number_param(get, "comfort")};
}

std::string render_error(std::string_view message) {
  return fmt::format(R"({{"error":{}}})", quoted(message));
}

std::string render_plan(PlanRequest const& req, graph::RoutingGraph const& g,
                        graph::vertex_id const from, graph::vertex_id const to,
                        std::optional<router::RoutePlan> const& plan) {
  auto out = std::string{};
  out += fmt::format(R"({{"no_route":{},)", plan ? "false" : "true");
  out += fmt::format(R"("from":{},"to":{},)", latlon_json(req.from),
                     latlon_json(req.to));
  out += fmt::format(
      R"("weights":{{"slope":{},"duration":{},"amenity":{},"comfort":{}}},)",
      fixed2(req.slope_pct), fixed2(req.duration_pct), fixed2(req.amenity_pct),
      fixed2(req.comfort_pct));
  out += fmt::format(
      R"("snapped":{{"from_vertex":{},"from_osm_node":{},"to_vertex":{},"to_osm_node":{}}},)",
      from, g.vertices[from].osm_node_id, to, g.vertices[to].osm_node_id);

  out += R"("geometry":{"type":"LineString","coordinates":[)";
  if (plan) {
    auto first = true;
    for (auto const& p : plan->geometry) {
      out += fmt::format("{}[{},{}]", first ? "" : ",", fixed7(p.lon()),
                         fixed7(p.lat()));
      first = false;
    }
  }
  out += "]},";

  if (plan) {
    auto const& m = plan->metrics;
    out += fmt::format(
        R"("metrics":{{"duration_s":{},"ascent_m":{},"descent_m":{},"slope_score":{},)"
        R"("amenity_penalty_s":{},"comfort_penalty_s":{},"amenities":{},"comfortable_elements":{}}},)",
        fixed2(m.duration_s), fixed2(m.ascent_m), fixed2(m.descent_m),
        fixed2(m.slope_score), fixed2(m.amenity_penalty_s),
        fixed2(m.comfort_penalty_s), m.amenities, m.comfortable_elements);
    out += fmt::format(R"("edges":{},"total_cost":{}}})", plan->edges.size(),
                       fixed2(plan->total_cost));
  } else {
    out += R"("metrics":null,"edges":0,"total_cost":null})";
  }
  return out;
}

Reply plan(graph::RoutingGraph const* g, PlanRequest const& req) {
  if (g == nullptr) {
    return {503, render_error("graph not loaded")};
  }
  try {
    auto const weights = router::normalize_weights(
        req.slope_pct, req.duration_pct, req.amenity_pct, req.comfort_pct);
    if (g->empty()) {
      return {422, render_error("graph has no vertices")};
    }
    auto const from = graph::nearest_vertex(*g, req.from);
    auto const to = graph::nearest_vertex(*g, req.to);
    auto const route = router::shortest_path(*g, from, to, weights);
    return {route ? 200 : 422, render_plan(req, *g, from, to, route)};
  } catch (input_error const& e) {
    return {400, render_error(e.what())};
  }
}

Reply plan(graph::RoutingGraph const* g, ParamLookup const& get) {
  if (g == nullptr) {
    return {503, render_error("graph not loaded")};
  }
  try {
    return plan(g, parse_plan_request(get));
  } catch (input_error const& e) {
    return {400, render_error(e.what())};
  }
}

Reply health(graph::RoutingGraph const* g) {
  return {200, fmt::format(
                   R"({{"status":"ok","graph_loaded":{},"vertices":{},"edges":{}}})",
                   g != nullptr ? "true" : "false",
                   g != nullptr ? g->vertices.size() : 0U,
                   g != nullptr ? g->edges.size() : 0U)};
}

Server::Server() : http_{std::make_unique<httplib::Server>()} {
  http_->set_default_headers(
      {{"Access-Control-Allow-Origin", "*"},
       {"Access-Control-Allow-Methods", "GET, OPTIONS"},
       {"Access-Control-Allow-Headers", "Content-Type"}});

  auto const send = [](httplib::Response& res, Reply const& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };

  http_->Get("/plan", [this, send](httplib::Request const& req,
                                   httplib::Response& res) {
    auto const g = graph();
    auto const lookup = [&req](std::string_view name)
        -> std::optional<std::string> {
      auto const key = std::string{name};
      if (!req.has_param(key)) {
        return std::nullopt;
      }
      return req.get_param_value(key);
    };
    send(res, plan(g.get(), lookup));
  });
  http_->Get("/health", [this, send](httplib::Request const&,
                                     httplib::Response& res) {
    auto const g = graph();
    send(res, health(g.get()));
  });
  http_->Options(".*", [](httplib::Request const&, httplib::Response& res) {
    res.status = 204;
  });
}

Server::~Server() = default;

void Server::set_graph(std::shared_ptr<graph::RoutingGraph const> g) {
  auto const lock = std::lock_guard{mutex_};
  graph_ = std::move(g);
}

std::shared_ptr<graph::RoutingGraph const> Server::graph() const {
  auto const lock = std::lock_guard{mutex_};
  return graph_;
}

bool Server::listen(std::string const& host, int const port) {
  return http_->listen(host, port);
}

int Server::bind_to_any_port(std::string const& host) {
  return http_->bind_to_any_port(host);
}

bool Server::listen_after_bind() { return http_->listen_after_bind(); }

void Server::wait_until_ready() const { http_->wait_until_ready(); }

void Server::stop() { http_->stop(); }

int resolve_port(std::optional<int> const flag) {
  if (flag) {
    return *flag;
  }
  if (auto const env = std::getenv("AFRP_PORT"); env != nullptr) {
    auto port = 0;
    auto const s = std::string_view{env};
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
    if (ec != std::errc{} || ptr != s.data() + s.size() || port <= 0 ||
        port > 65535) {
      throw input_error{fmt::format("AFRP_PORT is not a valid port: '{}'", s)};
    }
    return port;
  }
  return kDefaultPort;
}

}  // namespace afrp::service
