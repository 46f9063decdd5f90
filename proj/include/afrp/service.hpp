#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "afrp/geo.hpp"
#include "afrp/graph.hpp"
#include "afrp/router.hpp"

namespace httplib {
class Server;
}

namespace afrp::service {

constexpr int kDefaultPort = 8080;

struct PlanRequest {
  geo::LatLon from;
  geo::LatLon to;
  double slope_pct{0.0};
  double duration_pct{0.0};
  double amenity_pct{0.0};
  double comfort_pct{0.0};
};

struct Reply {
  int status{200};
  std::string body;
};

// Lookup of a query parameter; nullopt when absent.
using ParamLookup =
    std::function<std::optional<std::string>(std::string_view name)>;

// Parses fromLat, fromLon, toLat, toLon, slope, duration, amenity, comfort.
// Throws input_error naming the offending parameter.
PlanRequest parse_plan_request(ParamLookup const&);

// GET /plan semantics over an optional graph: 200 plan, 400 bad weights or
// coordinates, 422 no route, 503 no graph. The CLI `plan` command prints
// the same body.
Reply plan(graph::RoutingGraph const* g, PlanRequest const&);
Reply plan(graph::RoutingGraph const* g, ParamLookup const&);
Reply health(graph::RoutingGraph const* g);

std::string render_plan(PlanRequest const&, graph::RoutingGraph const&,
                        graph::vertex_id from, graph::vertex_id to,
                        std::optional<router::RoutePlan> const&);
std::string render_error(std::string_view message);

// HTTP front end. The graph may be installed after the server starts
// listening; until then /plan answers 503.
class Server {
public:
  Server();
  ~Server();
  Server(Server const&) = delete;
  Server& operator=(Server const&) = delete;

  void set_graph(std::shared_ptr<graph::RoutingGraph const>);
  std::shared_ptr<graph::RoutingGraph const> graph() const;

  // Blocking. Returns false when the socket cannot be bound.
  bool listen(std::string const& host, int port);
  // Binds an ephemeral port; pair with listen_after_bind().
  int bind_to_any_port(std::string const& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

private:
  mutable std::mutex mutex_;
  std::shared_ptr<graph::RoutingGraph const> graph_;
  std::unique_ptr<httplib::Server> http_;
};

// --port wins over AFRP_PORT, which wins over kDefaultPort.
int resolve_port(std::optional<int> flag);

}  // namespace afrp::service
