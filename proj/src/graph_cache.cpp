#include <bit>
#include <cstring>

#include "fmt/core.h"

#include "afrp/error.hpp"
#include "afrp/graph.hpp"

namespace afrp::graph {

namespace {

constexpr std::string_view kMagic = "AFRPGRPH";
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "graph cache assumes a little-endian host");

std::uint64_t checksum(std::string_view bytes) {
  auto h = std::uint64_t{14695981039346656037ULL};
  for (auto const c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

class writer {
public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T const v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    out_.append(raw, sizeof(T));
  }
  void put(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  std::string& str() { return out_; }

private:
  std::string out_;
};

class reader {
public:
  explicit reader(std::string_view in) : in_{in} {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    need(sizeof(T));
    T v{};
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    auto const n = get<std::uint32_t>();
    need(n);
    auto s = std::string{in_.substr(pos_, n)};
    pos_ += n;
    return s;
  }
  // Guards count fields against absurd allocations on corrupt input.
  std::size_t get_count(std::size_t min_bytes_each) {
    auto const n = get<std::uint32_t>();
    need(static_cast<std::size_t>(n) * min_bytes_each);
    return n;
  }
  bool done() const { return pos_ == in_.size(); }

private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw parse_error{"graph cache: truncated"};
    }
  }

  std::string_view in_;
  std::size_t pos_{0};
};

[[noreturn]] void corrupt(std::string_view what) {
  throw parse_error{fmt::format("graph cache: corrupt ({})", what)};
}

}  // namespace

std::string serialize(RoutingGraph const& g) {
  auto w = writer{};
  w.str().append(kMagic);
  w.put(kVersion);

  w.put(g.config.walking_speed_mps);
  w.put(g.config.max_grade_clamp);
  w.put(g.config.steps_grade);
  w.put(static_cast<std::uint32_t>(g.config.walkable_highways.size()));
  for (auto const& h : g.config.walkable_highways) {
    w.put(h);
  }
  w.put(g.config_hash);

  w.put(static_cast<std::uint32_t>(g.amenity_ids.size()));
  for (auto const& id : g.amenity_ids) {
    w.put(id);
  }

  w.put(static_cast<std::uint32_t>(g.ways.size()));
  for (auto const& way : g.ways) {
    w.put(way.way_id);
    w.put(way.highway);
    w.put(way.length_m);
    for (auto const& ids : way.amenities) {
      w.put(static_cast<std::uint32_t>(ids.size()));
      for (auto const id : ids) {
        w.put(id);
      }
    }
  }

  w.put(static_cast<std::uint32_t>(g.vertices.size()));
  for (auto const& v : g.vertices) {
    w.put(v.osm_node_id);
    w.put(v.pos.lat());
    w.put(v.pos.lon());
    w.put(static_cast<std::uint8_t>(v.elevation.has_value()));
    w.put(v.elevation.value_or(0.0));
  }

  w.put(static_cast<std::uint32_t>(g.edges.size()));
  for (auto const& e : g.edges) {
    w.put(e.from);
    w.put(e.to);
    w.put(e.way);
    w.put(e.length_m);
    w.put(e.grade);
    w.put(static_cast<std::uint8_t>(e.grade_unknown));
    w.put(e.reverse);
  }

  w.put(checksum(w.str()));
  return std::move(w.str());
}

RoutingGraph deserialize(std::string_view const bytes) {
  if (bytes.size() < kMagic.size() + sizeof(std::uint32_t) +
                         sizeof(std::uint64_t) ||
      bytes.substr(0, kMagic.size()) != kMagic) {
    throw parse_error{"graph cache: not a graph cache file (bad magic)"};
  }
  auto const body = bytes.substr(0, bytes.size() - sizeof(std::uint64_t));
  auto stored = std::uint64_t{};
  std::memcpy(&stored, bytes.data() + body.size(), sizeof(stored));

  auto r = reader{body.substr(kMagic.size())};
  auto const version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw parse_error{fmt::format(
        "graph cache: unsupported format version {} (expected {})", version,
        kVersion)};
  }
  if (checksum(body) != stored) {
    throw parse_error{"graph cache: checksum mismatch"};
  }

  auto g = RoutingGraph{};
  g.config.walking_speed_mps = r.get<double>();
  g.config.max_grade_clamp = r.get<double>();
  g.config.steps_grade = r.get<double>();
  g.config.walkable_highways.clear();
  for (auto n = r.get_count(4); n != 0; --n) {
    g.config.walkable_highways.insert(r.get_string());
  }
  g.config_hash = r.get<std::uint64_t>();
  if (g.config_hash != g.config.hash()) {
    corrupt("config hash");
  }

  for (auto n = r.get_count(4); n != 0; --n) {
    g.amenity_ids.push_back(r.get_string());
  }

  for (auto n = r.get_count(8); n != 0; --n) {
    auto way = WayInfo{};
    way.way_id = r.get<osm_id_t>();
    way.highway = r.get_string();
    way.length_m = r.get<double>();
    for (auto& ids : way.amenities) {
      for (auto m = r.get_count(4); m != 0; --m) {
        auto const id = r.get<amenity_idx>();
        if (id >= g.amenity_ids.size()) {
          corrupt("amenity index");
        }
        ids.push_back(id);
      }
    }
    g.ways.push_back(std::move(way));
  }

  for (auto n = r.get_count(8); n != 0; --n) {
    auto v = Vertex{};
    v.id = static_cast<vertex_id>(g.vertices.size());
    v.osm_node_id = r.get<osm_id_t>();
    auto const lat = r.get<double>();
    auto const lon = r.get<double>();
    try {
      v.pos = geo::LatLon{lat, lon};
    } catch (input_error const&) {
      corrupt("vertex coordinate");
    }
    auto const has_elevation = r.get<std::uint8_t>() != 0;
    auto const elevation = r.get<double>();
    if (has_elevation) {
      v.elevation = elevation;
    }
    g.vertices.push_back(v);
  }

  for (auto n = r.get_count(8); n != 0; --n) {
    auto e = Edge{};
    e.from = r.get<vertex_id>();
    e.to = r.get<vertex_id>();
    e.way = r.get<way_idx>();
    e.length_m = r.get<double>();
    e.grade = r.get<double>();
    e.grade_unknown = r.get<std::uint8_t>() != 0;
    e.reverse = r.get<edge_id>();
    if (e.from >= g.vertices.size() || e.to >= g.vertices.size() ||
        e.way >= g.ways.size() || !(e.length_m > 0.0)) {
      corrupt("edge");
    }
    g.edges.push_back(e);
  }
  if (!r.done()) {
    corrupt("trailing bytes");
  }

  g.first_out.assign(g.vertices.size() + 1, 0);
  for (auto i = std::size_t{0}; i < g.edges.size(); ++i) {
    auto const& e = g.edges[i];
    if (i > 0 && e.from < g.edges[i - 1].from) {
      corrupt("edge order");
    }
    if (e.reverse >= g.edges.size() || g.edges[e.reverse].reverse != i ||
        g.edges[e.reverse].from != e.to || g.edges[e.reverse].to != e.from) {
      corrupt("reverse edge");
    }
    ++g.first_out[e.from + 1];
  }
  for (auto v = std::size_t{0}; v < g.vertices.size(); ++v) {
    g.first_out[v + 1] += g.first_out[v];
  }
  return g;
}

void write_graph_cache(RoutingGraph const& g, std::string const& path) {
  write_file(path, serialize(g));
}

RoutingGraph read_graph_cache(std::string const& path) {
  return deserialize(read_file(path));
}

}  // namespace afrp::graph
