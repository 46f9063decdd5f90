#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "afrp/geo.hpp"

namespace afrp {

using osm_id_t = std::int64_t;
using Tags = std::map<std::string, std::string>;

struct OsmNode {
  osm_id_t id{0};
  geo::LatLon pos;
  Tags tags;

  friend bool operator==(OsmNode const&, OsmNode const&) = default;
};

struct OsmWay {
  osm_id_t id{0};
  std::vector<osm_id_t> node_refs;
  Tags tags;

  friend bool operator==(OsmWay const&, OsmWay const&) = default;
};

struct OsmDocument {
  std::map<osm_id_t, OsmNode> nodes;
  std::map<osm_id_t, OsmWay> ways;
  std::optional<geo::BBox> bounds;

  friend bool operator==(OsmDocument const&, OsmDocument const&) = default;
};

enum class AmenityKind : std::uint8_t { bench, toilets, drinking_water, handrail };

constexpr std::size_t kAmenityKindCount = 4;
constexpr std::array<AmenityKind, kAmenityKindCount> kAllAmenityKinds{
    AmenityKind::bench, AmenityKind::toilets, AmenityKind::drinking_water,
    AmenityKind::handrail};

std::string_view to_string(AmenityKind);
std::optional<AmenityKind> parse_amenity_kind(std::string_view);

// Benches, toilets and drinking water count as amenities along a route;
// handrails count as comfortable elements.
constexpr bool is_comfort_kind(AmenityKind k) {
  return k == AmenityKind::handrail;
}

struct Amenity {
  std::string id;
  AmenityKind kind{AmenityKind::bench};
  geo::LatLon pos;
  std::optional<std::string> name;

  friend bool operator==(Amenity const&, Amenity const&) = default;
};

// OSM XML subset: osm, bounds, node(id, lat, lon), way(id), nd(ref),
// tag(k, v). Relations and any other element are skipped. Errors carry the
// offending line number.
OsmDocument parse_osm(std::string_view xml);

// Nodes first, then ways, both in ascending id order. Coordinates are
// written with 7 decimals.
std::string write_osm(OsmDocument const&);

// RFC-4180 CSV with a header naming at least id, kind, lat, lon (name is
// optional); columns may appear in any order. Row numbers in errors count
// the header as row 1.
std::vector<Amenity> parse_amenity_csv(std::string_view csv);
std::string write_amenity_csv(std::vector<Amenity> const&);

// Minimal RFC-4180 reader shared by the CSV consumers. `line` is the 1-based
// line on which the record starts; blank lines produce no record.
struct CsvRecord {
  std::size_t line{0};
  std::vector<std::string> fields;
};
std::vector<CsvRecord> parse_csv_records(std::string_view csv);
std::string csv_escape(std::string_view field);

std::string read_file(std::string const& path);
void write_file(std::string const& path, std::string_view content);

}  // namespace afrp
