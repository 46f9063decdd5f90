#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afrp/geo.hpp"
#include "afrp/osm_io.hpp"

namespace afrp::apt {

constexpr double kDefaultMaxDistance = 20.0;

// Witness behind one way/amenity count: the amenity lies within the run's
// max distance of at least one segment of the way.
struct Correlation {
  osm_id_t way_id{0};
  std::string amenity_id;
  AmenityKind kind{AmenityKind::bench};
  double distance_m{0.0};

  friend bool operator==(Correlation const&, Correlation const&) = default;
};

struct WayAmenityCounts {
  osm_id_t way_id{0};
  std::array<std::size_t, kAmenityKindCount> counts{};

  std::size_t& operator[](AmenityKind k) {
    return counts[static_cast<std::size_t>(k)];
  }
  std::size_t operator[](AmenityKind k) const {
    return counts[static_cast<std::size_t>(k)];
  }

  friend bool operator==(WayAmenityCounts const&,
                         WayAmenityCounts const&) = default;
};

struct WayBoxes {
  std::map<osm_id_t, geo::BBox> boxes;
  std::size_t skipped_ways{0};  // ways without any resolvable node
};

// Node positions of a way in ref order, skipping refs missing from the
// document.
std::vector<geo::LatLon> way_geometry(OsmDocument const&, OsmWay const&);

// One buffered box per way, grown by max_distance. Single O(ways) pass.
WayBoxes build_way_bboxes(OsmDocument const&, double max_distance);

struct CorrelationStats {
  std::size_t ways{0};
  std::size_t amenities{0};
  std::size_t pairs_tested{0};  // exact projection evaluations
  std::size_t correlations{0};

  std::string to_json() const;
};

struct CorrelationResult {
  std::vector<Correlation> correlations;  // ascending (way_id, amenity_id)
  CorrelationStats stats;
};

// Correlates every way with the amenities whose distance to the way, the
// minimum over its segments of the orthographic projection distance in the
// way's local planar frame, is <= max_distance. Only pairs whose amenity
// falls in the way's buffered box are evaluated exactly.
CorrelationResult correlate(OsmDocument const&,
                            std::span<Amenity const> amenities,
                            double max_distance);

// Distinct amenity ids per way and kind; ways without correlations omitted.
std::vector<WayAmenityCounts> aggregate_counts(
    std::span<Correlation const> correlations);

enum class CsvMode { counts, witnesses };

// counts:    way_id,bench,toilets,drinking_water,handrail
// witnesses: way_id,amenity_id,kind,distance_m (2 decimals)
std::string format_counts_csv(std::span<WayAmenityCounts const>);
std::string format_witness_csv(std::span<Correlation const>);

void write_correlation_csv(std::span<Correlation const>,
                           std::string const& path, CsvMode);

std::vector<Correlation> parse_witness_csv(std::string_view);
std::vector<WayAmenityCounts> parse_counts_csv(std::string_view);

// Accepts either CSV flavour (decided by the header). Counts rows expand to
// synthetic witnesses with ids "way:<way_id>:<kind>:<n>" so they can be
// attached like real ones; such ids never dedup across ways.
std::vector<Correlation> parse_correlation_csv(std::string_view);

}  // namespace afrp::apt
