#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afrp/osm_io.hpp"

namespace afrp::soet {

// Tag that marks nodes materialized from an amenity batch; its value is the
// amenity id.
inline constexpr char const* kProvenanceTag = "ref:afrp";

struct EnrichmentReport {
  std::size_t added_count{0};
  // First and last assigned node ids; empty when nothing was added.
  std::optional<std::pair<osm_id_t, osm_id_t>> id_range;
  std::array<std::size_t, kAmenityKindCount> per_kind_counts{};

  // Single-line JSON.
  std::string to_json() const;
};

struct EnrichmentResult {
  OsmDocument doc;
  EnrichmentReport report;
};

// Adds one standalone node per amenity, tagged amenity=<kind>,
// ref:afrp=<id> and name when present. New ids are negative and descend
// from min(-1, smallest existing id - 1). Existing nodes and ways are left
// untouched. Throws input_error when an amenity id is already present as a
// ref:afrp tag or repeats within the batch.
EnrichmentResult enrich(OsmDocument doc, std::vector<Amenity> const& amenities);

// Reads amenity nodes back out of a document: nodes tagged amenity=<kind>
// with kind in the closed vocabulary. The id is the ref:afrp value when
// present, otherwise "osm:<node id>". Result is sorted by id.
std::vector<Amenity> extract_amenities(OsmDocument const& doc);

}  // namespace afrp::soet
