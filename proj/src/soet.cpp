#include "afrp/soet.hpp"

#include <algorithm>
#include <set>

#include "fmt/core.h"
#include "nlohmann/json.hpp"

#include "afrp/error.hpp"

namespace afrp::soet {

std::string EnrichmentReport::to_json() const {
  auto j = nlohmann::ordered_json{};
  j["added_count"] = added_count;
  if (id_range) {
    j["first_id"] = id_range->first;
    j["last_id"] = id_range->second;
  } else {
    j["first_id"] = nullptr;
    j["last_id"] = nullptr;
  }
  auto per_kind = nlohmann::ordered_json::object();
  for (auto const k : kAllAmenityKinds) {
    per_kind[std::string{to_string(k)}] =
        per_kind_counts[static_cast<std::size_t>(k)];
  }
  j["per_kind"] = std::move(per_kind);
  return j.dump();
}

EnrichmentResult enrich(OsmDocument doc,
                        std::vector<Amenity> const& amenities) {
  auto existing = std::set<std::string, std::less<>>{};
  for (auto const& [id, n] : doc.nodes) {
    if (auto const it = n.tags.find(kProvenanceTag); it != end(n.tags)) {
      existing.insert(it->second);
    }
  }

  auto batch = std::set<std::string, std::less<>>{};
  for (auto const& a : amenities) {
    if (existing.contains(a.id)) {
      throw input_error{fmt::format(
          "amenity '{}' already enriched ({}={} present); refusing to enrich "
          "twice",
          a.id, kProvenanceTag, a.id)};
    }
    if (!batch.insert(a.id).second) {
      throw input_error{fmt::format("duplicate amenity id '{}'", a.id)};
    }
  }

  auto next_id = osm_id_t{-1};
  if (!doc.nodes.empty()) {
    next_id = std::min(next_id, doc.nodes.begin()->first - 1);
  }

  auto report = EnrichmentReport{};
  for (auto const& a : amenities) {
    auto node = OsmNode{.id = next_id, .pos = a.pos, .tags = {}};
    node.tags["amenity"] = std::string{to_string(a.kind)};
    node.tags[kProvenanceTag] = a.id;
    if (a.name) {
      node.tags["name"] = *a.name;
    }
    doc.nodes.emplace(next_id, std::move(node));

    if (!report.id_range) {
      report.id_range = std::pair{next_id, next_id};
    }
    report.id_range->second = next_id;
    ++report.per_kind_counts[static_cast<std::size_t>(a.kind)];
    ++report.added_count;
    --next_id;
  }
  return {std::move(doc), report};
}

std::vector<Amenity> extract_amenities(OsmDocument const& doc) {
  auto out = std::vector<Amenity>{};
  for (auto const& [id, n] : doc.nodes) {
    auto const kind_tag = n.tags.find("amenity");
    if (kind_tag == end(n.tags)) {
      continue;
    }
    auto const kind = parse_amenity_kind(kind_tag->second);
    if (!kind) {
      continue;
    }
    auto a = Amenity{.id = {}, .kind = *kind, .pos = n.pos, .name = {}};
    auto const ref = n.tags.find(kProvenanceTag);
    a.id = ref != end(n.tags) ? ref->second : fmt::format("osm:{}", id);
    if (auto const name = n.tags.find("name"); name != end(n.tags)) {
      a.name = name->second;
    }
    out.push_back(std::move(a));
  }
  std::sort(begin(out), end(out),
            [](Amenity const& a, Amenity const& b) { return a.id < b.id; });
  auto const dup = std::adjacent_find(
      begin(out), end(out),
      [](Amenity const& a, Amenity const& b) { return a.id == b.id; });
  if (dup != end(out)) {
    throw input_error{
        fmt::format("amenity id '{}' appears on more than one node", dup->id)};
  }
  return out;
}

}  // namespace afrp::soet
