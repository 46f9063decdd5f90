#include "afrp/apt.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>
#include <tuple>

#include "fmt/core.h"
#include "nlohmann/json.hpp"

#include "afrp/error.hpp"

namespace afrp::apt {

namespace {

template <typename T>
T parse_number(std::string_view s, std::size_t row, std::string_view what) {
  T v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw parse_error{
        fmt::format("correlation csv row {}: bad {} '{}'", row, what, s)};
  }
  return v;
}

constexpr std::string_view kCountsHeader =
    "way_id,bench,toilets,drinking_water,handrail";
constexpr std::string_view kWitnessHeader = "way_id,amenity_id,kind,distance_m";

std::string join_header(CsvRecord const& r) {
  auto s = std::string{};
  for (auto const& f : r.fields) {
    if (!s.empty()) {
      s += ',';
    }
    s += f;
  }
  return s;
}

}  // namespace

std::vector<geo::LatLon> way_geometry(OsmDocument const& doc,
                                      OsmWay const& way) {
  auto pts = std::vector<geo::LatLon>{};
  pts.reserve(way.node_refs.size());
  for (auto const ref : way.node_refs) {
    if (auto const it = doc.nodes.find(ref); it != end(doc.nodes)) {
      pts.push_back(it->second.pos);
    }
  }
  return pts;
}

WayBoxes build_way_bboxes(OsmDocument const& doc, double const max_distance) {
  if (!(max_distance >= 0.0)) {
    throw input_error{
        fmt::format("max distance must be >= 0, got {}", max_distance)};
  }
  auto out = WayBoxes{};
  for (auto const& [id, way] : doc.ways) {
    auto const pts = way_geometry(doc, way);
    if (pts.empty()) {
      ++out.skipped_ways;
      continue;
    }
    out.boxes.emplace(id, geo::buffered_bbox(pts, max_distance));
  }
  return out;
}

std::string CorrelationStats::to_json() const {
  auto j = nlohmann::ordered_json{};
  j["ways"] = ways;
  j["amenities"] = amenities;
  j["pairs_tested"] = pairs_tested;
  j["correlations"] = correlations;
  return j.dump();
}

CorrelationResult correlate(OsmDocument const& doc,
                            std::span<Amenity const> amenities,
                            double const max_distance) {
  auto ids = std::set<std::string_view>{};
  for (auto const& a : amenities) {
    if (!ids.insert(a.id).second) {
      throw input_error{fmt::format("duplicate amenity id '{}'", a.id)};
    }
  }

  auto const boxes = build_way_bboxes(doc, max_distance);
  auto result = CorrelationResult{};
  result.stats.ways = boxes.boxes.size();
  result.stats.amenities = amenities.size();

  auto planar = std::vector<geo::PlanarPoint>{};
  for (auto const& [way_id, box] : boxes.boxes) {
    auto const pts = way_geometry(doc, doc.ways.at(way_id));
    auto const frame = geo::PlanarFrame{pts.front()};
    planar.clear();
    for (auto const& p : pts) {
      planar.push_back(frame.to_planar(p));
    }

    auto const first = result.correlations.size();
    for (auto const& a : amenities) {
      if (!box.contains(a.pos)) {
        continue;
      }
      ++result.stats.pairs_tested;

      auto const p = frame.to_planar(a.pos);
      auto best = std::numeric_limits<double>::infinity();
      if (planar.size() == 1) {
        best = geo::project_point_to_segment(p, planar[0], planar[0]).distance_m;
      }
      for (auto i = std::size_t{1}; i < planar.size(); ++i) {
        best = std::min(
            best,
            geo::project_point_to_segment(p, planar[i - 1], planar[i]).distance_m);
      }
      if (best <= max_distance) {
        result.correlations.push_back(Correlation{
            .way_id = way_id, .amenity_id = a.id, .kind = a.kind,
            .distance_m = best});
      }
    }
    std::sort(begin(result.correlations) + static_cast<std::ptrdiff_t>(first),
              end(result.correlations),
              [](Correlation const& x, Correlation const& y) {
                return x.amenity_id < y.amenity_id;
              });
  }
  result.stats.correlations = result.correlations.size();
  return result;
}

std::vector<WayAmenityCounts> aggregate_counts(
    std::span<Correlation const> correlations) {
  auto distinct =
      std::map<osm_id_t,
               std::array<std::set<std::string_view>, kAmenityKindCount>>{};
  for (auto const& c : correlations) {
    distinct[c.way_id][static_cast<std::size_t>(c.kind)].insert(c.amenity_id);
  }
  auto out = std::vector<WayAmenityCounts>{};
  out.reserve(distinct.size());
  for (auto const& [way_id, sets] : distinct) {
    auto counts = WayAmenityCounts{.way_id = way_id, .counts = {}};
    for (auto k = std::size_t{0}; k < kAmenityKindCount; ++k) {
      counts.counts[k] = sets[k].size();
    }
    out.push_back(counts);
  }
  return out;
}

std::string format_counts_csv(std::span<WayAmenityCounts const> counts) {
  auto sorted = std::vector<WayAmenityCounts>{begin(counts), end(counts)};
  std::sort(begin(sorted), end(sorted), [](auto const& a, auto const& b) {
    return a.way_id < b.way_id;
  });
  auto out = std::string{kCountsHeader};
  out += '\n';
  for (auto const& c : sorted) {
    out += fmt::format("{},{},{},{},{}\n", c.way_id, c.counts[0], c.counts[1],
                       c.counts[2], c.counts[3]);
  }
  return out;
}

std::string format_witness_csv(std::span<Correlation const> correlations) {
  auto sorted = std::vector<Correlation>{begin(correlations), end(correlations)};
  std::sort(begin(sorted), end(sorted), [](auto const& a, auto const& b) {
    return std::tie(a.way_id, a.amenity_id) < std::tie(b.way_id, b.amenity_id);
  });
  auto out = std::string{kWitnessHeader};
  out += '\n';
  for (auto const& c : sorted) {
    out += fmt::format("{},{},{},{:.2f}\n", c.way_id, csv_escape(c.amenity_id),
                       to_string(c.kind), c.distance_m);
  }
  return out;
}

void write_correlation_csv(std::span<Correlation const> correlations,
                           std::string const& path, CsvMode const mode) {
  if (mode == CsvMode::witnesses) {
    write_file(path, format_witness_csv(correlations));
  } else {
    auto const counts = aggregate_counts(correlations);
    write_file(path, format_counts_csv(counts));
  }
}

std::vector<Correlation> parse_witness_csv(std::string_view const csv) {
  auto const records = parse_csv_records(csv);
  if (records.empty() || join_header(records.front()) != kWitnessHeader) {
    throw parse_error{fmt::format(
        "correlation csv: expected header '{}'", kWitnessHeader)};
  }
  auto out = std::vector<Correlation>{};
  for (auto r = std::size_t{1}; r < records.size(); ++r) {
    auto const& rec = records[r];
    if (rec.fields.size() != 4) {
      throw parse_error{fmt::format(
          "correlation csv row {}: expected 4 fields, got {}", rec.line,
          rec.fields.size())};
    }
    auto const kind = parse_amenity_kind(rec.fields[2]);
    if (!kind) {
      throw parse_error{fmt::format("correlation csv row {}: unknown kind '{}'",
                                    rec.line, rec.fields[2])};
    }
    out.push_back(Correlation{
        .way_id = parse_number<osm_id_t>(rec.fields[0], rec.line, "way_id"),
        .amenity_id = rec.fields[1],
        .kind = *kind,
        .distance_m =
            parse_number<double>(rec.fields[3], rec.line, "distance_m")});
  }
  return out;
}

std::vector<WayAmenityCounts> parse_counts_csv(std::string_view const csv) {
  auto const records = parse_csv_records(csv);
  if (records.empty() || join_header(records.front()) != kCountsHeader) {
    throw parse_error{fmt::format(
        "correlation csv: expected header '{}'", kCountsHeader)};
  }
  auto out = std::vector<WayAmenityCounts>{};
  for (auto r = std::size_t{1}; r < records.size(); ++r) {
    auto const& rec = records[r];
    if (rec.fields.size() != 1 + kAmenityKindCount) {
      throw parse_error{fmt::format(
          "correlation csv row {}: expected 5 fields, got {}", rec.line,
          rec.fields.size())};
    }
    auto c = WayAmenityCounts{
        .way_id = parse_number<osm_id_t>(rec.fields[0], rec.line, "way_id"),
        .counts = {}};
    for (auto k = std::size_t{0}; k < kAmenityKindCount; ++k) {
      c.counts[k] =
          parse_number<std::size_t>(rec.fields[k + 1], rec.line, "count");
    }
    out.push_back(c);
  }
  return out;
}

std::vector<Correlation> parse_correlation_csv(std::string_view const csv) {
  auto const records = parse_csv_records(csv);
  if (!records.empty() && join_header(records.front()) == kWitnessHeader) {
    return parse_witness_csv(csv);
  }
  auto out = std::vector<Correlation>{};
  for (auto const& c : parse_counts_csv(csv)) {
    for (auto const kind : kAllAmenityKinds) {
      for (auto n = std::size_t{0}; n < c[kind]; ++n) {
        out.push_back(Correlation{
            .way_id = c.way_id,
            .amenity_id = fmt::format("way:{}:{}:{}", c.way_id, to_string(kind), n),
            .kind = kind,
            .distance_m = 0.0});
      }
    }
  }
  return out;
}

}  // namespace afrp::apt
