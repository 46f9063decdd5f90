#include "afrp/osm_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "expat.h"
#include "fmt/core.h"

#include "afrp/error.hpp"

namespace afrp {

namespace {

std::optional<osm_id_t> to_id(std::string_view s) {
  osm_id_t v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::optional<double> to_double(std::string_view s) {
  // from_chars rejects a leading '+', which some exporters emit.
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  double v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::string_view trim(std::string_view s) {
  auto const ws = " \t\r\n";
  auto const b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) {
    return {};
  }
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

// --- OSM XML -------------------------------------------------------------

enum class element { node, way, other };

struct osm_parse_state {
  XML_Parser parser{nullptr};
  OsmDocument doc;
  std::vector<element> stack;
  std::optional<OsmNode> node;
  std::optional<OsmWay> way;
  bool seen_root{false};
  std::optional<std::string> error;

  void fail(std::string msg) {
    if (!error) {
      error = fmt::format("line {}: {}", XML_GetCurrentLineNumber(parser),
                          std::move(msg));
      XML_StopParser(parser, XML_FALSE);
    }
  }
};

std::optional<std::string_view> attr(XML_Char const** attrs,
                                     std::string_view key) {
  for (auto a = attrs; a[0] != nullptr; a += 2) {
    if (key == a[0]) {
      return std::string_view{a[1]};
    }
  }
  return std::nullopt;
}

std::optional<double> required_double(osm_parse_state& s, XML_Char const** attrs,
                                      std::string_view what,
                                      std::string_view key) {
  auto const raw = attr(attrs, key);
  if (!raw) {
    s.fail(fmt::format("{}: missing {}", what, key));
    return std::nullopt;
  }
  auto const v = to_double(*raw);
  if (!v) {
    s.fail(fmt::format("{}: invalid {} '{}'", what, key, *raw));
  }
  return v;
}

void on_start(void* user, XML_Char const* name_c, XML_Char const** attrs) {
  auto& s = *static_cast<osm_parse_state*>(user);
  if (s.error) {
    return;
  }
  auto const name = std::string_view{name_c};

  if (!s.seen_root) {
    s.seen_root = true;
    if (name != "osm") {
      s.fail(fmt::format("expected <osm> root, found <{}>", name));
    }
    s.stack.push_back(element::other);
    return;
  }

  auto const parent = s.stack.back();
  auto const top_level = s.stack.size() == 1;

  if (top_level && name == "node") {
    auto const raw_id = attr(attrs, "id");
    auto const id = raw_id ? to_id(*raw_id) : std::nullopt;
    if (!id) {
      s.fail(raw_id ? fmt::format("node: invalid id '{}'", *raw_id)
                    : std::string{"node: missing id"});
      return;
    }
    auto const what = fmt::format("node {}", *id);
    auto const lat = required_double(s, attrs, what, "lat");
    if (!lat) {
      return;
    }
    auto const lon = required_double(s, attrs, what, "lon");
    if (!lon) {
      return;
    }
    try {
      s.node = OsmNode{.id = *id, .pos = geo::LatLon{*lat, *lon}, .tags = {}};
    } catch (input_error const& e) {
      s.fail(fmt::format("{}: {}", what, e.what()));
      return;
    }
    s.stack.push_back(element::node);
  } else if (top_level && name == "way") {
    auto const raw_id = attr(attrs, "id");
    auto const id = raw_id ? to_id(*raw_id) : std::nullopt;
    if (!id) {
      s.fail(raw_id ? fmt::format("way: invalid id '{}'", *raw_id)
                    : std::string{"way: missing id"});
      return;
    }
    s.way = OsmWay{.id = *id, .node_refs = {}, .tags = {}};
    s.stack.push_back(element::way);
  } else if (top_level && name == "bounds") {
    auto const get = [&](std::string_view k) {
      return required_double(s, attrs, "bounds", k);
    };
    auto const min_lat = get("minlat");
    auto const min_lon = min_lat ? get("minlon") : std::nullopt;
    auto const max_lat = min_lon ? get("maxlat") : std::nullopt;
    auto const max_lon = max_lat ? get("maxlon") : std::nullopt;
    if (!max_lon) {
      return;
    }
    s.doc.bounds = geo::BBox{*min_lat, *min_lon, *max_lat, *max_lon};
    s.stack.push_back(element::other);
  } else if (name == "nd" && parent == element::way) {
    auto const raw = attr(attrs, "ref");
    auto const ref = raw ? to_id(*raw) : std::nullopt;
    if (!ref) {
      s.fail(raw ? fmt::format("way {}: invalid nd ref '{}'", s.way->id, *raw)
                 : fmt::format("way {}: nd missing ref", s.way->id));
      return;
    }
    s.way->node_refs.push_back(*ref);
    s.stack.push_back(element::other);
  } else if (name == "tag" &&
             (parent == element::node || parent == element::way)) {
    auto& tags = parent == element::node ? s.node->tags : s.way->tags;
    auto const what = parent == element::node
                          ? fmt::format("node {}", s.node->id)
                          : fmt::format("way {}", s.way->id);
    auto const k = attr(attrs, "k");
    auto const v = attr(attrs, "v");
    if (!k || !v) {
      s.fail(fmt::format("{}: tag missing {}", what, k ? "v" : "k"));
      return;
    }
    if (!tags.emplace(std::string{*k}, std::string{*v}).second) {
      s.fail(fmt::format("{}: duplicate tag key '{}'", what, *k));
      return;
    }
    s.stack.push_back(element::other);
  } else {
    s.stack.push_back(element::other);
  }
}

void on_end(void* user, XML_Char const*) {
  auto& s = *static_cast<osm_parse_state*>(user);
  if (s.error || s.stack.empty()) {
    return;
  }
  auto const closing = s.stack.back();
  s.stack.pop_back();
  if (closing == element::node) {
    auto const id = s.node->id;
    if (!s.doc.nodes.emplace(id, std::move(*s.node)).second) {
      s.fail(fmt::format("duplicate node id {}", id));
    }
    s.node.reset();
  } else if (closing == element::way) {
    auto const id = s.way->id;
    if (!s.doc.ways.emplace(id, std::move(*s.way)).second) {
      s.fail(fmt::format("duplicate way id {}", id));
    }
    s.way.reset();
  }
}

void xml_escape_to(std::string& out, std::string_view s) {
  for (auto const c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
}

void write_tags(std::string& out, Tags const& tags) {
  for (auto const& [k, v] : tags) {
    out += "    <tag k=\"";
    xml_escape_to(out, k);
    out += "\" v=\"";
    xml_escape_to(out, v);
    out += "\"/>\n";
  }
}

}  // namespace

std::string_view to_string(AmenityKind const k) {
  switch (k) {
    case AmenityKind::bench: return "bench";
    case AmenityKind::toilets: return "toilets";
    case AmenityKind::drinking_water: return "drinking_water";
    case AmenityKind::handrail: return "handrail";
  }
  return "unknown";
}

std::optional<AmenityKind> parse_amenity_kind(std::string_view const s) {
  for (auto const k : kAllAmenityKinds) {
    if (to_string(k) == s) {
      return k;
    }
  }
  return std::nullopt;
}

OsmDocument parse_osm(std::string_view const xml) {
  auto state = osm_parse_state{};
  auto const parser = XML_ParserCreate(nullptr);
  if (parser == nullptr) {
    throw std::bad_alloc{};
  }
  state.parser = parser;
  XML_SetUserData(parser, &state);
  XML_SetElementHandler(parser, on_start, on_end);

  auto const status =
      XML_Parse(parser, xml.data(), static_cast<int>(xml.size()), XML_TRUE);
  if (status == XML_STATUS_ERROR && !state.error) {
    state.error = fmt::format("line {}: {}", XML_GetCurrentLineNumber(parser),
                              XML_ErrorString(XML_GetErrorCode(parser)));
  }
  XML_ParserFree(parser);

  if (state.error) {
    throw parse_error{"osm: " + *state.error};
  }
  return std::move(state.doc);
}

std::string write_osm(OsmDocument const& doc) {
  auto out = std::string{};
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<osm version=\"0.6\" generator=\"afrp\">\n";
  if (doc.bounds) {
    auto const& b = *doc.bounds;
    out += fmt::format(
        "  <bounds minlat=\"{:.7f}\" minlon=\"{:.7f}\" maxlat=\"{:.7f}\" "
        "maxlon=\"{:.7f}\"/>\n",
        b.min_lat, b.min_lon, b.max_lat, b.max_lon);
  }
  for (auto const& [id, n] : doc.nodes) {
    out += fmt::format("  <node id=\"{}\" lat=\"{:.7f}\" lon=\"{:.7f}\"", id,
                       n.pos.lat(), n.pos.lon());
    if (n.tags.empty()) {
      out += "/>\n";
      continue;
    }
    out += ">\n";
    write_tags(out, n.tags);
    out += "  </node>\n";
  }
  for (auto const& [id, w] : doc.ways) {
    out += fmt::format("  <way id=\"{}\">\n", id);
    for (auto const ref : w.node_refs) {
      out += fmt::format("    <nd ref=\"{}\"/>\n", ref);
    }
    write_tags(out, w.tags);
    out += "  </way>\n";
  }
  out += "</osm>\n";
  return out;
}

// --- CSV -----------------------------------------------------------------

std::vector<CsvRecord> parse_csv_records(std::string_view const csv) {
  auto records = std::vector<CsvRecord>{};
  auto line = std::size_t{1};
  auto i = std::size_t{0};

  // Skip a UTF-8 byte order mark.
  if (csv.starts_with("\xEF\xBB\xBF")) {
    i = 3;
  }

  while (i < csv.size()) {
    auto record = CsvRecord{.line = line, .fields = {}};
    auto field = std::string{};
    auto end_of_record = false;
    while (!end_of_record) {
      if (i < csv.size() && csv[i] == '"') {
        ++i;
        while (true) {
          if (i >= csv.size()) {
            throw parse_error{
                fmt::format("csv row {}: unterminated quoted field",
                            record.line)};
          }
          if (csv[i] == '"') {
            if (i + 1 < csv.size() && csv[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (csv[i] == '\n') {
            ++line;
          }
          field += csv[i++];
        }
      }
      while (i < csv.size() && csv[i] != ',' && csv[i] != '\n' &&
             csv[i] != '\r') {
        field += csv[i++];
      }
      record.fields.push_back(std::move(field));
      field.clear();
      if (i < csv.size() && csv[i] == ',') {
        ++i;
        continue;
      }
      if (i < csv.size() && csv[i] == '\r') {
        ++i;
      }
      if (i < csv.size() && csv[i] == '\n') {
        ++i;
      }
      ++line;
      end_of_record = true;
    }
    auto const blank =
        record.fields.size() == 1 && trim(record.fields.front()).empty();
    if (!blank) {
      records.push_back(std::move(record));
    }
  }
  return records;
}

std::string csv_escape(std::string_view const field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string{field};
  }
  auto out = std::string{"\""};
  for (auto const c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::vector<Amenity> parse_amenity_csv(std::string_view const csv) {
  auto const records = parse_csv_records(csv);
  if (records.empty()) {
    throw parse_error{"amenity csv: missing header"};
  }

  auto const& header = records.front();
  auto column = std::map<std::string, std::size_t, std::less<>>{};
  for (auto i = std::size_t{0}; i < header.fields.size(); ++i) {
    column[std::string{trim(header.fields[i])}] = i;
  }
  for (auto const required : {"id", "kind", "lat", "lon"}) {
    if (!column.contains(required)) {
      throw parse_error{fmt::format(
          "amenity csv: missing header column '{}' (expected "
          "id,kind,lat,lon,name)",
          required)};
    }
  }
  auto const name_col = column.contains("name")
                            ? std::optional{column.at("name")}
                            : std::nullopt;

  auto amenities = std::vector<Amenity>{};
  auto seen = std::set<std::string, std::less<>>{};
  for (auto r = std::size_t{1}; r < records.size(); ++r) {
    auto const& rec = records[r];
    auto const row = rec.line;
    auto const get = [&](std::size_t col) -> std::string_view {
      if (col >= rec.fields.size()) {
        throw parse_error{fmt::format("row {}: expected {} fields, got {}", row,
                                      header.fields.size(), rec.fields.size())};
      }
      return trim(rec.fields[col]);
    };

    auto id = std::string{get(column.at("id"))};
    if (id.empty()) {
      throw parse_error{fmt::format("row {}: empty id", row)};
    }
    auto const kind_raw = get(column.at("kind"));
    auto const kind = parse_amenity_kind(kind_raw);
    if (!kind) {
      throw parse_error{
          fmt::format("row {}: unknown kind '{}'", row, kind_raw)};
    }
    auto const lat_raw = get(column.at("lat"));
    auto const lon_raw = get(column.at("lon"));
    auto const lat = to_double(lat_raw);
    auto const lon = to_double(lon_raw);
    if (!lat) {
      throw parse_error{fmt::format("row {}: bad lat '{}'", row, lat_raw)};
    }
    if (!lon) {
      throw parse_error{fmt::format("row {}: bad lon '{}'", row, lon_raw)};
    }
    auto pos = geo::LatLon{};
    try {
      pos = geo::LatLon{*lat, *lon};
    } catch (input_error const& e) {
      throw parse_error{fmt::format("row {}: bad coordinate: {}", row, e.what())};
    }
    auto name = std::optional<std::string>{};
    if (name_col) {
      if (auto const n = get(*name_col); !n.empty()) {
        name = std::string{n};
      }
    }
    if (!seen.insert(id).second) {
      throw parse_error{fmt::format("row {}: duplicate id '{}'", row, id)};
    }
    amenities.push_back(Amenity{
        .id = std::move(id), .kind = *kind, .pos = pos, .name = std::move(name)});
  }
  return amenities;
}

std::string write_amenity_csv(std::vector<Amenity> const& amenities) {
  auto out = std::string{"id,kind,lat,lon,name\n"};
  for (auto const& a : amenities) {
    out += fmt::format("{},{},{:.7f},{:.7f},{}\n", csv_escape(a.id),
                       to_string(a.kind), a.pos.lat(), a.pos.lon(),
                       csv_escape(a.name.value_or("")));
  }
  return out;
}

// --- files ---------------------------------------------------------------

std::string read_file(std::string const& path) {
  auto ec = std::error_code{};
  if (!std::filesystem::exists(path, ec)) {
    throw io_error{fmt::format("no such file: {}", path)};
  }
  auto in = std::ifstream{path, std::ios::binary};
  if (!in) {
    throw io_error{fmt::format("cannot open {}", path)};
  }
  auto ss = std::ostringstream{};
  ss << in.rdbuf();
  if (in.bad()) {
    throw io_error{fmt::format("read failed: {}", path)};
  }
  return std::move(ss).str();
}

void write_file(std::string const& path, std::string_view const content) {
  auto out = std::ofstream{path, std::ios::binary | std::ios::trunc};
  if (!out) {
    throw io_error{fmt::format("cannot write {}", path)};
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw io_error{fmt::format("write failed: {}", path)};
  }
}

}  // namespace afrp
