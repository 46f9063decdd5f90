#include "afrp/elevation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "fmt/core.h"

#include "afrp/error.hpp"

namespace afrp::elevation {

namespace {

constexpr std::array<std::string_view, 6> kHeaderKeys{
    "ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value"};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(begin(a), end(a), begin(b), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  double v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  auto out = std::vector<std::string_view>{};
  auto i = std::size_t{0};
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    auto const b = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    if (i > b) {
      out.push_back(line.substr(b, i - b));
    }
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  auto lines = std::vector<std::string_view>{};
  while (!text.empty()) {
    auto const nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (line.ends_with('\r')) {
      line.remove_suffix(1);
    }
    lines.push_back(line);
    if (nl == std::string_view::npos) {
      break;
    }
    text.remove_prefix(nl + 1);
  }
  // Trailing blank lines carry no data.
  while (!lines.empty() && split_ws(lines.back()).empty()) {
    lines.pop_back();
  }
  return lines;
}

}  // namespace

geo::LatLon ElevationRaster::cell_center(std::size_t const row,
                                         std::size_t const col) const {
  return {yll + (static_cast<double>(nrows - row) - 0.5) * cellsize,
          xll + (static_cast<double>(col) + 0.5) * cellsize};
}

ElevationRaster load_ascii_grid(std::string_view const text) {
  auto const lines = split_lines(text);
  auto header = std::array<double, kHeaderKeys.size()>{};
  for (auto i = std::size_t{0}; i < kHeaderKeys.size(); ++i) {
    auto const key = kHeaderKeys[i];
    auto const tokens = i < lines.size() ? split_ws(lines[i])
                                         : std::vector<std::string_view>{};
    if (tokens.empty() || !iequals(tokens[0], key)) {
      throw parse_error{fmt::format(
          "ascii grid line {}: missing header key '{}'{}", i + 1, key,
          tokens.empty() ? std::string{}
                         : fmt::format(" (found '{}')", tokens[0]))};
    }
    auto const v = tokens.size() == 2 ? to_double(tokens[1]) : std::nullopt;
    if (!v) {
      throw parse_error{fmt::format(
          "ascii grid line {}: header '{}' needs one numeric value", i + 1, key)};
    }
    header[i] = *v;
  }

  auto const dim = [&](std::size_t i) {
    auto const v = header[i];
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e8) {
      throw parse_error{fmt::format(
          "ascii grid: {} must be a positive integer, got {}", kHeaderKeys[i], v)};
    }
    return static_cast<std::size_t>(v);
  };

  auto r = ElevationRaster{};
  r.ncols = dim(0);
  r.nrows = dim(1);
  r.xll = header[2];
  r.yll = header[3];
  r.cellsize = header[4];
  r.nodata = header[5];
  if (!(r.cellsize > 0.0) || !std::isfinite(r.cellsize)) {
    throw parse_error{
        fmt::format("ascii grid: cellsize must be > 0, got {}", r.cellsize)};
  }

  auto const data_lines = lines.size() - kHeaderKeys.size();
  if (data_lines != r.nrows) {
    throw parse_error{fmt::format("ascii grid: expected {} rows, got {}",
                                  r.nrows, data_lines)};
  }
  r.values.reserve(r.ncols * r.nrows);
  for (auto row = std::size_t{0}; row < r.nrows; ++row) {
    auto const tokens = split_ws(lines[kHeaderKeys.size() + row]);
    if (tokens.size() != r.ncols) {
      throw parse_error{fmt::format("row {}: expected {} values, got {}",
                                    row + 1, r.ncols, tokens.size())};
    }
    for (auto col = std::size_t{0}; col < r.ncols; ++col) {
      auto const v = to_double(tokens[col]);
      if (!v) {
        throw parse_error{fmt::format("row {}, col {}: non-numeric cell '{}'",
                                      row + 1, col + 1, tokens[col])};
      }
      r.values.push_back(*v);
    }
  }
  return r;
}

std::optional<double> sample(ElevationRaster const& r, geo::LatLon const& p) {
  // Fractional position in cell-center units; gy counts rows from the south.
  auto const gx = (p.lon() - r.xll) / r.cellsize - 0.5;
  auto const gy = (p.lat() - r.yll) / r.cellsize - 0.5;
  auto const max_x = static_cast<double>(r.ncols - 1);
  auto const max_y = static_cast<double>(r.nrows - 1);
  if (!(gx >= 0.0 && gx <= max_x && gy >= 0.0 && gy <= max_y)) {
    return std::nullopt;
  }

  auto const x0 = std::min(static_cast<std::size_t>(gx),
                           r.ncols > 1 ? r.ncols - 2 : std::size_t{0});
  auto const y0 = std::min(static_cast<std::size_t>(gy),
                           r.nrows > 1 ? r.nrows - 2 : std::size_t{0});
  auto const tx = gx - static_cast<double>(x0);
  auto const ty = gy - static_cast<double>(y0);
  auto const x1 = std::min(x0 + 1, r.ncols - 1);
  auto const y1 = std::min(y0 + 1, r.nrows - 1);

  auto const row_of = [&](std::size_t south_index) {
    return r.nrows - 1 - south_index;
  };

  struct contribution {
    std::size_t row, col;
    double weight;
  };
  auto const cells = std::array<contribution, 4>{{
      {row_of(y0), x0, (1.0 - tx) * (1.0 - ty)},
      {row_of(y0), x1, tx * (1.0 - ty)},
      {row_of(y1), x0, (1.0 - tx) * ty},
      {row_of(y1), x1, tx * ty},
  }};

  auto value = 0.0;
  for (auto const& c : cells) {
    if (c.weight == 0.0) {
      continue;
    }
    auto const v = r.at(c.row, c.col);
    if (v == r.nodata || !std::isfinite(v)) {
      return std::nullopt;
    }
    value += c.weight * v;
  }
  return value;
}

NodeElevations assign_elevations(OsmDocument const& doc,
                                 ElevationRaster const& raster) {
  auto out = NodeElevations{};
  for (auto const& [id, node] : doc.nodes) {
    if (auto const h = sample(raster, node.pos)) {
      out.meters.emplace(id, *h);
    } else {
      ++out.miss_count;
    }
  }
  return out;
}

}  // namespace afrp::elevation
