#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "afrp/geo.hpp"
#include "afrp/osm_io.hpp"

namespace afrp::elevation {

// ESRI ASCII grid. Values are cell-center samples, row 0 northernmost.
struct ElevationRaster {
  std::size_t ncols{0};
  std::size_t nrows{0};
  double xll{0.0};  // west edge, degrees
  double yll{0.0};  // south edge, degrees
  double cellsize{0.0};
  double nodata{-9999.0};
  std::vector<double> values;  // row-major, nrows * ncols

  double at(std::size_t row, std::size_t col) const {
    return values[row * ncols + col];
  }
  geo::LatLon cell_center(std::size_t row, std::size_t col) const;
};

// Header lines `ncols nrows xllcorner yllcorner cellsize NODATA_value` in
// that order (keys case-insensitive), then nrows lines of ncols numbers.
// LF or CRLF.
ElevationRaster load_ascii_grid(std::string_view text);

// Bilinear interpolation between the four surrounding cell centers. Returns
// nullopt outside the hull of cell centers or when any cell with nonzero
// weight holds nodata.
std::optional<double> sample(ElevationRaster const&, geo::LatLon const& p);

struct NodeElevations {
  std::map<osm_id_t, double> meters;
  std::size_t miss_count{0};
};

NodeElevations assign_elevations(OsmDocument const&, ElevationRaster const&);

}  // namespace afrp::elevation
