#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sprawl::ingest {

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;

  bool operator==(const LonLat&) const = default;
};

using Ring = std::vector<LonLat>;

struct BoundingBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool operator==(const BoundingBox&) const = default;
};

struct CountyGeometry {
  std::int32_t record_id = 0;
  std::string key;
  std::string name;
  std::vector<Ring> rings;
  BoundingBox bbox;

  bool operator==(const CountyGeometry&) const = default;
};

inline constexpr std::int32_t kShapefileCode = 9994;
inline constexpr std::int32_t kShapefileVersion = 1000;
inline constexpr std::size_t kShapefileHeaderSize = 100;

enum class ShapeType : std::int32_t { null_shape = 0, polygon = 5 };

/// Decodes a .shp main file holding Polygon (type 5) records.
///
/// Header fields before offset 28 are big-endian, the rest little-endian.
/// Null-shape records are skipped. Keys and names are left empty; attach them
/// from the companion DBF with `attach_attributes`.
std::vector<CountyGeometry> parse_shapefile(std::span<const std::byte> shp_bytes);

/// Signed ring area in degree units (shoelace). Negative means clockwise.
double signed_area(const Ring& ring) noexcept;

}  // namespace sprawl::ingest
