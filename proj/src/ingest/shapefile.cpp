#include "sprawl/ingest/shapefile.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "sprawl/error.hpp"

namespace sprawl::ingest {
namespace {

class ByteCursor {
 public:
  explicit ByteCursor(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t size() const noexcept { return bytes_.size(); }

  void require(std::size_t offset, std::size_t len, const char* what) const {
    if (offset > bytes_.size() || len > bytes_.size() - offset) {
      throw Error(ErrorCode::Truncated, std::string(what) + " needs " + std::to_string(len) +
                                            " bytes at offset " + std::to_string(offset) +
                                            ", file has " + std::to_string(bytes_.size()));
    }
  }

  std::uint32_t u32_be(std::size_t offset) const {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | std::to_integer<std::uint32_t>(bytes_[offset + i]);
    return v;
  }

  std::uint32_t u32_le(std::size_t offset) const {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint32_t>(bytes_[offset + i]);
    return v;
  }

  std::int32_t i32_be(std::size_t offset) const { return static_cast<std::int32_t>(u32_be(offset)); }
  std::int32_t i32_le(std::size_t offset) const { return static_cast<std::int32_t>(u32_le(offset)); }

  double f64_le(std::size_t offset) const {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint64_t>(bytes_[offset + i]);
    return std::bit_cast<double>(v);
  }

 private:
  std::span<const std::byte> bytes_;
};

CountyGeometry decode_polygon(const ByteCursor& in, std::size_t offset, std::size_t length,
                              std::int32_t record_id) {
  // type(4) bbox(32) num_parts(4) num_points(4)
  constexpr std::size_t fixed = 44;
  if (length < fixed) {
    throw Error(ErrorCode::Truncated, "polygon record " + std::to_string(record_id) + " too short");
  }
  CountyGeometry geom;
  geom.record_id = record_id;
  geom.bbox = {in.f64_le(offset + 4), in.f64_le(offset + 12), in.f64_le(offset + 20),
               in.f64_le(offset + 28)};
  const std::int32_t num_parts = in.i32_le(offset + 36);
  const std::int32_t num_points = in.i32_le(offset + 40);
  if (num_parts < 0 || num_points < 0) {
    throw Error(ErrorCode::HeaderMismatch, "negative part/point count in record " +
                                               std::to_string(record_id));
  }
  const std::size_t parts_bytes = static_cast<std::size_t>(num_parts) * 4;
  const std::size_t points_bytes = static_cast<std::size_t>(num_points) * 16;
  if (fixed + parts_bytes + points_bytes > length) {
    throw Error(ErrorCode::Truncated, "polygon record " + std::to_string(record_id) +
                                          " declares more points than its content length");
  }
  std::vector<std::int32_t> starts(static_cast<std::size_t>(num_parts));
  for (std::size_t p = 0; p < starts.size(); ++p) {
    starts[p] = in.i32_le(offset + fixed + 4 * p);
    if (starts[p] < 0 || starts[p] >= num_points || (p > 0 && starts[p] <= starts[p - 1])) {
      throw Error(ErrorCode::HeaderMismatch, "bad part index in record " + std::to_string(record_id));
    }
  }
  const std::size_t points_at = offset + fixed + parts_bytes;
  for (std::size_t p = 0; p < starts.size(); ++p) {
    const auto begin = static_cast<std::size_t>(starts[p]);
    const auto end = p + 1 < starts.size() ? static_cast<std::size_t>(starts[p + 1])
                                           : static_cast<std::size_t>(num_points);
    Ring ring;
    ring.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      const LonLat pt{in.f64_le(points_at + 16 * i), in.f64_le(points_at + 16 * i + 8)};
      if (!std::isfinite(pt.lon) || !std::isfinite(pt.lat)) {
        throw Error(ErrorCode::HeaderMismatch,
                    "non-finite coordinate in record " + std::to_string(record_id));
      }
      if (pt.lon < geom.bbox.min_lon || pt.lon > geom.bbox.max_lon || pt.lat < geom.bbox.min_lat ||
          pt.lat > geom.bbox.max_lat) {
        throw Error(ErrorCode::HeaderMismatch,
                    "point outside record bbox in record " + std::to_string(record_id));
      }
      ring.push_back(pt);
    }
    if (ring.size() < 4 || ring.front() != ring.back()) {
      throw Error(ErrorCode::HeaderMismatch,
                  "ring " + std::to_string(p) + " of record " + std::to_string(record_id) +
                      " is not a closed ring of at least 4 points");
    }
    geom.rings.push_back(std::move(ring));
  }
  return geom;
}

}  // namespace

std::vector<CountyGeometry> parse_shapefile(std::span<const std::byte> shp_bytes) {
  const ByteCursor in(shp_bytes);
  in.require(0, 4, "file code");
  if (in.i32_be(0) != kShapefileCode) {
    throw Error(ErrorCode::BadMagic, "file code " + std::to_string(in.i32_be(0)) + ", expected 9994");
  }
  in.require(0, kShapefileHeaderSize, "main file header");
  const auto version = in.i32_le(28);
  if (version != kShapefileVersion) {
    throw Error(ErrorCode::BadMagic, "version " + std::to_string(version) + ", expected 1000");
  }
  const auto file_shape = in.i32_le(32);
  if (file_shape != static_cast<std::int32_t>(ShapeType::polygon) &&
      file_shape != static_cast<std::int32_t>(ShapeType::null_shape)) {
    throw Error(ErrorCode::UnsupportedShapeType, "file shape type " + std::to_string(file_shape));
  }
  // File length is in 16-bit words.
  const std::size_t declared = static_cast<std::size_t>(in.u32_be(24)) * 2;
  in.require(0, declared, "declared file length");

  std::vector<CountyGeometry> out;
  std::size_t offset = kShapefileHeaderSize;
  while (offset < declared) {
    in.require(offset, 8, "record header");
    const std::int32_t record_id = in.i32_be(offset);
    const std::size_t content_len = static_cast<std::size_t>(in.u32_be(offset + 4)) * 2;
    const std::size_t content_at = offset + 8;
    in.require(content_at, content_len, "record content");
    if (content_at + content_len > declared) {
      throw Error(ErrorCode::Truncated, "record " + std::to_string(record_id) +
                                            " extends past declared file length");
    }
    in.require(content_at, 4, "record shape type");
    const std::int32_t shape = in.i32_le(content_at);
    if (shape == static_cast<std::int32_t>(ShapeType::polygon)) {
      out.push_back(decode_polygon(in, content_at, content_len, record_id));
    } else if (shape != static_cast<std::int32_t>(ShapeType::null_shape)) {
      throw Error(ErrorCode::UnsupportedShapeType,
                  "record " + std::to_string(record_id) + " has shape type " + std::to_string(shape));
    }
    offset = content_at + content_len;
  }
  return out;
}

double signed_area(const Ring& ring) noexcept {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
  }
  return twice / 2.0;
}

}  // namespace sprawl::ingest
