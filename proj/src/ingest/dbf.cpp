#include "sprawl/ingest/dbf.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sprawl/error.hpp"

namespace sprawl::ingest {
namespace {

using namespace std::string_view_literals;

constexpr std::size_t kPrefixSize = 32;
constexpr std::size_t kDescriptorSize = 32;
constexpr std::byte kTerminator{0x0D};
constexpr std::byte kDeleted{0x2A};

struct FieldDescriptor {
  std::string name;
  char type = 'C';
  std::size_t length = 0;
};

std::uint32_t u32_le(std::span<const std::byte> b, std::size_t at) {
  return std::to_integer<std::uint32_t>(b[at]) | std::to_integer<std::uint32_t>(b[at + 1]) << 8 |
         std::to_integer<std::uint32_t>(b[at + 2]) << 16 |
         std::to_integer<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t u16_le(std::span<const std::byte> b, std::size_t at) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(b[at]) |
                                    std::to_integer<unsigned>(b[at + 1]) << 8);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\0"sv);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\0"sv);
  return s.substr(first, last - first + 1);
}

Cell decode_number(std::string_view raw) {
  const auto text = trim(raw);
  if (text.empty()) return Missing{};
  double value = 0.0;
  const auto* begin = text.data();
  // from_chars rejects a leading '+'.
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    // Overflow markers such as "*****" are how dBASE writers spell unknown.
    return Missing{};
  }
  return value;
}

}  // namespace

AttributeTable parse_dbf(std::span<const std::byte> bytes, const std::string& key_column) {
  if (bytes.size() < kPrefixSize) {
    throw Error(ErrorCode::Truncated, "dbf header needs 32 bytes, got " + std::to_string(bytes.size()));
  }
  const std::size_t record_count = u32_le(bytes, 4);
  const std::size_t header_len = u16_le(bytes, 8);
  const std::size_t record_len = u16_le(bytes, 10);

  std::vector<FieldDescriptor> fields;
  std::size_t at = kPrefixSize;
  while (true) {
    if (at >= bytes.size()) throw Error(ErrorCode::Truncated, "field descriptors not terminated");
    if (bytes[at] == kTerminator) break;
    if (at + kDescriptorSize > bytes.size()) {
      throw Error(ErrorCode::Truncated, "field descriptor cut short");
    }
    FieldDescriptor f;
    const auto* raw = reinterpret_cast<const char*>(bytes.data() + at);
    f.name = std::string(trim(std::string_view(raw, 11)));
    f.type = raw[11];
    f.length = std::to_integer<std::size_t>(bytes[at + 16]);
    switch (f.type) {
      case 'C': case 'N': case 'F': case 'D': case 'L': break;
      default:
        throw Error(ErrorCode::BadFieldType,
                    "field '" + f.name + "' has type '" + std::string(1, f.type) + "'");
    }
    fields.push_back(std::move(f));
    at += kDescriptorSize;
  }
  if (fields.empty()) throw Error(ErrorCode::HeaderMismatch, "dbf declares no fields");

  std::size_t field_total = 1;  // deletion flag
  for (const auto& f : fields) field_total += f.length;
  if (field_total != record_len) {
    throw Error(ErrorCode::HeaderMismatch, "record length " + std::to_string(record_len) +
                                               " but fields need " + std::to_string(field_total));
  }
  if (header_len < at + 1) {
    throw Error(ErrorCode::HeaderMismatch, "header length " + std::to_string(header_len) +
                                               " shorter than descriptor block");
  }
  if (header_len + record_count * record_len > bytes.size()) {
    throw Error(ErrorCode::Truncated, std::to_string(record_count) + " records of " +
                                          std::to_string(record_len) + " bytes exceed file size");
  }

  std::vector<Column> columns;
  for (const auto& f : fields) {
    columns.push_back({f.name, (f.type == 'N' || f.type == 'F') ? ColumnKind::continuous
                                                                 : ColumnKind::text});
  }
  AttributeTable table(columns, key_column.empty() ? fields.front().name : key_column);

  for (std::size_t r = 0; r < record_count; ++r) {
    const std::size_t rec = header_len + r * record_len;
    if (bytes[rec] == kDeleted) continue;
    std::vector<Cell> cells;
    cells.reserve(fields.size());
    std::size_t pos = rec + 1;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string_view raw(reinterpret_cast<const char*>(bytes.data() + pos), fields[c].length);
      pos += fields[c].length;
      if (c == table.key_index()) {
        cells.emplace_back(std::string(trim(raw)));
      } else if (table.columns()[c].kind == ColumnKind::continuous) {
        cells.push_back(decode_number(raw));
      } else {
        const auto text = trim(raw);
        if (text.empty()) {
          cells.emplace_back(Missing{});
        } else {
          cells.emplace_back(std::string(text));
        }
      }
    }
    table.add_row(std::move(cells));
  }
  return table;
}

}  // namespace sprawl::ingest
