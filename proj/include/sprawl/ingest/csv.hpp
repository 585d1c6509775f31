#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sprawl/table.hpp"

namespace sprawl::ingest {

/// Splits RFC-4180 style text into records. Quoted fields may contain commas,
/// doubled quotes and line breaks. A trailing empty line is ignored.
std::vector<std::vector<std::string>> split_csv(std::string_view text);

/// Parses a header-first CSV into a table.
///
/// Columns whose non-missing cells all parse as finite numbers become
/// continuous. Empty cells, "NA" and "?" are Missing. The key column is kept
/// as text and the target column, when named, becomes categorical.
AttributeTable parse_csv(std::string_view csv_text, const std::string& key_column,
                         const std::optional<std::string>& target_column = std::nullopt);

/// Serialises a table back to CSV. Numbers use the shortest representation
/// that reads back to the same double.
std::string write_csv(const AttributeTable& table);

std::string format_number(double value);

}  // namespace sprawl::ingest
