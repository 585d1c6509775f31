#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "sprawl/table.hpp"

namespace sprawl::ingest {

/// Decodes a dBASE III/IV table.
///
/// N and F fields become continuous columns (blank cells are Missing); C, D
/// and L fields become text. Records flagged deleted (0x2A) are skipped. The
/// key column defaults to the first field when `key_column` is empty.
AttributeTable parse_dbf(std::span<const std::byte> dbf_bytes, const std::string& key_column = {});

}  // namespace sprawl::ingest
