#pragma once

#include <cstddef>
#include <string>

#include "sprawl/table.hpp"

namespace sprawl::ingest {

struct JoinResult {
  AttributeTable table;
  // Rows from either side that found no partner.
  std::size_t unmatched_left = 0;
  std::size_t unmatched_right = 0;

  std::size_t unmatched() const noexcept { return unmatched_left + unmatched_right; }
};

/// Inner join on equal key text. Result columns are the left columns followed
/// by the right columns minus the right key; right names that collide with a
/// left name get a "_right" suffix. Row order follows the left table.
JoinResult join_tables(const AttributeTable& left, const AttributeTable& right, const std::string& key);

}  // namespace sprawl::ingest
