#include "sprawl/ingest/join.hpp"

#include <unordered_set>
#include <vector>

#include "sprawl/error.hpp"
#include "sprawl/ingest/csv.hpp"

namespace sprawl::ingest {
namespace {

std::size_t key_column_of(const AttributeTable& table, const std::string& key, const char* side) {
  auto idx = table.find_column(key);
  if (!idx) {
    throw Error(ErrorCode::MissingKeyColumn, std::string(side) + " table has no column '" + key + "'");
  }
  return *idx;
}

// Key text per row; duplicate keys are an error even when `key` is not the
// table's own key column.
std::vector<std::string> unique_keys(const AttributeTable& table, std::size_t col, const char* side) {
  std::vector<std::string> keys;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto& cell = table.at(r, col);
    std::string text;
    if (const auto* s = std::get_if<std::string>(&cell)) {
      text = *s;
    } else if (const double* v = std::get_if<double>(&cell)) {
      text = format_number(*v);
    } else {
      throw Error(ErrorCode::MissingKeyColumn, std::string(side) + " row " + std::to_string(r) +
                                                   " has no key value");
    }
    if (!seen.insert(text).second) {
      throw Error(ErrorCode::DuplicateKey, std::string(side) + " table repeats key '" + text + "'");
    }
    keys.push_back(std::move(text));
  }
  return keys;
}

}  // namespace

JoinResult join_tables(const AttributeTable& left, const AttributeTable& right, const std::string& key) {
  const std::size_t lk = key_column_of(left, key, "left");
  const std::size_t rk = key_column_of(right, key, "right");
  const auto left_keys = unique_keys(left, lk, "left");
  const auto right_keys = unique_keys(right, rk, "right");

  std::vector<Column> columns = left.columns();
  std::vector<std::size_t> right_cols;
  for (std::size_t c = 0; c < right.column_count(); ++c) {
    if (c == rk) continue;
    Column col = right.columns()[c];
    if (left.find_column(col.name)) col.name += "_right";
    columns.push_back(col);
    right_cols.push_back(c);
  }

  std::unordered_map<std::string, std::size_t> right_rows;
  for (std::size_t r = 0; r < right_keys.size(); ++r) right_rows.emplace(right_keys[r], r);

  // The output is keyed by the join column.
  AttributeTable out(columns, key);
  std::size_t matched = 0;
  for (std::size_t r = 0; r < left.row_count(); ++r) {
    auto it = right_rows.find(left_keys[r]);
    if (it == right_rows.end()) continue;
    std::vector<Cell> cells = left.row(r);
    cells[lk] = left_keys[r];
    for (std::size_t c : right_cols) cells.push_back(right.at(it->second, c));
    out.add_row(std::move(cells));
    ++matched;
  }
  return {std::move(out), left.row_count() - matched, right.row_count() - matched};
}

}  // namespace sprawl::ingest
