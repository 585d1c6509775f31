#include "sprawl/table.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "sprawl/error.hpp"

namespace sprawl {

std::string_view to_string(ColumnKind kind) noexcept {
  switch (kind) {
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::text: return "text";
  }
  return "text";
}

AttributeTable::AttributeTable(std::vector<Column> columns, std::string key_column)
    : columns_(std::move(columns)), key_column_(std::move(key_column)) {
  std::unordered_set<std::string> seen;
  for (const auto& col : columns_) {
    if (!seen.insert(col.name).second) {
      throw Error(ErrorCode::InvalidParameter, "duplicate column name '" + col.name + "'");
    }
  }
  auto it = std::find_if(columns_.begin(), columns_.end(),
                         [&](const Column& c) { return c.name == key_column_; });
  if (it == columns_.end()) {
    throw Error(ErrorCode::MissingKeyColumn, "key column '" + key_column_ + "' not in table");
  }
  key_index_ = static_cast<std::size_t>(it - columns_.begin());
  it->kind = ColumnKind::text;
}

void AttributeTable::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size()) {
    throw Error(ErrorCode::RaggedRow, "row has " + std::to_string(cells.size()) + " cells, expected " +
                                          std::to_string(columns_.size()));
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    if (is_missing(cell)) continue;
    if (columns_[c].kind == ColumnKind::continuous) {
      const double* v = std::get_if<double>(&cell);
      if (v == nullptr || !std::isfinite(*v)) {
        throw Error(ErrorCode::InvalidParameter,
                    "column '" + columns_[c].name + "' requires finite numbers");
      }
    } else if (!std::holds_alternative<std::string>(cell)) {
      throw Error(ErrorCode::InvalidParameter, "column '" + columns_[c].name + "' requires text");
    }
  }
  const auto* key = std::get_if<std::string>(&cells[key_index_]);
  if (key == nullptr) {
    throw Error(ErrorCode::MissingKeyColumn, "row without a key value");
  }
  if (!key_rows_.emplace(*key, rows_.size()).second) {
    throw Error(ErrorCode::DuplicateKey, "key '" + *key + "' appears more than once");
  }
  rows_.push_back(std::move(cells));
}

std::optional<std::size_t> AttributeTable::find_column(std::string_view name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].name == name) return c;
  }
  return std::nullopt;
}

std::size_t AttributeTable::column_index(std::string_view name) const {
  if (auto c = find_column(name)) return *c;
  throw Error(ErrorCode::UnknownAttribute, "no column named '" + std::string(name) + "'");
}

std::optional<double> AttributeTable::number(std::size_t r, std::size_t c) const {
  if (const double* v = std::get_if<double>(&at(r, c))) return *v;
  return std::nullopt;
}

const std::string& AttributeTable::key(std::size_t r) const {
  return std::get<std::string>(at(r, key_index_));
}

std::optional<std::size_t> AttributeTable::find_row(std::string_view key) const {
  auto it = key_rows_.find(std::string(key));
  if (it == key_rows_.end()) return std::nullopt;
  return it->second;
}

AttributeTable stack_tables(const AttributeTable& base, const AttributeTable& extra,
                            std::string_view key_suffix) {
  if (base.key_column() != extra.key_column()) {
    throw Error(ErrorCode::SchemeTableMismatch, "tables use different key columns");
  }
  std::vector<Column> columns = base.columns();
  std::vector<std::size_t> mapping(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    auto idx = extra.find_column(columns[c].name);
    if (!idx) {
      throw Error(ErrorCode::SchemeTableMismatch, "column '" + columns[c].name + "' missing");
    }
    const auto other_kind = extra.columns()[*idx].kind;
    if (other_kind != columns[c].kind) {
      throw Error(ErrorCode::SchemeTableMismatch, "column '" + columns[c].name + "' changes kind");
    }
    mapping[c] = *idx;
  }
  if (extra.column_count() != columns.size()) {
    throw Error(ErrorCode::SchemeTableMismatch, "tables have different column counts");
  }
  AttributeTable out(columns, base.key_column());
  for (std::size_t r = 0; r < base.row_count(); ++r) out.add_row(base.row(r));
  for (std::size_t r = 0; r < extra.row_count(); ++r) {
    std::vector<Cell> cells(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) cells[c] = extra.at(r, mapping[c]);
    cells[out.key_index()] = extra.key(r) + std::string(key_suffix);
    out.add_row(std::move(cells));
  }
  return out;
}

std::vector<std::string> continuous_columns(const AttributeTable& table,
                                            const std::vector<std::string>& exclude) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    const auto& col = table.columns()[c];
    if (c == table.key_index() || col.kind != ColumnKind::continuous) continue;
    if (std::find(exclude.begin(), exclude.end(), col.name) != exclude.end()) continue;
    names.push_back(col.name);
  }
  return names;
}

}  // namespace sprawl
