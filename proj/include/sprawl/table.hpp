#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace sprawl {

enum class ColumnKind { continuous, categorical, text };

std::string_view to_string(ColumnKind kind) noexcept;

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::text;

  bool operator==(const Column&) const = default;
};

/// Explicit marker for an absent cell. Never conflated with zero.
struct Missing {
  bool operator==(const Missing&) const = default;
};

using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& cell) noexcept { return std::holds_alternative<Missing>(cell); }

/// Rectangular county x attribute table with a unique key column.
///
/// Continuous columns hold finite doubles or Missing; categorical and text
/// columns hold strings or Missing. The key column is always text and every
/// row must carry a distinct, non-missing key.
class AttributeTable {
 public:
  AttributeTable() = default;
  AttributeTable(std::vector<Column> columns, std::string key_column);

  void add_row(std::vector<Cell> cells);

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::string& key_column() const noexcept { return key_column_; }
  std::size_t key_index() const noexcept { return key_index_; }

  std::size_t column_count() const noexcept { return columns_.size(); }
  std::size_t row_count() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  std::optional<std::size_t> find_column(std::string_view name) const;
  // Throws Error{UnknownAttribute}.
  std::size_t column_index(std::string_view name) const;

  const std::vector<Cell>& row(std::size_t r) const { return rows_.at(r); }
  const Cell& at(std::size_t r, std::size_t c) const { return rows_.at(r).at(c); }
  std::optional<double> number(std::size_t r, std::size_t c) const;
  const std::string& key(std::size_t r) const;
  std::optional<std::size_t> find_row(std::string_view key) const;

  bool operator==(const AttributeTable& other) const {
    return columns_ == other.columns_ && key_column_ == other.key_column_ && rows_ == other.rows_;
  }

 private:
  std::vector<Column> columns_;
  std::string key_column_;
  std::size_t key_index_ = 0;
  std::vector<std::vector<Cell>> rows_;
  std::unordered_map<std::string, std::size_t> key_rows_;
};

/// Appends `extra`'s rows to `base`. Columns must match by name and kind.
/// Keys of appended rows get `key_suffix` so stacked years stay unique.
AttributeTable stack_tables(const AttributeTable& base, const AttributeTable& extra,
                            std::string_view key_suffix);

/// Names of continuous columns, excluding the key and the given exclusions.
std::vector<std::string> continuous_columns(const AttributeTable& table,
                                            const std::vector<std::string>& exclude = {});

}  // namespace sprawl
