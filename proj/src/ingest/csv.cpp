#include "sprawl/ingest/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "sprawl/error.hpp"

namespace sprawl::ingest {
namespace {

bool is_missing_token(std::string_view s) { return s.empty() || s == "NA" || s == "?"; }

std::string_view trim_spaces(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim_spaces(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line yields one empty field; drop it.
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started) {
          in_quotes = true;
          field_started = true;
        } else {
          field += ch;
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += ch;
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::Truncated, "unterminated quoted CSV field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

AttributeTable parse_csv(std::string_view csv_text, const std::string& key_column,
                         const std::optional<std::string>& target_column) {
  if (csv_text.starts_with("\xEF\xBB\xBF")) csv_text.remove_prefix(3);
  auto records = split_csv(csv_text);
  if (records.empty()) throw Error(ErrorCode::MissingKeyColumn, "CSV has no header line");

  const auto& header = records.front();
  const std::size_t width = header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(r + 1) + " has " +
                                            std::to_string(records[r].size()) + " cells, header has " +
                                            std::to_string(width));
    }
  }

  std::vector<Column> columns(width);
  std::optional<std::size_t> key_at;
  for (std::size_t c = 0; c < width; ++c) {
    columns[c].name = std::string(trim_spaces(header[c]));
    if (columns[c].name == key_column) key_at = c;
  }
  if (!key_at) throw Error(ErrorCode::MissingKeyColumn, "no column named '" + key_column + "'");
  if (target_column && std::none_of(columns.begin(), columns.end(), [&](const Column& col) {
        return col.name == *target_column;
      })) {
    throw Error(ErrorCode::UnknownAttribute, "no target column named '" + *target_column + "'");
  }

  for (std::size_t c = 0; c < width; ++c) {
    if (c == *key_at) {
      columns[c].kind = ColumnKind::text;
    } else if (target_column && columns[c].name == *target_column) {
      columns[c].kind = ColumnKind::categorical;
    } else {
      bool numeric = true;
      for (std::size_t r = 1; r < records.size() && numeric; ++r) {
        const auto cell = trim_spaces(records[r][c]);
        if (!is_missing_token(cell) && !parse_number(cell)) numeric = false;
      }
      columns[c].kind = numeric ? ColumnKind::continuous : ColumnKind::text;
    }
  }

  AttributeTable table(columns, key_column);
  for (std::size_t r = 1; r < records.size(); ++r) {
    std::vector<Cell> cells(width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto raw = trim_spaces(records[r][c]);
      if (c == *key_at) {
        cells[c] = std::string(raw);
      } else if (is_missing_token(raw)) {
        cells[c] = Missing{};
      } else if (columns[c].kind == ColumnKind::continuous) {
        cells[c] = *parse_number(raw);
      } else {
        cells[c] = std::string(raw);
      }
    }
    table.add_row(std::move(cells));
  }
  return table;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string write_csv(const AttributeTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.column_count(); ++c) {
    if (c) out += ',';
    out += quote_if_needed(table.columns()[c].name);
  }
  out += '\n';
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < table.column_count(); ++c) {
      if (c) out += ',';
      const auto& cell = table.at(r, c);
      if (const double* v = std::get_if<double>(&cell)) {
        out += format_number(*v);
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        out += quote_if_needed(*s);
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace sprawl::ingest
