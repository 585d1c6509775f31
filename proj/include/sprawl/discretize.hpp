#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sprawl/table.hpp"

namespace sprawl::binning {

enum class Strategy { equal_frequency, equal_width, explicit_cuts };

std::string_view to_string(Strategy strategy) noexcept;
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;

// Range numbering starts here, so three bins are Range2, Range3, Range4.
inline constexpr int kFirstRange = 2;

inline constexpr std::string_view kTargetAttribute = "Target";
inline constexpr std::string_view kSprawlToken = "Target_Sprawl";
inline constexpr std::string_view kNoSprawlToken = "Target_NoSprawl";

std::string range_token(std::string_view attribute, int range);

struct TokenParts {
  std::string attribute;
  // 0 for target tokens.
  int range = 0;

  bool operator==(const TokenParts&) const = default;
};

/// Splits "Attr_RangeK" (or a target token) back into attribute and K.
std::optional<TokenParts> parse_token(std::string_view token);

/// Bins of one attribute. Intervals are (lo, hi]; the lowest bin is closed
/// below, so a value equal to a cut belongs to the lower bin.
struct AttributeBins {
  std::string attribute;
  Strategy strategy = Strategy::equal_frequency;
  std::vector<double> cuts;
  std::vector<std::string> labels;

  std::size_t bin_count() const noexcept { return cuts.size() + 1; }
  std::size_t bin_of(double value) const noexcept;
  const std::string& label_of(double value) const { return labels[bin_of(value)]; }
  int range_of(double value) const noexcept { return static_cast<int>(bin_of(value)) + kFirstRange; }

  bool operator==(const AttributeBins&) const = default;
};

class BinningScheme {
 public:
  BinningScheme() = default;
  explicit BinningScheme(std::vector<AttributeBins> entries);

  const std::vector<AttributeBins>& entries() const noexcept { return entries_; }
  const AttributeBins* find(std::string_view attribute) const noexcept;
  // Throws Error{UnknownAttribute}.
  const AttributeBins& at(std::string_view attribute) const;
  bool empty() const noexcept { return entries_.empty(); }

  bool operator==(const BinningScheme&) const = default;

 private:
  std::vector<AttributeBins> entries_;
};

/// Builds labels for `cuts`, validating them (finite, strictly increasing).
AttributeBins make_bins(std::string attribute, Strategy strategy, std::vector<double> cuts);

/// Fits bins per attribute. Missing cells are ignored. Attributes named in
/// `explicit_cuts` use those cuts regardless of `strategy`. Degenerate
/// columns and columns with too few distinct values get fewer bins and a
/// message appended to `warnings`.
BinningScheme fit_binning(const AttributeTable& table, const std::vector<std::string>& attributes,
                          std::size_t bins_per_attribute, Strategy strategy,
                          const std::map<std::string, std::vector<double>>& explicit_cuts = {},
                          std::vector<std::string>* warnings = nullptr);

/// Transactions over range tokens, one per table row.
struct TokenizedDataset {
  std::vector<std::vector<std::string>> transactions;  // each sorted, duplicate-free
  std::vector<std::string> vocabulary;                  // sorted
  std::vector<std::string> keys;                        // row key per transaction
};

TokenizedDataset tokenize(const AttributeTable& table, const BinningScheme& scheme,
                          const std::string& target_column);

/// Reads whitespace-separated basket lines, one transaction per line.
TokenizedDataset parse_transactions(std::string_view text);

void to_json(nlohmann::json& j, const BinningScheme& scheme);
void from_json(const nlohmann::json& j, BinningScheme& scheme);

}  // namespace sprawl::binning
