#include "sprawl/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sprawl/error.hpp"
#include "sprawl/label.hpp"

namespace sprawl::binning {
namespace {

constexpr std::string_view kRangeMarker = "_Range";

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings) warnings->push_back(std::move(message));
}

// Cut positions k (cut between sorted[k-1] and sorted[k]) nearest to the
// ideal order statistics, restricted to boundaries between distinct values.
std::vector<double> equal_frequency_cuts(const std::vector<double>& sorted, std::size_t bins) {
  const std::size_t n = sorted.size();
  std::vector<std::size_t> boundaries;
  for (std::size_t k = 1; k < n; ++k) {
    if (sorted[k - 1] < sorted[k]) boundaries.push_back(k);
  }
  std::vector<double> cuts;
  std::size_t next = 0;  // first boundary index still available
  for (std::size_t j = 1; j < bins && next < boundaries.size(); ++j) {
    const double ideal = static_cast<double>(j * n) / static_cast<double>(bins);
    std::size_t best = next;
    for (std::size_t b = next; b < boundaries.size(); ++b) {
      const double dist = std::abs(static_cast<double>(boundaries[b]) - ideal);
      const double best_dist = std::abs(static_cast<double>(boundaries[best]) - ideal);
      if (dist < best_dist) best = b;
      if (static_cast<double>(boundaries[b]) > ideal) break;
    }
    const std::size_t k = boundaries[best];
    const double lo = sorted[k - 1];
    const double hi = sorted[k];
    double cut = lo + (hi - lo) / 2.0;
    if (!(cut < hi)) cut = lo;
    cuts.push_back(cut);
    next = best + 1;
  }
  return cuts;
}

std::vector<double> equal_width_cuts(double lo, double hi, std::size_t bins) {
  std::vector<double> cuts;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t j = 1; j < bins; ++j) {
    const double cut = lo + width * static_cast<double>(j);
    if (cut < hi && (cuts.empty() || cut > cuts.back())) cuts.push_back(cut);
  }
  return cuts;
}

}  // namespace

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::equal_frequency: return "equal-frequency";
    case Strategy::equal_width: return "equal-width";
    case Strategy::explicit_cuts: return "explicit";
  }
  return "equal-frequency";
}

std::optional<Strategy> parse_strategy(std::string_view text) noexcept {
  if (text == "equal-frequency") return Strategy::equal_frequency;
  if (text == "equal-width") return Strategy::equal_width;
  if (text == "explicit") return Strategy::explicit_cuts;
  return std::nullopt;
}

std::string range_token(std::string_view attribute, int range) {
  return std::string(attribute) + std::string(kRangeMarker) + std::to_string(range);
}

std::optional<TokenParts> parse_token(std::string_view token) {
  if (token == kSprawlToken || token == kNoSprawlToken) {
    return TokenParts{std::string(kTargetAttribute), 0};
  }
  const auto at = token.rfind(kRangeMarker);
  if (at == std::string_view::npos || at == 0) return std::nullopt;
  const auto digits = token.substr(at + kRangeMarker.size());
  if (digits.empty() || digits.size() > 6) return std::nullopt;
  int range = 0;
  for (char ch : digits) {
    if (ch < '0' || ch > '9') return std::nullopt;
    range = range * 10 + (ch - '0');
  }
  if (range < kFirstRange) return std::nullopt;
  return TokenParts{std::string(token.substr(0, at)), range};
}

std::size_t AttributeBins::bin_of(double value) const noexcept {
  return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

AttributeBins make_bins(std::string attribute, Strategy strategy, std::vector<double> cuts) {
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!std::isfinite(cuts[i])) {
      throw Error(ErrorCode::InvalidBinning, "non-finite cut for '" + attribute + "'");
    }
    if (i > 0 && !(cuts[i - 1] < cuts[i])) {
      throw Error(ErrorCode::InvalidBinning, "cuts for '" + attribute + "' are not strictly increasing");
    }
  }
  AttributeBins bins;
  bins.attribute = std::move(attribute);
  bins.strategy = strategy;
  bins.cuts = std::move(cuts);
  for (std::size_t k = 0; k < bins.cuts.size() + 1; ++k) {
    bins.labels.push_back(range_token(bins.attribute, static_cast<int>(k) + kFirstRange));
  }
  return bins;
}

BinningScheme::BinningScheme(std::vector<AttributeBins> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.attribute).second) {
      throw Error(ErrorCode::InvalidBinning, "attribute '" + e.attribute + "' binned twice");
    }
    if (e.labels.size() != e.cuts.size() + 1) {
      throw Error(ErrorCode::InvalidBinning, "label count mismatch for '" + e.attribute + "'");
    }
    for (std::size_t k = 0; k < e.labels.size(); ++k) {
      if (e.labels[k] != range_token(e.attribute, static_cast<int>(k) + kFirstRange)) {
        throw Error(ErrorCode::InvalidBinning, "bad label '" + e.labels[k] + "'");
      }
    }
    for (std::size_t i = 0; i < e.cuts.size(); ++i) {
      if (!std::isfinite(e.cuts[i]) || (i > 0 && !(e.cuts[i - 1] < e.cuts[i]))) {
        throw Error(ErrorCode::InvalidBinning, "invalid cuts for '" + e.attribute + "'");
      }
    }
  }
}

const AttributeBins* BinningScheme::find(std::string_view attribute) const noexcept {
  for (const auto& e : entries_) {
    if (e.attribute == attribute) return &e;
  }
  return nullptr;
}

const AttributeBins& BinningScheme::at(std::string_view attribute) const {
  if (const auto* e = find(attribute)) return *e;
  throw Error(ErrorCode::UnknownAttribute, "no bins for '" + std::string(attribute) + "'");
}

BinningScheme fit_binning(const AttributeTable& table, const std::vector<std::string>& attributes,
                          std::size_t bins_per_attribute, Strategy strategy,
                          const std::map<std::string, std::vector<double>>& explicit_cuts,
                          std::vector<std::string>* warnings) {
  if (bins_per_attribute < 2) {
    throw Error(ErrorCode::InvalidParameter, "bins_per_attribute must be at least 2");
  }
  if (table.empty()) throw Error(ErrorCode::EmptyDataset, "cannot fit bins on an empty table");

  std::vector<AttributeBins> entries;
  for (const auto& name : attributes) {
    const auto col = table.column_index(name);
    if (table.columns()[col].kind != ColumnKind::continuous) {
      throw Error(ErrorCode::NonContinuousAttribute, "'" + name + "' is not continuous");
    }
    if (auto it = explicit_cuts.find(name); it != explicit_cuts.end()) {
      entries.push_back(make_bins(name, Strategy::explicit_cuts, it->second));
      continue;
    }
    if (strategy == Strategy::explicit_cuts) {
      throw Error(ErrorCode::InvalidBinning, "explicit strategy but no cuts given for '" + name + "'");
    }

    std::vector<double> values;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      if (auto v = table.number(r, col)) values.push_back(*v);
    }
    std::sort(values.begin(), values.end());
    if (values.empty() || values.front() == values.back()) {
      warn(warnings, "'" + name + "' is constant or empty; using a single bin");
      entries.push_back(make_bins(name, strategy, {}));
      continue;
    }
    auto cuts = strategy == Strategy::equal_frequency
                    ? equal_frequency_cuts(values, bins_per_attribute)
                    : equal_width_cuts(values.front(), values.back(), bins_per_attribute);
    if (cuts.size() + 1 < bins_per_attribute) {
      std::ostringstream msg;
      msg << "'" << name << "' supports only " << cuts.size() + 1 << " of " << bins_per_attribute
          << " requested bins";
      warn(warnings, msg.str());
    }
    entries.push_back(make_bins(name, strategy, std::move(cuts)));
  }
  return BinningScheme(std::move(entries));
}

TokenizedDataset tokenize(const AttributeTable& table, const BinningScheme& scheme,
                          const std::string& target_column) {
  const auto target_col = table.find_column(target_column);
  if (!target_col || table.columns()[*target_col].kind == ColumnKind::continuous) {
    throw Error(ErrorCode::SchemeTableMismatch, "target '" + target_column + "' is not categorical");
  }
  std::vector<std::size_t> cols;
  for (const auto& e : scheme.entries()) {
    const auto col = table.find_column(e.attribute);
    if (!col || table.columns()[*col].kind != ColumnKind::continuous) {
      throw Error(ErrorCode::SchemeTableMismatch,
                  "scheme attribute '" + e.attribute + "' is not a continuous column");
    }
    cols.push_back(*col);
  }

  TokenizedDataset out;
  std::set<std::string> vocabulary;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    std::vector<std::string> tx;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (auto v = table.number(r, cols[i])) tx.push_back(scheme.entries()[i].label_of(*v));
    }
    const auto* text = std::get_if<std::string>(&table.at(r, *target_col));
    const auto label = text ? parse_label(*text) : std::nullopt;
    if (!label) {
      throw Error(ErrorCode::SchemeTableMismatch, "row '" + table.key(r) + "' has no Y/N target");
    }
    tx.emplace_back(*label == Label::Y ? kSprawlToken : kNoSprawlToken);
    std::sort(tx.begin(), tx.end());
    vocabulary.insert(tx.begin(), tx.end());
    out.transactions.push_back(std::move(tx));
    out.keys.push_back(table.key(r));
  }
  out.vocabulary.assign(vocabulary.begin(), vocabulary.end());
  return out;
}

TokenizedDataset parse_transactions(std::string_view text) {
  TokenizedDataset out;
  std::set<std::string> vocabulary;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    std::set<std::string> tx;
    for (std::string w; words >> w;) tx.insert(w);
    if (tx.empty()) continue;
    vocabulary.insert(tx.begin(), tx.end());
    out.keys.push_back(std::to_string(out.transactions.size() + 1));
    out.transactions.emplace_back(tx.begin(), tx.end());
  }
  out.vocabulary.assign(vocabulary.begin(), vocabulary.end());
  return out;
}

void to_json(nlohmann::json& j, const BinningScheme& scheme) {
  j = nlohmann::json::array();
  for (const auto& e : scheme.entries()) {
    j.push_back({{"attribute", e.attribute},
                 {"strategy", to_string(e.strategy)},
                 {"cuts", e.cuts},
                 {"labels", e.labels}});
  }
}

void from_json(const nlohmann::json& j, BinningScheme& scheme) {
  std::vector<AttributeBins> entries;
  for (const auto& item : j) {
    const auto strategy = parse_strategy(item.at("strategy").get<std::string>());
    if (!strategy) throw Error(ErrorCode::InvalidBinning, "unknown strategy in scheme");
    auto bins = make_bins(item.at("attribute").get<std::string>(), *strategy,
                          item.at("cuts").get<std::vector<double>>());
    if (item.contains("labels") && item.at("labels").get<std::vector<std::string>>() != bins.labels) {
      throw Error(ErrorCode::InvalidBinning, "labels disagree with cuts for '" + bins.attribute + "'");
    }
    entries.push_back(std::move(bins));
  }
  scheme = BinningScheme(std::move(entries));
}

}  // namespace sprawl::binning
