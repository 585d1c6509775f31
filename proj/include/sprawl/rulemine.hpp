#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sprawl/discretize.hpp"

namespace sprawl::rules {

struct FrequentItemset {
  std::vector<std::string> items;  // sorted, duplicate-free
  std::size_t support_count = 0;
  double support = 0.0;

  bool operator==(const FrequentItemset&) const = default;
};

struct AssociationRule {
  std::vector<std::string> antecedent;  // sorted
  std::vector<std::string> consequent;  // sorted
  double support = 0.0;
  double confidence = 0.0;
  std::size_t support_count = 0;     // transactions holding antecedent and consequent
  std::size_t antecedent_count = 0;  // transactions holding the antecedent

  bool operator==(const AssociationRule&) const = default;
};

/// Smallest count c with c / transaction_count >= min_support.
std::size_t min_support_count(double min_support, std::size_t transaction_count);

/// Level-wise Apriori over vertical transaction bitmaps.
///
/// Candidates of size k come from joining frequent (k-1)-itemsets that share
/// their first k-2 items, then dropping any candidate with an infrequent
/// (k-1)-subset. Supports are exact. Output is ordered by size, then items.
std::vector<FrequentItemset> frequent_itemsets(const std::vector<std::vector<std::string>>& transactions,
                                               double min_support);

inline std::vector<FrequentItemset> frequent_itemsets(const binning::TokenizedDataset& data,
                                                      double min_support) {
  return frequent_itemsets(data.transactions, min_support);
}

/// Every antecedent/consequent split of every itemset with at least two
/// items that reaches `min_confidence`. Sorted by confidence, then support
/// (both descending), then antecedent and consequent lexicographically.
std::vector<AssociationRule> generate_rules(const std::vector<FrequentItemset>& itemsets,
                                            double min_confidence);

/// Terms are tokens ("HousingUnits_Range3") or attribute names
/// ("HousingUnits", "Target"); an attribute matches any of its tokens.
struct RuleFilter {
  std::vector<std::string> mentions;    // anywhere in the rule
  std::vector<std::string> antecedent;  // must appear on the left
  std::vector<std::string> consequent;  // must appear on the right

  bool empty() const noexcept { return mentions.empty() && antecedent.empty() && consequent.empty(); }
};

/// Parses "lhs:A,rhs:B,C" style filters. Throws Error{InvalidQuery}.
RuleFilter parse_rule_filter(std::string_view text);

bool term_matches(std::string_view term, std::string_view token);

std::vector<AssociationRule> filter_rules(const std::vector<AssociationRule>& rules, const RuleFilter& filter);

/// "A1 A2 -> B1 B2"
std::string render_rule(const AssociationRule& rule);

/// Bracketed list, one rule per line: "[r1,\nr2]".
std::string render_rule_list(const std::vector<AssociationRule>& rules);

void to_json(nlohmann::json& j, const AssociationRule& rule);
void from_json(const nlohmann::json& j, AssociationRule& rule);

}  // namespace sprawl::rules
