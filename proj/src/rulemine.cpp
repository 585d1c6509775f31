#include "sprawl/rulemine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "sprawl/error.hpp"
#include "sprawl/simd/kernels.hpp"

namespace sprawl::rules {
namespace {

using ItemIds = std::vector<std::uint32_t>;

// Bitmaps of every itemset in one level, stored contiguously.
struct Level {
  std::vector<ItemIds> itemsets;
  std::vector<std::size_t> counts;
  std::vector<std::uint64_t> bits;  // itemsets.size() * words

  const std::uint64_t* bitmap(std::size_t i, std::size_t words) const { return bits.data() + i * words; }
};

bool all_subsets_frequent(const ItemIds& candidate, const std::set<ItemIds>& previous) {
  // Subsets dropping one of the last two items are the join parents.
  ItemIds subset(candidate.size() - 1);
  for (std::size_t skip = 0; skip + 2 < candidate.size(); ++skip) {
    std::size_t o = 0;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      if (i != skip) subset[o++] = candidate[i];
    }
    if (!previous.contains(subset)) return false;
  }
  return true;
}

void validate_unit_fraction(double value, ErrorCode code, const char* what) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw Error(code, std::string(what) + " must be in (0, 1], got " + std::to_string(value));
  }
}

bool mentions(const std::vector<std::string>& side, std::string_view term) {
  return std::any_of(side.begin(), side.end(), [&](const std::string& t) { return term_matches(term, t); });
}

}  // namespace

std::size_t min_support_count(double min_support, std::size_t transaction_count) {
  const double n = static_cast<double>(transaction_count);
  auto c = static_cast<std::size_t>(std::floor(min_support * n));
  while (c > 0 && static_cast<double>(c - 1) / n >= min_support) --c;
  while (static_cast<double>(c) / n < min_support) ++c;
  return c;
}

std::vector<FrequentItemset> frequent_itemsets(const std::vector<std::vector<std::string>>& transactions,
                                               double min_support) {
  validate_unit_fraction(min_support, ErrorCode::InvalidSupport, "min_support");
  if (transactions.empty()) throw Error(ErrorCode::EmptyDataset, "no transactions to mine");

  const std::size_t n = transactions.size();
  const std::size_t words = (n + 63) / 64;
  const std::size_t min_count = min_support_count(min_support, n);
  const auto& k = simd::kernels();

  std::vector<std::string> vocabulary;
  for (const auto& tx : transactions) vocabulary.insert(vocabulary.end(), tx.begin(), tx.end());
  std::sort(vocabulary.begin(), vocabulary.end());
  vocabulary.erase(std::unique(vocabulary.begin(), vocabulary.end()), vocabulary.end());

  std::vector<std::uint64_t> item_bits(vocabulary.size() * words, 0);
  for (std::size_t t = 0; t < n; ++t) {
    for (const auto& token : transactions[t]) {
      const auto id = static_cast<std::size_t>(
          std::lower_bound(vocabulary.begin(), vocabulary.end(), token) - vocabulary.begin());
      item_bits[id * words + t / 64] |= std::uint64_t{1} << (t % 64);
    }
  }

  std::vector<FrequentItemset> out;
  auto emit = [&](const Level& level) {
    for (std::size_t i = 0; i < level.itemsets.size(); ++i) {
      FrequentItemset fi;
      for (auto id : level.itemsets[i]) fi.items.push_back(vocabulary[id]);
      fi.support_count = level.counts[i];
      fi.support = static_cast<double>(level.counts[i]) / static_cast<double>(n);
      out.push_back(std::move(fi));
    }
  };

  Level level;
  for (std::uint32_t id = 0; id < vocabulary.size(); ++id) {
    const auto* bm = item_bits.data() + id * words;
    const std::size_t count = k.and_popcount(bm, bm, words);
    if (count >= min_count) {
      level.itemsets.push_back({id});
      level.counts.push_back(count);
      level.bits.insert(level.bits.end(), bm, bm + words);
    }
  }

  std::vector<std::uint64_t> scratch(words);
  while (!level.itemsets.empty()) {
    emit(level);
    const std::set<ItemIds> previous(level.itemsets.begin(), level.itemsets.end());
    Level next;
    const std::size_t m = level.itemsets.size();
    for (std::size_t a = 0; a < m; ++a) {
      const auto& left = level.itemsets[a];
      for (std::size_t b = a + 1; b < m; ++b) {
        const auto& right = level.itemsets[b];
        // Sorted order keeps equal prefixes adjacent.
        if (!std::equal(left.begin(), left.end() - 1, right.begin())) break;
        ItemIds candidate = left;
        candidate.push_back(right.back());
        if (!all_subsets_frequent(candidate, previous)) continue;
        const std::size_t count =
            k.and_into(scratch.data(), level.bitmap(a, words), level.bitmap(b, words), words);
        if (count < min_count) continue;
        next.itemsets.push_back(std::move(candidate));
        next.counts.push_back(count);
        next.bits.insert(next.bits.end(), scratch.begin(), scratch.end());
      }
    }
    level = std::move(next);
  }
  return out;
}

std::vector<AssociationRule> generate_rules(const std::vector<FrequentItemset>& itemsets,
                                            double min_confidence) {
  validate_unit_fraction(min_confidence, ErrorCode::InvalidConfidence, "min_confidence");
  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& fi : itemsets) counts.emplace(fi.items, fi.support_count);

  std::vector<AssociationRule> rules;
  for (const auto& fi : itemsets) {
    const std::size_t k = fi.items.size();
    if (k < 2) continue;
    if (k > 30) throw Error(ErrorCode::InvalidParameter, "itemset too large for rule enumeration");
    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      AssociationRule rule;
      for (std::size_t i = 0; i < k; ++i) {
        (mask >> i & 1u ? rule.antecedent : rule.consequent).push_back(fi.items[i]);
      }
      auto it = counts.find(rule.antecedent);
      if (it == counts.end() || it->second == 0) {
        throw Error(ErrorCode::MissingSubsetSupport,
                    "no support recorded for subset of size " + std::to_string(rule.antecedent.size()));
      }
      if (!counts.contains(rule.consequent)) {
        throw Error(ErrorCode::MissingSubsetSupport,
                    "no support recorded for subset of size " + std::to_string(rule.consequent.size()));
      }
      rule.support_count = fi.support_count;
      rule.antecedent_count = it->second;
      rule.support = fi.support;
      rule.confidence = static_cast<double>(fi.support_count) / static_cast<double>(it->second);
      if (rule.confidence >= min_confidence) rules.push_back(std::move(rule));
    }
  }
  std::sort(rules.begin(), rules.end(), [](const AssociationRule& x, const AssociationRule& y) {
    if (x.confidence != y.confidence) return x.confidence > y.confidence;
    if (x.support != y.support) return x.support > y.support;
    if (x.antecedent != y.antecedent) return x.antecedent < y.antecedent;
    return x.consequent < y.consequent;
  });
  return rules;
}

bool term_matches(std::string_view term, std::string_view token) {
  if (term == token) return true;
  const auto parts = binning::parse_token(token);
  return parts && parts->attribute == term;
}

RuleFilter parse_rule_filter(std::string_view text) {
  RuleFilter filter;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    auto term = text.substr(start, end - start);
    while (!term.empty() && term.front() == ' ') term.remove_prefix(1);
    while (!term.empty() && term.back() == ' ') term.remove_suffix(1);
    if (term.empty()) {
      if (text.empty()) break;
      throw Error(ErrorCode::InvalidQuery, "empty term in rule filter");
    }
    auto* side = &filter.mentions;
    if (const auto colon = term.find(':'); colon != std::string_view::npos) {
      const auto prefix = term.substr(0, colon);
      if (prefix == "lhs") {
        side = &filter.antecedent;
      } else if (prefix == "rhs") {
        side = &filter.consequent;
      } else {
        throw Error(ErrorCode::InvalidQuery, "unknown filter prefix '" + std::string(prefix) + "'");
      }
      term.remove_prefix(colon + 1);
      if (term.empty()) throw Error(ErrorCode::InvalidQuery, "empty term in rule filter");
    }
    for (char ch : term) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) {
        throw Error(ErrorCode::InvalidQuery, "bad character in filter term '" + std::string(term) + "'");
      }
    }
    side->emplace_back(term);
    start = end + 1;
  }
  return filter;
}

std::vector<AssociationRule> filter_rules(const std::vector<AssociationRule>& rules, const RuleFilter& filter) {
  std::vector<AssociationRule> out;
  for (const auto& rule : rules) {
    const bool ok =
        std::all_of(filter.mentions.begin(), filter.mentions.end(),
                    [&](const std::string& t) { return mentions(rule.antecedent, t) || mentions(rule.consequent, t); }) &&
        std::all_of(filter.antecedent.begin(), filter.antecedent.end(),
                    [&](const std::string& t) { return mentions(rule.antecedent, t); }) &&
        std::all_of(filter.consequent.begin(), filter.consequent.end(),
                    [&](const std::string& t) { return mentions(rule.consequent, t); });
    if (ok) out.push_back(rule);
  }
  return out;
}

std::string render_rule(const AssociationRule& rule) {
  std::string out;
  for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
    if (i) out += ' ';
    out += rule.antecedent[i];
  }
  out += " ->";
  for (const auto& token : rule.consequent) {
    out += ' ';
    out += token;
  }
  return out;
}

std::string render_rule_list(const std::vector<AssociationRule>& rules) {
  std::string out = "[";
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (i) out += ",\n";
    out += render_rule(rules[i]);
  }
  out += "]";
  return out;
}

void to_json(nlohmann::json& j, const AssociationRule& rule) {
  j = {{"antecedent", rule.antecedent},
       {"consequent", rule.consequent},
       {"support", rule.support},
       {"confidence", rule.confidence},
       {"support_count", rule.support_count},
       {"antecedent_count", rule.antecedent_count},
       {"text", render_rule(rule)}};
}

void from_json(const nlohmann::json& j, AssociationRule& rule) {
  rule.antecedent = j.at("antecedent").get<std::vector<std::string>>();
  rule.consequent = j.at("consequent").get<std::vector<std::string>>();
  rule.support = j.at("support").get<double>();
  rule.confidence = j.at("confidence").get<double>();
  rule.support_count = j.at("support_count").get<std::size_t>();
  rule.antecedent_count = j.at("antecedent_count").get<std::size_t>();
}

}  // namespace sprawl::rules
