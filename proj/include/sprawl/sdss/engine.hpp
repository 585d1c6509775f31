#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sprawl/dtree.hpp"
#include "sprawl/label.hpp"
#include "sprawl/rulemine.hpp"
#include "sprawl/sdss/bundle.hpp"

namespace sprawl::sdss {

using Assignment = tree::Instance;

struct MemberVoteSummary {
  std::size_t member = 0;
  double weight = 0.0;
  Label label = Label::N;

  bool operator==(const MemberVoteSummary&) const = default;
};

struct Prediction {
  Label label = Label::N;
  double confidence = 0.0;
  // Decision-path tests first, then supporting rules.
  std::vector<std::string> explanation;
  // "prior", "tree", "bagging" or "boosting".
  std::string provenance;
  std::vector<MemberVoteSummary> votes;
  std::vector<std::string> warnings;

  bool operator==(const Prediction&) const = default;
};

inline constexpr std::size_t kMaxSupportingRules = 3;

/// Classifies a partial assignment with the bundle's ensemble (or its single
/// tree when no ensemble was trained). Throws Error{UnknownAttribute},
/// Error{InvalidParameter} for non-finite values, Error{NoModel}.
Prediction predict_sprawl(const ModelBundle& bundle, const Assignment& assignment);

struct ImpactReport {
  std::string from;
  std::string to;
  std::optional<double> value;
  std::optional<std::string> from_token;  // bin of `value`
  std::vector<rules::AssociationRule> rules;
  std::optional<std::string> headline;
  std::string note;

  bool operator==(const ImpactReport&) const = default;
};

/// Rules leading from `from` tokens to `to` tokens. With a value, only rules
/// whose antecedent holds that value's bin are kept and the headline renders
/// the range implied for `to` by the strongest rule.
ImpactReport query_impact(const ModelBundle& bundle, const std::string& from, const std::string& to,
                          std::optional<double> value = std::nullopt);

/// "20,000", "18.88", "-1,234.5".
std::string format_quantity(double value);

/// Human-readable range of one bin: "less than 20,000", "between 20,000 and
/// 40,000", "greater than 40,000".
std::string describe_range(const binning::AttributeBins& bins, std::size_t bin);

void to_json(nlohmann::json& j, const Prediction& p);
void to_json(nlohmann::json& j, const ImpactReport& r);

}  // namespace sprawl::sdss
