#include "sprawl/sdss/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "sprawl/error.hpp"
#include "sprawl/ingest/csv.hpp"

namespace sprawl::sdss {
namespace {

std::string group_thousands(std::string digits) {
  std::string out;
  const std::size_t n = digits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string format_share(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

bool is_target(const ModelBundle& bundle, std::string_view name) {
  return name == binning::kTargetAttribute || name == bundle.target_column;
}

std::string_view target_token(Label label) {
  return label == Label::Y ? binning::kSprawlToken : binning::kNoSprawlToken;
}

void check_assignment(const ModelBundle& bundle, const Assignment& assignment) {
  for (const auto& [name, value] : assignment) {
    if (!bundle.find_attribute(name)) {
      throw Error(ErrorCode::UnknownAttribute, "the model has no attribute '" + name + "'");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::InvalidParameter, "value for '" + name + "' is not finite");
    }
  }
}

std::set<std::string> binned_tokens(const ModelBundle& bundle, const Assignment& assignment) {
  std::set<std::string> tokens;
  for (const auto& [name, value] : assignment) {
    if (const auto* bins = bundle.binning.find(name)) tokens.insert(bins->label_of(value));
  }
  return tokens;
}

std::string render_supporting_rule(const rules::AssociationRule& rule) {
  return "rule: " + rules::render_rule(rule) + " (support " + format_share(rule.support) + ", confidence " +
         format_share(rule.confidence) + ")";
}

}  // namespace

std::string format_quantity(double value) {
  if (!std::isfinite(value)) return ingest::format_number(value);
  std::string sign = value < 0.0 ? "-" : "";
  const double mag = std::abs(value);
  const double whole = std::floor(mag);
  if (mag - whole < 1e-9 && whole < 1e15) {
    return sign + group_thousands(std::to_string(static_cast<long long>(whole)));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", mag);
  std::string text = buf;
  while (text.back() == '0') text.pop_back();
  if (text.back() == '.') text.pop_back();
  const auto dot = text.find('.');
  const std::string int_part = text.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : text.substr(dot);
  return sign + group_thousands(int_part) + frac;
}

std::string describe_range(const binning::AttributeBins& bins, std::size_t bin) {
  const auto& cuts = bins.cuts;
  if (cuts.empty()) return "any value";
  if (bin == 0) return "less than " + format_quantity(cuts.front());
  if (bin >= cuts.size()) return "greater than " + format_quantity(cuts.back());
  return "between " + format_quantity(cuts[bin - 1]) + " and " + format_quantity(cuts[bin]);
}

Prediction predict_sprawl(const ModelBundle& bundle, const Assignment& assignment) {
  check_assignment(bundle, assignment);
  if (!bundle.ensemble && !bundle.single_tree) throw Error(ErrorCode::NoModel, "bundle holds no trained model");

  Prediction out;
  if (assignment.empty()) {
    out.label = bundle.prior_y > 0.5 ? Label::Y : Label::N;
    out.confidence = out.label == Label::Y ? bundle.prior_y : 1.0 - bundle.prior_y;
    out.provenance = "prior";
    out.explanation.emplace_back("no conditions supplied");
    return out;
  }

  std::vector<std::vector<tree::PathStep>> supporting_paths;
  if (bundle.ensemble) {
    const auto result = tree::ensemble_predict(*bundle.ensemble, assignment, &out.warnings);
    out.label = result.label;
    out.confidence = result.confidence;
    out.provenance = std::string(tree::to_string(bundle.ensemble->kind));
    for (const auto& v : result.votes) {
      out.votes.push_back({v.member, v.weight, v.prediction.label});
      if (v.prediction.label == out.label) supporting_paths.push_back(v.prediction.path);
    }
  } else {
    auto result = tree::predict(*bundle.single_tree, assignment, &out.warnings);
    out.label = result.label;
    out.confidence = result.confidence;
    out.provenance = "tree";
    out.votes.push_back({0, 1.0, result.label});
    supporting_paths.push_back(std::move(result.path));
  }

  std::vector<std::string> fractional;
  for (const auto& path : supporting_paths) {
    for (const auto& step : path) {
      auto& into = step.fractional ? fractional : out.explanation;
      auto text = step.render();
      if (std::find(into.begin(), into.end(), text) == into.end()) into.push_back(std::move(text));
    }
  }
  if (out.explanation.empty()) out.explanation = std::move(fractional);

  const auto tokens = binned_tokens(bundle, assignment);
  const auto wanted = target_token(out.label);
  std::size_t cited = 0;
  for (const auto& rule : bundle.rules) {
    if (cited == kMaxSupportingRules) break;
    if (std::find(rule.consequent.begin(), rule.consequent.end(), wanted) == rule.consequent.end()) continue;
    const bool satisfied = std::all_of(rule.antecedent.begin(), rule.antecedent.end(),
                                       [&](const std::string& t) { return tokens.contains(t); });
    if (!satisfied) continue;
    out.explanation.push_back(render_supporting_rule(rule));
    ++cited;
  }
  return out;
}

ImpactReport query_impact(const ModelBundle& bundle, const std::string& from, const std::string& to,
                          std::optional<double> value) {
  auto known = [&](const std::string& name) { return is_target(bundle, name) || bundle.binning.find(name); };
  if (!known(from)) throw Error(ErrorCode::UnknownAttribute, "the model has no attribute '" + from + "'");
  if (!known(to)) throw Error(ErrorCode::UnknownAttribute, "the model has no attribute '" + to + "'");
  if (from == to || (is_target(bundle, from) && is_target(bundle, to))) {
    throw Error(ErrorCode::InvalidQuery, "impact needs two different attributes");
  }
  if (value && is_target(bundle, from)) {
    throw Error(ErrorCode::InvalidQuery, "a value can only be supplied for a numeric attribute");
  }
  if (value && !std::isfinite(*value)) throw Error(ErrorCode::InvalidParameter, "value is not finite");

  const std::string from_term = is_target(bundle, from) ? std::string(binning::kTargetAttribute) : from;
  const std::string to_term = is_target(bundle, to) ? std::string(binning::kTargetAttribute) : to;

  ImpactReport report;
  report.from = from;
  report.to = to;
  report.value = value;
  rules::RuleFilter filter;
  filter.antecedent.push_back(from_term);
  filter.consequent.push_back(to_term);
  report.rules = rules::filter_rules(bundle.rules, filter);

  if (value) {
    const auto& bins = bundle.binning.at(from);
    report.from_token = bins.label_of(*value);
    std::erase_if(report.rules, [&](const rules::AssociationRule& r) {
      return std::find(r.antecedent.begin(), r.antecedent.end(), *report.from_token) == r.antecedent.end();
    });
  }
  if (report.rules.empty()) {
    report.note = "no mined relationship between " + from + " and " + to;
    if (report.from_token) report.note += " for " + *report.from_token;
    return report;
  }
  if (!value) return report;

  const auto& top = report.rules.front();
  for (const auto& token : top.consequent) {
    const auto parts = binning::parse_token(token);
    if (!parts || parts->attribute != to_term) continue;
    if (parts->range == 0) {
      report.headline = token == binning::kSprawlToken ? "sprawl" : "no sprawl";
    } else {
      const auto& bins = bundle.binning.at(to_term);
      report.headline = describe_range(bins, static_cast<std::size_t>(parts->range - binning::kFirstRange));
    }
    break;
  }
  report.note = "implied by " + rules::render_rule(top);
  return report;
}

void to_json(nlohmann::json& j, const Prediction& p) {
  auto votes = nlohmann::json::array();
  for (const auto& v : p.votes) {
    votes.push_back({{"member", v.member}, {"weight", v.weight}, {"label", std::string(to_string(v.label))}});
  }
  j = {{"label", std::string(to_string(p.label))},
       {"confidence", p.confidence},
       {"explanation", p.explanation},
       {"provenance", p.provenance},
       {"votes", std::move(votes)},
       {"warnings", p.warnings}};
}

void to_json(nlohmann::json& j, const ImpactReport& r) {
  j = {{"from", r.from},
       {"to", r.to},
       {"value", r.value ? nlohmann::json(*r.value) : nlohmann::json(nullptr)},
       {"from_token", r.from_token ? nlohmann::json(*r.from_token) : nlohmann::json(nullptr)},
       {"rules", r.rules},
       {"headline", r.headline ? nlohmann::json(*r.headline) : nlohmann::json(nullptr)},
       {"note", r.note}};
}

}  // namespace sprawl::sdss
