#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sprawl/discretize.hpp"
#include "sprawl/dtree.hpp"
#include "sprawl/rulemine.hpp"
#include "sprawl/table.hpp"

namespace sprawl::sdss {

inline constexpr int kBundleFormatVersion = 1;

struct AttributeInfo {
  std::string name;
  std::string units;
  double min = 0.0;
  double max = 0.0;

  bool operator==(const AttributeInfo&) const = default;
};

/// Everything the decision-support engine needs, trained once and then
/// treated as immutable.
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  std::string method = "tree";  // tree | bagging | boosting
  binning::BinningScheme binning;
  std::vector<rules::AssociationRule> rules;
  std::optional<tree::Ensemble> ensemble;
  std::optional<tree::DecisionTree> single_tree;
  std::vector<AttributeInfo> attributes;
  std::string dataset_fingerprint;
  tree::TrainParams training_params;
  std::string target_column = "Target";
  std::size_t training_rows = 0;
  // Share of training rows labelled Y.
  double prior_y = 0.0;

  const AttributeInfo* find_attribute(std::string_view name) const noexcept;
  // Throws Error{InvalidParameter} when a rule or tree names an attribute
  // missing from `attributes`.
  void validate() const;

  bool operator==(const ModelBundle&) const = default;
};

std::string sha256_hex(std::string_view data);

/// Hash of the table's canonical CSV form.
std::string dataset_fingerprint(const AttributeTable& table);

std::string serialize_bundle(const ModelBundle& bundle);
// Throws Error{VersionMismatch} or Error{CorruptBundle}.
ModelBundle parse_bundle(std::string_view text);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace sprawl::sdss
