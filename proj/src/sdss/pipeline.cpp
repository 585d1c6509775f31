#include "sprawl/sdss/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "sprawl/error.hpp"
#include "sprawl/rulemine.hpp"

namespace sprawl::sdss {

AttributeTable stack_years(const std::vector<AttributeTable>& years) {
  if (years.empty()) throw Error(ErrorCode::EmptyDataset, "no tables to train on");
  AttributeTable out = years.front();
  for (std::size_t i = 1; i < years.size(); ++i) out = stack_tables(out, years[i], "@" + std::to_string(i));
  return out;
}

ModelBundle train_bundle(const std::vector<AttributeTable>& years, const TrainingConfig& config,
                         std::vector<std::string>* warnings) {
  if (config.method != "tree" && config.method != "bagging" && config.method != "boosting") {
    throw Error(ErrorCode::InvalidParameter, "unknown method '" + config.method + "'");
  }
  config.params.validate();
  const auto table = stack_years(years);
  const auto data = tree::TrainingSet::from_table(table, config.target_column, config.predictors);

  ModelBundle bundle;
  bundle.method = config.method;
  bundle.target_column = config.target_column;
  bundle.training_params = config.params;
  bundle.training_rows = data.rows();
  bundle.dataset_fingerprint = dataset_fingerprint(table);
  bundle.prior_y = static_cast<double>(std::count(data.labels.begin(), data.labels.end(), Label::Y)) /
                   static_cast<double>(data.rows());

  for (std::size_t a = 0; a < data.attributes.size(); ++a) {
    AttributeInfo info;
    info.name = data.attributes[a];
    if (auto it = config.units.find(info.name); it != config.units.end()) info.units = it->second;
    bool first = true;
    for (double v : data.columns[a]) {
      if (std::isnan(v)) continue;
      info.min = first ? v : std::min(info.min, v);
      info.max = first ? v : std::max(info.max, v);
      first = false;
    }
    bundle.attributes.push_back(std::move(info));
  }

  binning::TokenizedDataset tokens;
  if (config.per_year_binning) {
    for (const auto& year : years) {
      bundle.binning = binning::fit_binning(year, data.attributes, config.bins_per_attribute, config.strategy,
                                            config.explicit_cuts, warnings);
      auto part = binning::tokenize(year, bundle.binning, config.target_column);
      tokens.transactions.insert(tokens.transactions.end(), part.transactions.begin(), part.transactions.end());
      tokens.keys.insert(tokens.keys.end(), part.keys.begin(), part.keys.end());
    }
  } else {
    bundle.binning = binning::fit_binning(table, data.attributes, config.bins_per_attribute, config.strategy,
                                          config.explicit_cuts, warnings);
    tokens = binning::tokenize(table, bundle.binning, config.target_column);
  }
  const auto itemsets = rules::frequent_itemsets(tokens, config.min_support);
  bundle.rules = rules::generate_rules(itemsets, config.min_confidence);

  bundle.single_tree = tree::build_pruned_tree(data, config.params, warnings);
  if (config.method == "bagging") {
    bundle.ensemble = tree::bagging_fit(data, config.params, warnings);
  } else if (config.method == "boosting") {
    bundle.ensemble = tree::boosting_fit(data, config.params);
  }
  bundle.validate();
  return bundle;
}

}  // namespace sprawl::sdss
