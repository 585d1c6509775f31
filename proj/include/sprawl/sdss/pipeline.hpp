#pragma once

#include <map>
#include <string>
#include <vector>

#include "sprawl/discretize.hpp"
#include "sprawl/dtree.hpp"
#include "sprawl/sdss/bundle.hpp"
#include "sprawl/table.hpp"

namespace sprawl::sdss {

struct TrainingConfig {
  std::string method = "bagging";  // tree | bagging | boosting
  std::string target_column = "Target";
  tree::TrainParams params;
  std::size_t bins_per_attribute = 3;
  binning::Strategy strategy = binning::Strategy::equal_frequency;
  std::map<std::string, std::vector<double>> explicit_cuts;
  // Fit bins on each year's table separately; the bundle keeps the last
  // year's scheme for query-time binning.
  bool per_year_binning = false;
  double min_support = 0.2;
  double min_confidence = 0.7;
  std::map<std::string, std::string> units;
  // Restrict predictors; empty means every continuous column.
  std::vector<std::string> predictors;
};

/// One table per year, same schema. Throws Error{InvalidParameter} for an
/// unknown method.
ModelBundle train_bundle(const std::vector<AttributeTable>& years, const TrainingConfig& config,
                         std::vector<std::string>* warnings = nullptr);

/// Years stacked into one training table; keys of later years get "@<index>".
AttributeTable stack_years(const std::vector<AttributeTable>& years);

}  // namespace sprawl::sdss
