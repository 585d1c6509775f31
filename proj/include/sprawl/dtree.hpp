#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sprawl/label.hpp"
#include "sprawl/table.hpp"

namespace sprawl::tree {

struct ClassWeights {
  double n = 0.0;
  double y = 0.0;

  double total() const noexcept { return n + y; }
  double of(Label label) const noexcept { return label == Label::Y ? y : n; }
  void add(Label label, double w) noexcept { (label == Label::Y ? y : n) += w; }
  // Ties go to N.
  Label majority() const noexcept { return y > n ? Label::Y : Label::N; }

  bool operator==(const ClassWeights&) const = default;
};

/// Base-2 entropy of a class distribution; 0 for an empty one.
double entropy(const ClassWeights& w) noexcept;

struct TreeNode {
  // Internal nodes test `attribute < threshold` (left) vs `>=` (right).
  std::string attribute;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  // Share of known-value training weight sent left; the right branch gets
  // the rest. Used to descend both ways when the attribute is absent.
  double left_fraction = 0.0;
  double gain = 0.0;
  double gain_ratio = 0.0;

  Label label = Label::N;
  ClassWeights train;
  std::optional<ClassWeights> prune;

  bool is_leaf() const noexcept { return left < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Binary threshold tree stored as a node array with the root at index 0.
class DecisionTree {
 public:
  DecisionTree();
  // `features` lists every attribute the tree was trained on.
  DecisionTree(std::vector<TreeNode> nodes, std::vector<std::string> features, bool pruned = false);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
  const TreeNode& root() const { return nodes_.front(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept;
  bool pruned() const noexcept { return pruned_; }
  const std::vector<std::string>& features() const noexcept { return features_; }
  // Attributes actually tested, in first-use (preorder) order.
  std::vector<std::string> attributes() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<std::string> features_;
  bool pruned_ = false;
};

struct TrainParams {
  std::size_t min_leaf_instances = 2;
  std::optional<std::size_t> max_depth;
  double pruning_holdout_fraction = 1.0 / 3.0;
  std::size_t rounds = 10;
  std::uint64_t seed = 1;

  TrainParams() = default;
  TrainParams(std::size_t min_leaf, std::optional<std::size_t> depth, double holdout, std::size_t rounds_,
              std::uint64_t seed_);

  // Throws Error{InvalidParameter}.
  void validate() const;
  bool operator==(const TrainParams&) const = default;
};

/// Column-major numeric view of a table. Missing cells are NaN.
struct TrainingSet {
  std::vector<std::string> attributes;
  std::vector<std::vector<double>> columns;
  std::vector<Label> labels;

  std::size_t rows() const noexcept { return labels.size(); }

  /// Uses every continuous column except the key and the target unless
  /// `predictors` is given.
  static TrainingSet from_table(const AttributeTable& table, const std::string& target,
                                const std::vector<std::string>& predictors = {});
};

using Instance = std::map<std::string, double, std::less<>>;

// Split statistics for one attribute/threshold at one node (C4.5 with
// missing values: gain scaled by the known fraction, split information over
// left, right and unknown parts).
struct SplitStats {
  double gain = 0.0;
  double split_info = 0.0;
  double gain_ratio = 0.0;
};

struct SplitChoice {
  std::size_t attribute = 0;
  double threshold = 0.0;
  SplitStats stats;
};

/// Picks the split for a node holding `rows` with `weights` (instance units).
/// Per attribute the threshold with the highest gain wins; among attributes
/// whose gain reaches the mean positive gain, the highest gain ratio wins.
std::optional<SplitChoice> choose_split(const TrainingSet& data, std::span<const std::size_t> rows,
                                        std::span<const double> weights, std::size_t min_leaf);

/// Grows an unpruned tree on weighted rows.
DecisionTree grow_tree(const TrainingSet& data, std::span<const std::size_t> rows,
                       std::span<const double> weights, const TrainParams& params);

DecisionTree build_tree(const AttributeTable& table, const std::string& target, const TrainParams& params);

/// Bottom-up reduced-error pruning. A node becomes a leaf with its training
/// majority when that leaf's pruning-set error does not exceed the subtree's.
DecisionTree reduced_error_prune(const DecisionTree& tree, const TrainingSet& data,
                                 std::span<const std::size_t> rows, std::vector<std::string>* warnings = nullptr);

DecisionTree reduced_error_prune(const DecisionTree& tree, const AttributeTable& pruning_set,
                                 const std::string& target, std::vector<std::string>* warnings = nullptr);

/// Grows on a shuffled (1 - holdout) share of the rows and prunes on the rest.
DecisionTree build_pruned_tree(const TrainingSet& data, const TrainParams& params,
                               std::vector<std::string>* warnings = nullptr);

/// Weighted leaf-level misclassification of `rows` (absent values descend
/// both branches by training fraction).
double tree_error(const DecisionTree& tree, const TrainingSet& data, std::span<const std::size_t> rows);

struct PathStep {
  std::string attribute;
  double threshold = 0.0;
  // Concrete test: went_right tells which side. Fractional: the attribute
  // was absent and both branches were weighted by `fraction_left`.
  bool fractional = false;
  bool went_right = false;
  double fraction_left = 0.0;

  std::string render() const;
  bool operator==(const PathStep&) const = default;
};

struct TreePrediction {
  Label label = Label::N;
  double confidence = 0.0;
  double probability_y = 0.0;
  std::vector<PathStep> path;

  bool operator==(const TreePrediction&) const = default;
};

/// Classifies a partial instance. Names outside the tree's training features
/// are ignored with a warning; non-finite values throw Error{InvalidParameter}.
TreePrediction predict(const DecisionTree& tree, const Instance& instance,
                       std::vector<std::string>* warnings = nullptr);

enum class EnsembleKind { bagging, boosting };

std::string_view to_string(EnsembleKind kind) noexcept;

struct EnsembleMember {
  DecisionTree tree;
  double weight = 1.0;

  bool operator==(const EnsembleMember&) const = default;
};

struct Ensemble {
  EnsembleKind kind = EnsembleKind::bagging;
  std::vector<EnsembleMember> members;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const Ensemble&) const = default;
};

/// Per-round seed for the bootstrap generator (std::mt19937_64).
std::uint64_t round_seed(std::uint64_t seed, std::size_t round) noexcept;

/// Unbiased draw in [0, bound) by rejection, independent of the standard
/// library's distribution implementations.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound);

Ensemble bagging_fit(const TrainingSet& data, const TrainParams& params,
                     std::vector<std::string>* warnings = nullptr);
Ensemble bagging_fit(const AttributeTable& table, const std::string& target, const TrainParams& params);

struct BoostingTrace {
  std::vector<double> errors;                       // weighted error per round
  std::vector<std::vector<double>> weights;         // instance weights after each round
};

// Member weight used when a round classifies the training data perfectly.
double max_member_weight() noexcept;

/// AdaBoost.M1 over weighted trees grown with `params`.
Ensemble boosting_fit(const TrainingSet& data, const TrainParams& params, BoostingTrace* trace = nullptr);
Ensemble boosting_fit(const AttributeTable& table, const std::string& target, const TrainParams& params,
                      BoostingTrace* trace = nullptr);

struct MemberVote {
  std::size_t member = 0;
  double weight = 0.0;
  TreePrediction prediction;
};

struct EnsemblePrediction {
  Label label = Label::N;
  double confidence = 0.0;
  std::vector<MemberVote> votes;
};

/// Weighted vote; confidence is the winning share of total weight; ties go to N.
EnsemblePrediction ensemble_predict(const Ensemble& ensemble, const Instance& instance,
                                    std::vector<std::string>* warnings = nullptr);

std::string render_tree(const DecisionTree& tree);
std::string render_ensemble(const Ensemble& ensemble);

void to_json(nlohmann::json& j, const DecisionTree& tree);
void from_json(const nlohmann::json& j, DecisionTree& tree);
void to_json(nlohmann::json& j, const Ensemble& ensemble);
void from_json(const nlohmann::json& j, Ensemble& ensemble);
void to_json(nlohmann::json& j, const TrainParams& params);
void from_json(const nlohmann::json& j, TrainParams& params);

}  // namespace sprawl::tree
