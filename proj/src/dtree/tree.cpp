#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include "sprawl/dtree.hpp"
#include "sprawl/error.hpp"
#include "sprawl/ingest/csv.hpp"

namespace sprawl::tree {
namespace {

constexpr double kGainEpsilon = 1e-12;

bool is_known(double v) noexcept { return !std::isnan(v); }

double plogp(double part, double whole) noexcept {
  if (part <= 0.0 || whole <= 0.0) return 0.0;
  const double p = part / whole;
  return -p * std::log2(p);
}

ClassWeights weigh(const TrainingSet& data, std::span<const std::size_t> rows, std::span<const double> weights) {
  ClassWeights cw;
  for (std::size_t i = 0; i < rows.size(); ++i) cw.add(data.labels[rows[i]], weights[i]);
  return cw;
}

struct ThresholdScan {
  bool valid = false;
  double threshold = 0.0;
  double gain = 0.0;
  double left = 0.0;
  double right = 0.0;
  double unknown = 0.0;
};

double midpoint(double lo, double hi) noexcept {
  const double mid = lo + (hi - lo) / 2.0;
  // Keep lo strictly on the `<` side.
  return mid > lo ? mid : hi;
}

ThresholdScan scan_attribute(const TrainingSet& data, std::size_t attr, std::span<const std::size_t> rows,
                             std::span<const double> weights, double total, double min_leaf) {
  const auto& column = data.columns[attr];
  std::vector<std::size_t> known;
  known.reserve(rows.size());
  ClassWeights known_cw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (is_known(column[rows[i]])) {
      known.push_back(i);
      known_cw.add(data.labels[rows[i]], weights[i]);
    }
  }
  ThresholdScan best;
  const double known_total = known_cw.total();
  if (known.size() < 2 || known_total <= 0.0) return best;
  std::sort(known.begin(), known.end(), [&](std::size_t a, std::size_t b) {
    const double va = column[rows[a]];
    const double vb = column[rows[b]];
    return va < vb || (va == vb && a < b);
  });

  const double base = entropy(known_cw);
  ClassWeights left;
  for (std::size_t k = 0; k + 1 < known.size(); ++k) {
    const std::size_t i = known[k];
    left.add(data.labels[rows[i]], weights[i]);
    const double here = column[rows[i]];
    const double next = column[rows[known[k + 1]]];
    if (!(here < next)) continue;
    const ClassWeights right{known_cw.n - left.n, known_cw.y - left.y};
    if (left.total() < min_leaf || right.total() < min_leaf) continue;
    const double info = left.total() / known_total * entropy(left) + right.total() / known_total * entropy(right);
    const double gain = known_total / total * (base - info);
    if (!best.valid || gain > best.gain) {
      best.valid = true;
      best.gain = gain;
      best.threshold = midpoint(here, next);
      best.left = left.total();
      best.right = right.total();
    }
  }
  best.unknown = total - known_total;
  return best;
}

class Grower {
 public:
  Grower(const TrainingSet& data, const TrainParams& params) : data_(data), params_(params) {}

  std::int32_t grow(std::vector<std::size_t> rows, std::vector<double> weights, std::size_t depth) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    TreeNode node;
    node.train = weigh(data_, rows, weights);
    node.label = node.train.majority();
    const auto min_leaf = static_cast<double>(params_.min_leaf_instances);
    const bool stop = node.train.n <= 0.0 || node.train.y <= 0.0 || node.train.total() < 2.0 * min_leaf ||
                      (params_.max_depth && depth >= *params_.max_depth);
    std::optional<SplitChoice> split;
    if (!stop) split = choose_split(data_, rows, weights, params_.min_leaf_instances);
    if (!split) {
      nodes_[index] = std::move(node);
      return index;
    }

    const auto& column = data_.columns[split->attribute];
    ClassWeights known;
    double known_left = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = column[rows[i]];
      if (!is_known(v)) continue;
      known.add(data_.labels[rows[i]], weights[i]);
      if (v < split->threshold) known_left += weights[i];
    }
    const double fraction = known_left / known.total();

    std::vector<std::size_t> left_rows, right_rows;
    std::vector<double> left_w, right_w;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = column[rows[i]];
      if (!is_known(v)) {
        if (fraction > 0.0) {
          left_rows.push_back(rows[i]);
          left_w.push_back(weights[i] * fraction);
        }
        if (fraction < 1.0) {
          right_rows.push_back(rows[i]);
          right_w.push_back(weights[i] * (1.0 - fraction));
        }
      } else if (v < split->threshold) {
        left_rows.push_back(rows[i]);
        left_w.push_back(weights[i]);
      } else {
        right_rows.push_back(rows[i]);
        right_w.push_back(weights[i]);
      }
    }

    node.attribute = data_.attributes[split->attribute];
    node.threshold = split->threshold;
    node.left_fraction = fraction;
    node.gain = split->stats.gain;
    node.gain_ratio = split->stats.gain_ratio;
    nodes_[index] = std::move(node);
    rows.clear();
    weights.clear();

    const auto l = grow(std::move(left_rows), std::move(left_w), depth + 1);
    const auto r = grow(std::move(right_rows), std::move(right_w), depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  std::vector<TreeNode> take() { return std::move(nodes_); }

 private:
  const TrainingSet& data_;
  const TrainParams& params_;
  std::vector<TreeNode> nodes_;
};

std::optional<std::size_t> attribute_column(const TrainingSet& data, const std::string& name) {
  for (std::size_t a = 0; a < data.attributes.size(); ++a) {
    if (data.attributes[a] == name) return a;
  }
  return std::nullopt;
}

// Pushes `rows` (with `mass`) down from `index`, calling `leaf(node, row, mass)`.
template <typename LeafFn>
void route(const std::vector<TreeNode>& nodes, std::size_t index, const TrainingSet& data,
           std::span<const std::size_t> rows, std::span<const double> mass, LeafFn&& leaf) {
  const auto& node = nodes[index];
  if (node.is_leaf()) {
    for (std::size_t i = 0; i < rows.size(); ++i) leaf(index, rows[i], mass[i]);
    return;
  }
  const auto col = attribute_column(data, node.attribute);
  std::vector<std::size_t> lr, rr;
  std::vector<double> lm, rm;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = col ? data.columns[*col][rows[i]] : std::numeric_limits<double>::quiet_NaN();
    if (!is_known(v)) {
      if (node.left_fraction > 0.0) { lr.push_back(rows[i]); lm.push_back(mass[i] * node.left_fraction); }
      if (node.left_fraction < 1.0) { rr.push_back(rows[i]); rm.push_back(mass[i] * (1.0 - node.left_fraction)); }
    } else if (v < node.threshold) {
      lr.push_back(rows[i]);
      lm.push_back(mass[i]);
    } else {
      rr.push_back(rows[i]);
      rm.push_back(mass[i]);
    }
  }
  route(nodes, static_cast<std::size_t>(node.left), data, lr, lm, leaf);
  route(nodes, static_cast<std::size_t>(node.right), data, rr, rm, leaf);
}

class Pruner {
 public:
  Pruner(const DecisionTree& tree, const TrainingSet& data) : nodes_(tree.nodes()), data_(data) {}

  double prune(std::size_t index, std::vector<std::size_t> rows, std::vector<double> mass) {
    auto& node = nodes_[index];
    ClassWeights seen;
    double leaf_error = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Label truth = data_.labels[rows[i]];
      seen.add(truth, mass[i]);
      if (truth != node.label) leaf_error += mass[i];
    }
    node.prune = seen;
    if (node.is_leaf()) return leaf_error;

    const auto col = attribute_column(data_, node.attribute);
    const double fraction = node.left_fraction;
    const double threshold = node.threshold;
    std::vector<std::size_t> lr, rr;
    std::vector<double> lm, rm;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = col ? data_.columns[*col][rows[i]] : std::numeric_limits<double>::quiet_NaN();
      if (!is_known(v)) {
        if (fraction > 0.0) { lr.push_back(rows[i]); lm.push_back(mass[i] * fraction); }
        if (fraction < 1.0) { rr.push_back(rows[i]); rm.push_back(mass[i] * (1.0 - fraction)); }
      } else if (v < threshold) {
        lr.push_back(rows[i]);
        lm.push_back(mass[i]);
      } else {
        rr.push_back(rows[i]);
        rm.push_back(mass[i]);
      }
    }
    const auto left = static_cast<std::size_t>(node.left);
    const auto right = static_cast<std::size_t>(node.right);
    const double subtree_error = prune(left, std::move(lr), std::move(lm)) + prune(right, std::move(rr), std::move(rm));
    if (leaf_error <= subtree_error) {
      auto& collapsed = nodes_[index];
      collapsed.attribute.clear();
      collapsed.threshold = 0.0;
      collapsed.left = collapsed.right = -1;
      collapsed.left_fraction = 0.0;
      collapsed.gain = collapsed.gain_ratio = 0.0;
      return leaf_error;
    }
    return subtree_error;
  }

  // Drops unreachable nodes, renumbering in preorder.
  std::vector<TreeNode> compact() const {
    std::vector<TreeNode> out;
    copy(0, out);
    return out;
  }

 private:
  std::int32_t copy(std::size_t index, std::vector<TreeNode>& out) const {
    const auto at = static_cast<std::int32_t>(out.size());
    out.push_back(nodes_[index]);
    if (!nodes_[index].is_leaf()) {
      const auto l = copy(static_cast<std::size_t>(nodes_[index].left), out);
      const auto r = copy(static_cast<std::size_t>(nodes_[index].right), out);
      out[at].left = l;
      out[at].right = r;
    }
    return at;
  }

  std::vector<TreeNode> nodes_;
  const TrainingSet& data_;
};

void descend(const DecisionTree& tree, std::size_t index, const Instance& instance, double mass,
             ClassWeights& acc, std::vector<PathStep>& path) {
  const auto& node = tree.node(index);
  if (node.is_leaf()) {
    const double total = node.train.total();
    if (total > 0.0) {
      acc.n += mass * node.train.n / total;
      acc.y += mass * node.train.y / total;
    } else {
      acc.add(node.label, mass);
    }
    return;
  }
  const auto it = instance.find(node.attribute);
  if (it != instance.end()) {
    const bool right = it->second >= node.threshold;
    path.push_back({node.attribute, node.threshold, false, right, 0.0});
    descend(tree, static_cast<std::size_t>(right ? node.right : node.left), instance, mass, acc, path);
    return;
  }
  path.push_back({node.attribute, node.threshold, true, false, node.left_fraction});
  if (node.left_fraction > 0.0) {
    descend(tree, static_cast<std::size_t>(node.left), instance, mass * node.left_fraction, acc, path);
  }
  if (node.left_fraction < 1.0) {
    descend(tree, static_cast<std::size_t>(node.right), instance, mass * (1.0 - node.left_fraction), acc, path);
  }
}

// Ten significant digits hide midpoint noise in explanations.
std::string format_threshold(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string format_count(double value) {
  const double rounded = std::round(value);
  if (std::abs(value - rounded) < 1e-9) return ingest::format_number(rounded == 0.0 ? 0.0 : rounded);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string leaf_annotation(const TreeNode& node) {
  const double correct = node.train.of(node.label);
  std::string out = std::string(to_string(node.label)) + " (" + format_count(correct) + "/" +
                    format_count(node.train.total() - correct) + ")";
  if (node.prune) {
    const double pc = node.prune->of(node.label);
    out += " [" + format_count(pc) + "/" + format_count(node.prune->total() - pc) + "]";
  }
  return out;
}

void render_node(const DecisionTree& tree, std::size_t index, std::size_t depth, std::string& out) {
  const auto& node = tree.node(index);
  const std::string threshold = ingest::format_number(node.threshold);
  const std::size_t children[2] = {static_cast<std::size_t>(node.left), static_cast<std::size_t>(node.right)};
  for (int side = 0; side < 2; ++side) {
    for (std::size_t d = 0; d < depth; ++d) out += "| ";
    out += node.attribute;
    out += side == 0 ? " < " : " >= ";
    out += threshold;
    const auto& child = tree.node(children[side]);
    if (child.is_leaf()) {
      out += " : " + leaf_annotation(child) + "\n";
    } else {
      out += "\n";
      render_node(tree, children[side], depth + 1, out);
    }
  }
}

nlohmann::json weights_json(const ClassWeights& w) { return nlohmann::json::array({w.n, w.y}); }

ClassWeights weights_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

double entropy(const ClassWeights& w) noexcept {
  const double total = w.total();
  return plogp(w.n, total) + plogp(w.y, total);
}

DecisionTree::DecisionTree() : nodes_(1) {}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::vector<std::string> features, bool pruned)
    : nodes_(std::move(nodes)), features_(std::move(features)), pruned_(pruned) {
  if (nodes_.empty()) throw Error(ErrorCode::InvalidParameter, "tree needs at least one node");
  const auto count = static_cast<std::int32_t>(nodes_.size());
  std::vector<int> parents(nodes_.size(), 0);
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (node.right >= 0) throw Error(ErrorCode::InvalidParameter, "leaf with a right child");
      continue;
    }
    if (node.attribute.empty() || !std::isfinite(node.threshold)) {
      throw Error(ErrorCode::InvalidParameter, "internal node without a finite test");
    }
    if (node.right < 0 || node.left >= count || node.right >= count || node.left == 0 || node.right == 0) {
      throw Error(ErrorCode::InvalidParameter, "internal node with a bad child index");
    }
    if (!(node.left_fraction >= 0.0 && node.left_fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidParameter, "branch fraction outside [0, 1]");
    }
    ++parents[static_cast<std::size_t>(node.left)];
    ++parents[static_cast<std::size_t>(node.right)];
  }
  for (std::size_t i = 1; i < parents.size(); ++i) {
    if (parents[i] != 1) throw Error(ErrorCode::InvalidParameter, "node array is not a tree");
  }
}

std::size_t DecisionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<std::string> DecisionTree::attributes() const {
  std::vector<std::string> out;
  for (const auto& node : nodes_) {
    if (!node.is_leaf() && std::find(out.begin(), out.end(), node.attribute) == out.end()) {
      out.push_back(node.attribute);
    }
  }
  return out;
}

TrainParams::TrainParams(std::size_t min_leaf, std::optional<std::size_t> depth, double holdout,
                         std::size_t rounds_, std::uint64_t seed_)
    : min_leaf_instances(min_leaf), max_depth(depth), pruning_holdout_fraction(holdout), rounds(rounds_),
      seed(seed_) {
  validate();
}

void TrainParams::validate() const {
  if (min_leaf_instances < 1) throw Error(ErrorCode::InvalidParameter, "min_leaf_instances must be >= 1");
  if (!(pruning_holdout_fraction >= 0.0 && pruning_holdout_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "pruning_holdout_fraction must be in [0, 1)");
  }
  if (rounds < 1) throw Error(ErrorCode::InvalidParameter, "rounds must be >= 1");
}

TrainingSet TrainingSet::from_table(const AttributeTable& table, const std::string& target,
                                    const std::vector<std::string>& predictors) {
  if (table.empty()) throw Error(ErrorCode::EmptyDataset, "no rows to train on");
  const auto target_col = table.column_index(target);
  TrainingSet set;
  set.attributes = predictors.empty() ? continuous_columns(table, {target}) : predictors;
  if (set.attributes.empty()) {
    throw Error(ErrorCode::NoContinuousPredictors, "table has no continuous predictor columns");
  }
  for (const auto& name : set.attributes) {
    const auto col = table.column_index(name);
    if (table.columns()[col].kind != ColumnKind::continuous) {
      throw Error(ErrorCode::NonContinuousAttribute, "'" + name + "' is not continuous");
    }
    std::vector<double> values(table.row_count());
    for (std::size_t r = 0; r < table.row_count(); ++r) {
      values[r] = table.number(r, col).value_or(std::numeric_limits<double>::quiet_NaN());
    }
    set.columns.push_back(std::move(values));
  }
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto* text = std::get_if<std::string>(&table.at(r, target_col));
    const auto label = text ? parse_label(*text) : std::nullopt;
    if (!label) throw Error(ErrorCode::SchemeTableMismatch, "row '" + table.key(r) + "' has no Y/N target");
    set.labels.push_back(*label);
  }
  return set;
}

std::optional<SplitChoice> choose_split(const TrainingSet& data, std::span<const std::size_t> rows,
                                        std::span<const double> weights, std::size_t min_leaf) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) return std::nullopt;

  struct Candidate {
    std::size_t attribute;
    ThresholdScan scan;
  };
  std::vector<Candidate> candidates;
  for (std::size_t a = 0; a < data.attributes.size(); ++a) {
    auto scan = scan_attribute(data, a, rows, weights, total, static_cast<double>(min_leaf));
    if (scan.valid && scan.gain > kGainEpsilon) candidates.push_back({a, scan});
  }
  if (candidates.empty()) return std::nullopt;

  double mean_gain = 0.0;
  for (const auto& c : candidates) mean_gain += c.scan.gain;
  mean_gain /= static_cast<double>(candidates.size());

  std::optional<SplitChoice> best;
  for (const auto& c : candidates) {
    if (c.scan.gain < mean_gain - kGainEpsilon) continue;
    SplitStats stats;
    stats.gain = c.scan.gain;
    stats.split_info = plogp(c.scan.left, total) + plogp(c.scan.right, total) + plogp(c.scan.unknown, total);
    stats.gain_ratio = stats.split_info > 0.0 ? stats.gain / stats.split_info : 0.0;
    if (!best || stats.gain_ratio > best->stats.gain_ratio) best = SplitChoice{c.attribute, c.scan.threshold, stats};
  }
  return best;
}

DecisionTree grow_tree(const TrainingSet& data, std::span<const std::size_t> rows, std::span<const double> weights,
                       const TrainParams& params) {
  params.validate();
  if (rows.empty()) throw Error(ErrorCode::EmptyDataset, "no rows to grow a tree on");
  if (data.attributes.empty()) throw Error(ErrorCode::NoContinuousPredictors, "no predictors");
  Grower grower(data, params);
  grower.grow({rows.begin(), rows.end()}, {weights.begin(), weights.end()}, 0);
  return DecisionTree(grower.take(), data.attributes);
}

DecisionTree build_tree(const AttributeTable& table, const std::string& target, const TrainParams& params) {
  const auto data = TrainingSet::from_table(table, target);
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const std::vector<double> weights(data.rows(), 1.0);
  return grow_tree(data, rows, weights, params);
}

DecisionTree reduced_error_prune(const DecisionTree& tree, const TrainingSet& data,
                                 std::span<const std::size_t> rows, std::vector<std::string>* warnings) {
  if (rows.empty()) {
    if (warnings) warnings->push_back("empty pruning set; tree left unpruned");
    return tree;
  }
  Pruner pruner(tree, data);
  pruner.prune(0, {rows.begin(), rows.end()}, std::vector<double>(rows.size(), 1.0));
  return DecisionTree(pruner.compact(), tree.features(), true);
}

DecisionTree reduced_error_prune(const DecisionTree& tree, const AttributeTable& pruning_set,
                                 const std::string& target, std::vector<std::string>* warnings) {
  if (pruning_set.empty()) {
    if (warnings) warnings->push_back("empty pruning set; tree left unpruned");
    return tree;
  }
  const auto data = TrainingSet::from_table(pruning_set, target, tree.features().empty() ? tree.attributes()
                                                                                         : tree.features());
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return reduced_error_prune(tree, data, rows, warnings);
}

DecisionTree build_pruned_tree(const TrainingSet& data, const TrainParams& params,
                               std::vector<std::string>* warnings) {
  params.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "no rows to train on");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(round_seed(params.seed, 0));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

  const auto holdout = static_cast<std::size_t>(std::floor(static_cast<double>(n) * params.pruning_holdout_fraction));
  if (holdout == 0 || holdout >= n) {
    if (warnings && params.pruning_holdout_fraction > 0.0) {
      warnings->push_back("too few rows for a pruning holdout; tree left unpruned");
    }
    const std::vector<double> weights(n, 1.0);
    std::sort(order.begin(), order.end());
    return grow_tree(data, order, weights, params);
  }
  std::vector<std::size_t> grow_rows(order.begin(), order.end() - static_cast<std::ptrdiff_t>(holdout));
  std::vector<std::size_t> prune_rows(order.end() - static_cast<std::ptrdiff_t>(holdout), order.end());
  std::sort(grow_rows.begin(), grow_rows.end());
  std::sort(prune_rows.begin(), prune_rows.end());
  const std::vector<double> weights(grow_rows.size(), 1.0);
  return reduced_error_prune(grow_tree(data, grow_rows, weights, params), data, prune_rows, warnings);
}

double tree_error(const DecisionTree& tree, const TrainingSet& data, std::span<const std::size_t> rows) {
  double error = 0.0;
  const std::vector<double> mass(rows.size(), 1.0);
  route(tree.nodes(), 0, data, rows, mass, [&](std::size_t leaf, std::size_t row, double m) {
    if (tree.node(leaf).label != data.labels[row]) error += m;
  });
  return error;
}

std::string PathStep::render() const {
  const std::string t = format_threshold(threshold);
  if (!fractional) return attribute + (went_right ? " >= " : " < ") + t;
  const auto pct = [](double f) { return format_count(f * 100.0) + "%"; };
  return attribute + " not supplied (" + pct(fraction_left) + " of training data < " + t + ", " +
         pct(1.0 - fraction_left) + " >= " + t + ")";
}

TreePrediction predict(const DecisionTree& tree, const Instance& instance, std::vector<std::string>* warnings) {
  const auto& known = tree.features().empty() ? tree.attributes() : tree.features();
  for (const auto& [name, value] : instance) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::InvalidParameter, "value for '" + name + "' is not finite");
    }
    if (warnings && std::find(known.begin(), known.end(), name) == known.end()) {
      warnings->push_back("attribute '" + name + "' unknown to the model; ignored");
    }
  }
  ClassWeights acc;
  TreePrediction out;
  descend(tree, 0, instance, 1.0, acc, out.path);
  out.label = acc.majority();
  out.probability_y = acc.total() > 0.0 ? acc.y / acc.total() : 0.0;
  out.confidence = acc.total() > 0.0 ? acc.of(out.label) / acc.total() : 0.0;
  return out;
}

std::string render_tree(const DecisionTree& tree) {
  std::string out = tree.pruned() ? "REPTree\n=====\n" : "C4.5Tree\n=====\n";
  if (tree.root().is_leaf()) {
    out += ": " + leaf_annotation(tree.root()) + "\n";
  } else {
    render_node(tree, 0, 0, out);
  }
  out += "Size of the tree : " + std::to_string(tree.size()) + "\n";
  return out;
}

void to_json(nlohmann::json& j, const DecisionTree& tree) {
  auto nodes = nlohmann::json::array();
  for (const auto& node : tree.nodes()) {
    nlohmann::json n = {{"label", std::string(to_string(node.label))}, {"train", weights_json(node.train)}};
    if (node.prune) n["prune"] = weights_json(*node.prune);
    if (!node.is_leaf()) {
      n["attribute"] = node.attribute;
      n["threshold"] = node.threshold;
      n["left"] = node.left;
      n["right"] = node.right;
      n["left_fraction"] = node.left_fraction;
      n["gain"] = node.gain;
      n["gain_ratio"] = node.gain_ratio;
    }
    nodes.push_back(std::move(n));
  }
  j = {{"features", tree.features()}, {"pruned", tree.pruned()}, {"nodes", std::move(nodes)}};
}

void from_json(const nlohmann::json& j, DecisionTree& tree) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    const auto label = parse_label(n.at("label").get<std::string>());
    if (!label) throw Error(ErrorCode::CorruptBundle, "bad leaf label in tree");
    node.label = *label;
    node.train = weights_from(n.at("train"));
    if (n.contains("prune")) node.prune = weights_from(n.at("prune"));
    if (n.contains("attribute")) {
      node.attribute = n.at("attribute").get<std::string>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<std::int32_t>();
      node.right = n.at("right").get<std::int32_t>();
      node.left_fraction = n.at("left_fraction").get<double>();
      node.gain = n.at("gain").get<double>();
      node.gain_ratio = n.at("gain_ratio").get<double>();
    }
    nodes.push_back(std::move(node));
  }
  tree = DecisionTree(std::move(nodes), j.at("features").get<std::vector<std::string>>(), j.at("pruned").get<bool>());
}

void to_json(nlohmann::json& j, const TrainParams& params) {
  j = {{"min_leaf_instances", params.min_leaf_instances},
       {"max_depth", params.max_depth ? nlohmann::json(*params.max_depth) : nlohmann::json(nullptr)},
       {"pruning_holdout_fraction", params.pruning_holdout_fraction},
       {"rounds", params.rounds},
       {"seed", params.seed}};
}

void from_json(const nlohmann::json& j, TrainParams& params) {
  params.min_leaf_instances = j.at("min_leaf_instances").get<std::size_t>();
  params.max_depth = j.at("max_depth").is_null() ? std::nullopt
                                                   : std::optional<std::size_t>(j.at("max_depth").get<std::size_t>());
  params.pruning_holdout_fraction = j.at("pruning_holdout_fraction").get<double>();
  params.rounds = j.at("rounds").get<std::size_t>();
  params.seed = j.at("seed").get<std::uint64_t>();
  params.validate();
}

}  // namespace sprawl::tree
