#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sprawl/dtree.hpp"
#include "sprawl/error.hpp"
#include "sprawl/ingest/csv.hpp"
#include "sprawl/simd/kernels.hpp"

namespace sprawl::tree {
namespace {

constexpr double kPerfectError = 1e-10;

// Label a training row would receive, descending both ways on missing values.
Label classify_row(const DecisionTree& tree, const TrainingSet& data, std::size_t row) {
  ClassWeights acc;
  struct Frame {
    std::size_t index;
    double mass;
  };
  std::vector<Frame> stack{{0, 1.0}};
  while (!stack.empty()) {
    const auto [index, mass] = stack.back();
    stack.pop_back();
    const auto& node = tree.node(index);
    if (node.is_leaf()) {
      const double total = node.train.total();
      if (total > 0.0) {
        acc.n += mass * node.train.n / total;
        acc.y += mass * node.train.y / total;
      } else {
        acc.add(node.label, mass);
      }
      continue;
    }
    const auto it = std::find(data.attributes.begin(), data.attributes.end(), node.attribute);
    const double v = it == data.attributes.end()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : data.columns[static_cast<std::size_t>(it - data.attributes.begin())][row];
    if (std::isnan(v)) {
      if (node.left_fraction > 0.0) stack.push_back({static_cast<std::size_t>(node.left), mass * node.left_fraction});
      if (node.left_fraction < 1.0) {
        stack.push_back({static_cast<std::size_t>(node.right), mass * (1.0 - node.left_fraction)});
      }
    } else {
      stack.push_back({static_cast<std::size_t>(v < node.threshold ? node.left : node.right), mass});
    }
  }
  return acc.majority();
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

std::string_view to_string(EnsembleKind kind) noexcept {
  return kind == EnsembleKind::boosting ? "boosting" : "bagging";
}

void Ensemble::validate() const {
  if (members.empty()) throw Error(ErrorCode::InvalidParameter, "ensemble has no members");
  for (const auto& m : members) {
    if (kind == EnsembleKind::bagging && m.weight != 1.0) {
      throw Error(ErrorCode::InvalidParameter, "bagging member weight must be 1");
    }
    if (!std::isfinite(m.weight) || m.weight < 0.0) {
      throw Error(ErrorCode::InvalidParameter, "member weight must be finite and non-negative");
    }
  }
}

// splitmix64 over the pair.
std::uint64_t round_seed(std::uint64_t seed, std::size_t round) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(round) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::InvalidParameter, "uniform_index bound must be positive");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - ((max % bound) + 1) % bound;
  std::uint64_t x = rng();
  while (x > limit) x = rng();
  return x % bound;
}

Ensemble bagging_fit(const TrainingSet& data, const TrainParams& params, std::vector<std::string>* warnings) {
  params.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "no rows to train on");
  Ensemble ensemble;
  ensemble.kind = EnsembleKind::bagging;
  ensemble.seed = params.seed;
  for (std::size_t round = 1; round <= params.rounds; ++round) {
    std::mt19937_64 rng(round_seed(params.seed, round));
    std::vector<double> multiplicity(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) multiplicity[uniform_index(rng, n)] += 1.0;

    std::vector<std::size_t> in_bag, out_of_bag;
    std::vector<double> weights;
    for (std::size_t r = 0; r < n; ++r) {
      if (multiplicity[r] > 0.0) {
        in_bag.push_back(r);
        weights.push_back(multiplicity[r]);
      } else {
        out_of_bag.push_back(r);
      }
    }
    auto tree = grow_tree(data, in_bag, weights, params);
    ensemble.members.push_back({reduced_error_prune(tree, data, out_of_bag, warnings), 1.0});
  }
  return ensemble;
}

Ensemble bagging_fit(const AttributeTable& table, const std::string& target, const TrainParams& params) {
  return bagging_fit(TrainingSet::from_table(table, target), params);
}

double max_member_weight() noexcept { return std::log((1.0 - kPerfectError) / kPerfectError); }

Ensemble boosting_fit(const TrainingSet& data, const TrainParams& params, BoostingTrace* trace) {
  params.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw Error(ErrorCode::EmptyDataset, "no rows to train on");
  const auto& k = simd::kernels();
  const auto rows = all_rows(n);

  Ensemble ensemble;
  ensemble.kind = EnsembleKind::boosting;
  ensemble.seed = params.seed;
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<double> scaled(n);
  std::vector<std::uint8_t> wrong(n);

  for (std::size_t round = 0; round < params.rounds; ++round) {
    // Trees see weights in instance units so min_leaf keeps its meaning.
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n);
    auto tree = grow_tree(data, rows, scaled, params);
    for (std::size_t i = 0; i < n; ++i) wrong[i] = classify_row(tree, data, i) != data.labels[i] ? 1 : 0;
    const double error = k.masked_lane_sum(weights.data(), wrong.data(), n);
    if (trace) trace->errors.push_back(error);

    if (error <= 0.0) {
      ensemble.members.push_back({std::move(tree), max_member_weight()});
      if (trace) trace->weights.push_back(weights);
      break;
    }
    if (error >= 0.5) {
      // A first round this weak still leaves one voter.
      if (ensemble.members.empty()) ensemble.members.push_back({std::move(tree), 1.0});
      if (trace) trace->weights.push_back(weights);
      break;
    }
    const double beta = (1.0 - error) / error;
    ensemble.members.push_back({std::move(tree), std::log(beta)});
    k.masked_scale(weights.data(), wrong.data(), beta, n);
    const double total = k.lane_sum(weights.data(), n);
    for (auto& w : weights) w /= total;
    if (trace) trace->weights.push_back(weights);
  }
  return ensemble;
}

Ensemble boosting_fit(const AttributeTable& table, const std::string& target, const TrainParams& params,
                      BoostingTrace* trace) {
  return boosting_fit(TrainingSet::from_table(table, target), params, trace);
}

EnsemblePrediction ensemble_predict(const Ensemble& ensemble, const Instance& instance,
                                    std::vector<std::string>* warnings) {
  if (ensemble.members.empty()) throw Error(ErrorCode::NoModel, "ensemble has no members");
  EnsemblePrediction out;
  ClassWeights tally;
  for (std::size_t i = 0; i < ensemble.members.size(); ++i) {
    const auto& m = ensemble.members[i];
    auto p = predict(m.tree, instance, i == 0 ? warnings : nullptr);
    tally.add(p.label, m.weight);
    out.votes.push_back({i, m.weight, std::move(p)});
  }
  out.label = tally.majority();
  out.confidence = tally.total() > 0.0 ? tally.of(out.label) / tally.total() : 0.0;
  return out;
}

std::string render_ensemble(const Ensemble& ensemble) {
  std::string out;
  for (const auto& m : ensemble.members) {
    out += render_tree(m.tree);
    if (ensemble.kind == EnsembleKind::boosting) out += "Weight: " + ingest::format_number(m.weight) + "\n";
  }
  return out;
}

void to_json(nlohmann::json& j, const Ensemble& ensemble) {
  auto members = nlohmann::json::array();
  for (const auto& m : ensemble.members) members.push_back({{"weight", m.weight}, {"tree", m.tree}});
  j = {{"kind", std::string(to_string(ensemble.kind))}, {"seed", ensemble.seed}, {"members", std::move(members)}};
}

void from_json(const nlohmann::json& j, Ensemble& ensemble) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "bagging") {
    ensemble.kind = EnsembleKind::bagging;
  } else if (kind == "boosting") {
    ensemble.kind = EnsembleKind::boosting;
  } else {
    throw Error(ErrorCode::CorruptBundle, "unknown ensemble kind '" + kind + "'");
  }
  ensemble.seed = j.at("seed").get<std::uint64_t>();
  ensemble.members.clear();
  for (const auto& m : j.at("members")) {
    ensemble.members.push_back({m.at("tree").get<DecisionTree>(), m.at("weight").get<double>()});
  }
  ensemble.validate();
}

}  // namespace sprawl::tree
