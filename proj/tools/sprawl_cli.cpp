// sprawl: train, query and serve urban-sprawl decision-support models.

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sprawl/discretize.hpp"
#include "sprawl/error.hpp"
#include "sprawl/ingest/csv.hpp"
#include "sprawl/ingest/regions.hpp"
#include "sprawl/io.hpp"
#include "sprawl/mapviz.hpp"
#include "sprawl/rulemine.hpp"
#include "sprawl/sdss/engine.hpp"
#include "sprawl/sdss/pipeline.hpp"
#include "sprawl/sdss/service.hpp"

namespace {

using namespace sprawl;
using nlohmann::json;

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorCode::InvalidParameter, what + ": '" + text + "' is not a number");
  return v;
}

std::pair<std::string, std::string> split_pair(const std::string& text, const std::string& what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::InvalidParameter, what + " expects NAME=VALUE, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

// "Attr=1,2,3"
std::map<std::string, std::vector<double>> parse_cuts(const std::vector<std::string>& specs) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& spec : specs) {
    auto [name, list] = split_pair(spec, "--cut");
    std::vector<double> cuts;
    std::size_t start = 0;
    while (start <= list.size()) {
      const auto end = std::min(list.find(',', start), list.size());
      cuts.push_back(parse_double(list.substr(start, end - start), "--cut " + name));
      start = end + 1;
    }
    out[name] = std::move(cuts);
  }
  return out;
}

std::vector<AttributeTable> read_tables(const std::vector<std::string>& paths, const std::string& key,
                                        const std::string& target) {
  std::vector<AttributeTable> tables;
  for (const auto& p : paths) tables.push_back(ingest::parse_csv(read_text_file(p), key, target));
  return tables;
}

binning::Strategy strategy_from(const std::string& text) {
  const auto s = binning::parse_strategy(text);
  if (!s) throw Error(ErrorCode::InvalidParameter, "unknown binning strategy '" + text + "'");
  return *s;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct TrainOptions {
  std::vector<std::string> data;
  std::string key = "GEOID";
  std::string target = "Target";
  std::string method = "bagging";
  std::size_t rounds = 10;
  std::uint64_t seed = 1;
  std::size_t min_leaf = 2;
  std::size_t max_depth = 0;
  double holdout = 1.0 / 3.0;
  std::size_t bins = 3;
  std::string strategy = "equal-frequency";
  std::vector<std::string> cuts;
  bool per_year = false;
  double min_support = 0.2;
  double min_confidence = 0.7;
  std::string units;
  std::string out = "bundle.json";
  bool quiet = false;
};

int run_train(const TrainOptions& o) {
  sdss::TrainingConfig config;
  config.method = o.method;
  config.target_column = o.target;
  config.params = tree::TrainParams(o.min_leaf, o.max_depth ? std::optional<std::size_t>(o.max_depth) : std::nullopt,
                                    o.holdout, o.rounds, o.seed);
  config.bins_per_attribute = o.bins;
  config.strategy = strategy_from(o.strategy);
  config.explicit_cuts = parse_cuts(o.cuts);
  config.per_year_binning = o.per_year;
  config.min_support = o.min_support;
  config.min_confidence = o.min_confidence;
  if (!o.units.empty()) config.units = json::parse(read_text_file(o.units)).get<std::map<std::string, std::string>>();

  std::vector<std::string> warnings;
  const auto bundle = sdss::train_bundle(read_tables(o.data, o.key, o.target), config, &warnings);
  print_warnings(warnings);
  sdss::save_bundle(bundle, o.out);
  if (!o.quiet) {
    std::cout << (bundle.ensemble ? tree::render_ensemble(*bundle.ensemble) : tree::render_tree(*bundle.single_tree));
  }
  std::cerr << "wrote " << o.out << " (" << bundle.rules.size() << " rules, " << bundle.training_rows << " rows)\n";
  return 0;
}

struct MineOptions {
  std::string transactions;
  std::vector<std::string> data;
  std::string key = "GEOID";
  std::string target = "Target";
  std::size_t bins = 3;
  std::string strategy = "equal-frequency";
  std::vector<std::string> cuts;
  double min_support = 0.2;
  double min_confidence = 0.7;
  std::string filter;
  std::string json_out;
  bool count_only = false;
};

int run_mine(const MineOptions& o) {
  binning::TokenizedDataset tokens;
  if (!o.transactions.empty()) {
    tokens = binning::parse_transactions(read_text_file(o.transactions));
  } else if (!o.data.empty()) {
    const auto table = sdss::stack_years(read_tables(o.data, o.key, o.target));
    std::vector<std::string> warnings;
    const auto scheme = binning::fit_binning(table, continuous_columns(table, {o.target}), o.bins,
                                             strategy_from(o.strategy), parse_cuts(o.cuts), &warnings);
    print_warnings(warnings);
    tokens = binning::tokenize(table, scheme, o.target);
  } else {
    throw Error(ErrorCode::InvalidParameter, "mine-rules needs --transactions or --data");
  }
  auto rules = rules::generate_rules(rules::frequent_itemsets(tokens, o.min_support), o.min_confidence);
  if (!o.filter.empty()) rules = rules::filter_rules(rules, rules::parse_rule_filter(o.filter));
  if (!o.json_out.empty()) write_text_file(o.json_out, json(rules).dump(1) + "\n");
  if (o.count_only) {
    std::cout << rules.size() << "\n";
  } else {
    std::cout << rules::render_rule_list(rules) << "\n";
  }
  return 0;
}

struct ServeOptions {
  std::string bundle;
  std::string bind = "127.0.0.1:8080";
  std::string shp;
  std::vector<std::string> labels;  // YEAR=PATH
};

int run_serve(const ServeOptions& o) {
  std::string bind = o.bind;
  if (const char* env = std::getenv("SPRAWL_BIND"); env && *env) bind = env;
  const auto [host, port] = sdss::parse_bind_address(bind);

  std::map<int, ingest::LabeledRegionSet> maps;
  for (const auto& spec : o.labels) {
    if (o.shp.empty()) throw Error(ErrorCode::InvalidParameter, "--labels needs --shp");
    const auto [year, path] = split_pair(spec, "--labels");
    ingest::RegionFiles files;
    files.shp = o.shp;
    files.labels = path;
    const int y = static_cast<int>(parse_double(year, "--labels year"));
    maps.emplace(y, ingest::load_region_set(files, y));
  }
  auto service = std::make_shared<const sdss::Service>(sdss::load_bundle(o.bundle), std::move(maps));

  // Block the stop signals before the server thread starts so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  sdss::HttpServer server(service);
  const int bound = server.start(host, port);
  std::cout << "serving on " << host << ":" << bound << std::endl;
  int received = 0;
  sigwait(&stop_signals, &received);
  server.stop();
  return 0;
}

int run_predict(const std::string& bundle_path, const std::vector<std::string>& assignments) {
  const auto bundle = sdss::load_bundle(bundle_path);
  sdss::Assignment assignment;
  for (const auto& a : assignments) {
    const auto [name, value] = split_pair(a, "predict");
    assignment[name] = parse_double(value, name);
  }
  std::cout << json(sdss::predict_sprawl(bundle, assignment)).dump(2) << "\n";
  return 0;
}

int run_impact(const std::string& bundle_path, const std::vector<std::string>& args) {
  if (args.size() < 2 || args.size() > 3) {
    throw Error(ErrorCode::InvalidParameter, "impact expects A B [A=value]");
  }
  const auto bundle = sdss::load_bundle(bundle_path);
  std::optional<double> value;
  if (args.size() == 3) {
    const auto [name, text] = split_pair(args[2], "impact");
    if (name != args[0]) throw Error(ErrorCode::InvalidQuery, "value must be given for " + args[0]);
    value = parse_double(text, name);
  }
  const auto report = sdss::query_impact(bundle, args[0], args[1], value);
  std::cout << json(report).dump(2) << "\n";
  return 0;
}

int run_export_map(int year, const ingest::RegionFiles& files, const std::string& out) {
  const auto regions = ingest::load_region_set(files, year);
  write_text_file(out, mapviz::export_geojson_text(regions) + "\n");
  std::cerr << "wrote " << regions.geometries.size() << " features to " << out << "\n";
  return 0;
}

int run_diff(const ingest::RegionFiles& a, const ingest::RegionFiles& b) {
  const auto changes = mapviz::diff_years(ingest::load_region_set(a, 0), ingest::load_region_set(b, 0));
  for (const auto& c : changes) {
    std::cout << c.key << " " << c.name << " " << to_string(c.from) << " -> " << to_string(c.to) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Urban sprawl decision support toolkit"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Fit binning, rules and trees; write a model bundle");
  t->add_option("--data", train.data, "Attribute CSV, one per year")->required();
  t->add_option("--key", train.key, "Key column");
  t->add_option("--target", train.target, "Y/N target column");
  t->add_option("--method", train.method, "tree | bagging | boosting")
      ->check(CLI::IsMember({"tree", "bagging", "boosting"}));
  t->add_option("--rounds", train.rounds, "Ensemble rounds");
  t->add_option("--seed", train.seed, "Random seed");
  t->add_option("--min-leaf", train.min_leaf, "Minimum instances per leaf");
  t->add_option("--max-depth", train.max_depth, "Depth cap (0 = none)");
  t->add_option("--holdout", train.holdout, "Pruning holdout fraction for the single tree");
  t->add_option("--bins", train.bins, "Bins per attribute");
  t->add_option("--strategy", train.strategy, "equal-frequency | equal-width | explicit");
  t->add_option("--cut", train.cuts, "Explicit cuts, Attr=c1,c2,...");
  t->add_flag("--per-year-binning", train.per_year, "Fit bins on each year separately");
  t->add_option("--min-support", train.min_support, "Minimum rule support");
  t->add_option("--min-confidence", train.min_confidence, "Minimum rule confidence");
  t->add_option("--units", train.units, "JSON map of attribute units");
  t->add_option("--out", train.out, "Bundle path");
  t->add_flag("--quiet", train.quiet, "Do not print the trees");

  MineOptions mine;
  auto* m = app.add_subcommand("mine-rules", "Mine association rules");
  m->add_option("--transactions", mine.transactions, "Basket file, one transaction per line");
  m->add_option("--data", mine.data, "Attribute CSV, one per year");
  m->add_option("--key", mine.key, "Key column");
  m->add_option("--target", mine.target, "Y/N target column");
  m->add_option("--bins", mine.bins, "Bins per attribute");
  m->add_option("--strategy", mine.strategy, "equal-frequency | equal-width | explicit");
  m->add_option("--cut", mine.cuts, "Explicit cuts, Attr=c1,c2,...");
  m->add_option("--min-support", mine.min_support, "Minimum support");
  m->add_option("--min-confidence", mine.min_confidence, "Minimum confidence");
  m->add_option("--filter", mine.filter, "Rule filter, e.g. lhs:BirthRate,rhs:Target");
  m->add_option("--json", mine.json_out, "Also write the rules as JSON");
  m->add_flag("--count", mine.count_only, "Print only the rule count");

  ServeOptions serve;
  auto* s = app.add_subcommand("serve", "Serve the HTTP API (SPRAWL_BIND overrides --bind)");
  s->add_option("--bundle", serve.bundle, "Model bundle")->required();
  s->add_option("--bind", serve.bind, "host:port");
  s->add_option("--shp", serve.shp, "County shapefile for /api/map");
  s->add_option("--labels", serve.labels, "YEAR=labels.csv, repeatable");

  std::string bundle_path;
  std::vector<std::string> assignments;
  auto* p = app.add_subcommand("predict", "Predict sprawl for key=value conditions");
  p->add_option("--bundle", bundle_path, "Model bundle")->required();
  p->add_option("conditions", assignments, "Attribute=value");

  std::vector<std::string> impact_args;
  auto* i = app.add_subcommand("impact", "Rules linking attribute A to attribute B");
  i->add_option("--bundle", bundle_path, "Model bundle")->required();
  i->add_option("args", impact_args, "A B [A=value]")->required();

  int year = 0;
  ingest::RegionFiles files;
  std::string map_out;
  auto* e = app.add_subcommand("export-map", "Write a choropleth GeoJSON for one year");
  e->add_option("--year", year, "Year")->required();
  e->add_option("--shp", files.shp, "County shapefile")->required();
  e->add_option("--dbf", files.dbf, "Attribute sidecar (default: shapefile with .dbf)");
  e->add_option("--labels", files.labels, "Labels CSV")->required();
  e->add_option("--key-field", files.key_field, "Key field in the DBF and labels");
  e->add_option("--name-field", files.name_field, "Name field in the DBF");
  e->add_option("--label-column", files.label_column, "Y/N column in the labels CSV");
  e->add_option("--out", map_out, "Output path")->required();

  ingest::RegionFiles from_files, to_files;
  auto* d = app.add_subcommand("diff-years", "List counties whose label changed between two years");
  d->add_option("--shp", from_files.shp, "County shapefile")->required();
  d->add_option("--from", from_files.labels, "Earlier labels CSV")->required();
  d->add_option("--to", to_files.labels, "Later labels CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*t) return run_train(train);
    if (*m) return run_mine(mine);
    if (*s) return run_serve(serve);
    if (*p) return run_predict(bundle_path, assignments);
    if (*i) return run_impact(bundle_path, impact_args);
    if (*e) return run_export_map(year, files, map_out);
    if (*d) {
      to_files.shp = from_files.shp;
      return run_diff(from_files, to_files);
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
