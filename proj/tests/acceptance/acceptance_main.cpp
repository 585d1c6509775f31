// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "httplib.h"
#include "scenarios.hpp"
#include "sprawl/dtree.hpp"
#include "sprawl/error.hpp"
#include "sprawl/ingest/dbf.hpp"
#include "sprawl/ingest/shapefile.hpp"
#include "sprawl/io.hpp"
#include "sprawl/mapviz.hpp"
#include "sprawl/rulemine.hpp"
#include "sprawl/sdss/engine.hpp"

using namespace sprawl;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) detail << what;
    ok = ok && condition;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
bool raises(Fn&& fn, ErrorCode code) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

void apriori_oracle(Outcome& out) {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tx = fixtures::random_baskets(rng);
    const double min_support = 0.1 * static_cast<double>(1 + trial % 9);
    const auto expected = fixtures::brute_force_itemsets(tx, min_support);
    const auto got = rules::frequent_itemsets(tx, min_support);
    bool same = got.size() == expected.size();
    for (const auto& fi : got) {
      const auto it = expected.find(fi.items);
      same = same && it != expected.end() && it->second == fi.support_count;
    }
    out.expect(same, "dataset " + std::to_string(trial) + " differs from enumeration");
  }
  const double elapsed = seconds_since(start);
  out.expect(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  out.detail << "200 datasets in " << elapsed << " s";
}

void check_rules(Outcome& out, const binning::TokenizedDataset& data, double min_support, double min_confidence,
                 const std::string& name) {
  const auto rules = rules::generate_rules(rules::frequent_itemsets(data, min_support), min_confidence);
  const double n = static_cast<double>(data.transactions.size());
  for (const auto& r : rules) {
    auto joint = r.antecedent;
    joint.insert(joint.end(), r.consequent.begin(), r.consequent.end());
    const auto both = fixtures::count_containing(data.transactions, joint);
    const auto lhs = fixtures::count_containing(data.transactions, r.antecedent);
    const double support = static_cast<double>(both) / n;
    const double confidence = static_cast<double>(both) / static_cast<double>(lhs);
    out.expect(std::abs(support - r.support) <= 1e-12 && std::abs(confidence - r.confidence) <= 1e-12,
               name + ": " + rules::render_rule(r) + " disagrees with a recount");
    out.expect(r.support >= min_support && r.confidence >= min_confidence,
               name + ": " + rules::render_rule(r) + " misses a threshold");
  }
  out.detail << name << " " << rules.size() << " rules; ";
}

binning::TokenizedDataset tokens_of(const AttributeTable& table, const std::map<std::string, std::vector<double>>& cuts,
                                    std::size_t bins = 3) {
  const auto attrs = continuous_columns(table, {"Target"});
  const auto strategy = cuts.empty() ? binning::Strategy::equal_frequency : binning::Strategy::explicit_cuts;
  const auto scheme = binning::fit_binning(table, attrs, bins, strategy, cuts);
  return binning::tokenize(table, scheme, "Target");
}

void rule_soundness(Outcome& out) {
  const auto fig7 = tokens_of(fixtures::figure7_table(), fixtures::figure7_cuts());
  check_rules(out, fig7, 0.2, 0.7, "figure7");
  check_rules(out, tokens_of(fixtures::housing_table(), {{"HousingUnits", {50000, 100000}}, {"ElectricHeating", {20000, 40000}}}),
              0.2, 0.7, "housing");
  check_rules(out, tokens_of(fixtures::density_table(), {}), 0.2, 0.7, "density");
  check_rules(out, tokens_of(sdss::stack_years(fixtures::ny_tables()), {}), 0.2, 0.7, "ny");

  const auto rules = rules::generate_rules(rules::frequent_itemsets(fig7, 0.2), 0.7);
  const std::string wanted = "BirthRate_Range2 -> GasolineStations_Range2 Target_Sprawl";
  const bool found = std::any_of(rules.begin(), rules.end(),
                                 [&](const rules::AssociationRule& r) { return rules::render_rule(r) == wanted; });
  out.expect(found, "figure 7 rule not rendered");
  out.detail << "\"" << wanted << "\" " << (found ? "found" : "missing");
}

void entropy_oracle(Outcome& out) {
  std::mt19937_64 rng(5150);
  std::size_t nodes = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 19;
    const auto data = fixtures::random_training_set(rng, n, 1 + rng() % 3);
    const auto rows = fixtures::iota_rows(n);
    const std::vector<double> w(n, 1.0);
    const auto split = tree::choose_split(data, rows, w, 1);
    if (!split) continue;
    std::vector<double> values = data.columns[split->attribute];
    const auto oracle = fixtures::brute_split(values, data.labels, split->threshold);
    out.expect(std::abs(oracle.gain - split->stats.gain) <= 1e-9, "gain differs at trial " + std::to_string(trial));
    out.expect(std::abs(oracle.gain_ratio - split->stats.gain_ratio) <= 1e-9,
               "gain ratio differs at trial " + std::to_string(trial));
    ++nodes;
  }
  const auto four = fixtures::training_set({"A"}, {{1}, {2}, {3}, {4}}, {'N', 'N', 'Y', 'Y'});
  const auto split = tree::choose_split(four, fixtures::iota_rows(4), std::vector<double>(4, 1.0), 1);
  out.expect(split && split->stats.gain == 1.0 && split->threshold == 2.5, "four-row gain is not exactly 1");
  out.detail << nodes << " splits within 1e-9; four-row gain " << (split ? split->stats.gain : -1.0);
}

void tree_golden(Outcome& out) {
  const auto fx = fixtures::figure9_tables();
  const auto grown = tree::build_tree(fx.train, "Target", fixtures::figure9_params());
  const auto text = tree::render_tree(tree::reduced_error_prune(grown, fx.prune, "Target"));
  const auto golden = read_text_file(fixtures::golden_dir() / "figure9_tree.txt");
  out.expect(text.find("TotalPersonalIncome < 11713160\n") != std::string::npos, "root test differs");
  out.expect(text.find(": Y (19/0)") != std::string::npos, "(19/0) leaf missing");
  out.expect(text.find("Size of the tree : 5\n") != std::string::npos, "size line missing");
  out.expect(text == golden, "rendering differs from golden");
  out.detail << "root \"TotalPersonalIncome < 11713160\", matches golden";
}

void pruning_property(Outcome& out) {
  std::mt19937_64 rng(808);
  std::size_t collapsed = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const std::size_t n = 30 + rng() % 60;
    auto data = fixtures::random_training_set(rng, n, 1 + rng() % 4);
    std::vector<std::size_t> grow_rows, prune_rows;
    for (std::size_t r = 0; r < n; ++r) (rng() % 3 == 0 ? prune_rows : grow_rows).push_back(r);
    tree::TrainParams params;
    params.min_leaf_instances = 1;
    const auto t = tree::grow_tree(data, grow_rows, std::vector<double>(grow_rows.size(), 1.0), params);
    const auto pruned = tree::reduced_error_prune(t, data, prune_rows);
    const double before = tree::tree_error(t, data, prune_rows);
    const double after = tree::tree_error(pruned, data, prune_rows);
    out.expect(after <= before + 1e-9, "pair " + std::to_string(pair) + " error rose");
    collapsed += t.size() - pruned.size();
  }
  out.detail << "100 pairs, " << collapsed << " nodes removed in total";
}

void ensemble_invariants(Outcome& out) {
  const auto data = tree::TrainingSet::from_table(sdss::stack_years(fixtures::ny_tables()), "Target");
  tree::TrainParams params;
  params.rounds = 10;
  params.seed = 42;
  out.expect(tree::bagging_fit(data, params) == tree::bagging_fit(data, params), "bagging not reproducible");

  std::mt19937_64 rng(66);
  std::size_t rounds = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto noisy = fixtures::random_training_set(rng, 60, 3);
    tree::TrainParams p;
    p.rounds = 20;
    p.max_depth = 2;
    p.seed = static_cast<std::uint64_t>(trial);
    tree::BoostingTrace trace;
    const auto e = tree::boosting_fit(noisy, p, &trace);
    out.expect(e == tree::boosting_fit(noisy, p), "boosting not reproducible");
    for (const auto& w : trace.weights) {
      double sum = 0.0;
      for (double x : w) sum += x;
      out.expect(std::abs(sum - 1.0) <= 1e-12, "weights sum to " + std::to_string(sum));
      ++rounds;
    }
  }
  tree::TrainParams p;
  p.rounds = 10;
  p.min_leaf_instances = 1;
  tree::BoostingTrace trace;
  const auto perfect = tree::boosting_fit(fixtures::training_set({"A"}, {{1}, {2}, {3}, {4}}, {'N', 'N', 'Y', 'Y'}), p, &trace);
  out.expect(perfect.members.size() == 1 && trace.errors == std::vector<double>{0.0}, "no early stop at zero error");
  out.detail << "seeded refits identical; " << rounds << " boosting rounds normalised; zero-error stop after 1 round";
}

void scenario_goldens(Outcome& out) {
  const auto p = sdss::predict_sprawl(fixtures::density_bundle(), {{"PopulationDensity", 54545}});
  const bool cites = std::any_of(p.explanation.begin(), p.explanation.end(),
                                 [](const std::string& s) { return s.find("420") != std::string::npos; });
  out.expect(p.label == Label::Y, "density scenario did not predict Y");
  out.expect(cites, "explanation lacks 420");
  const auto r = sdss::query_impact(fixtures::housing_bundle(), "HousingUnits", "ElectricHeating", 76767);
  out.expect(r.headline == std::optional<std::string>("less than 20,000"), "impact headline differs");
  out.detail << "predict " << to_string(p.label) << " (" << (p.explanation.empty() ? "" : p.explanation.front())
             << "); impact \"" << r.headline.value_or("none") << "\"";
}

void parser_fixtures(Outcome& out) {
  using namespace ingest;
  const auto shp = fixtures::ShpBuilder{}.polygon({fixtures::square(-73.5, 40.5, 0.25)}).null_shape().bytes();
  const auto shapes = parse_shapefile(shp);
  out.expect(shapes.size() == 1 && shapes[0].rings.size() == 1 && shapes[0].rings[0].size() == 5 &&
                 shapes[0].rings[0].front() == shapes[0].rings[0].back(),
             "square fixture decoded wrongly");
  out.expect(parse_shapefile(fixtures::ShpBuilder{}.bytes()).empty(), "empty shapefile not empty");

  auto bad_magic = shp;
  std::fill(bad_magic.begin(), bad_magic.begin() + 4, std::byte{0});
  out.expect(raises([&] { parse_shapefile(bad_magic); }, ErrorCode::BadMagic), "bad magic accepted");
  auto cut = shp;
  cut.resize(cut.size() - 20);
  out.expect(raises([&] { parse_shapefile(cut); }, ErrorCode::Truncated), "truncation accepted");
  out.expect(raises([&] { parse_shapefile(fixtures::ShpBuilder{}.shape_type(3, {fixtures::square(0, 0, 1)}).bytes()); },
                    ErrorCode::UnsupportedShapeType),
             "point shape accepted");

  fixtures::DbfBuilder dbf({{"NAME", 'C', 10}});
  dbf.record({"Suffolk"});
  const auto table = parse_dbf(dbf.bytes());
  out.expect(table.row_count() == 1 && std::get<std::string>(table.at(0, 0)) == "Suffolk", "dbf fixture decoded wrongly");
  out.expect(raises([&] { parse_dbf(dbf.bytes(1)); }, ErrorCode::HeaderMismatch), "dbf length mismatch accepted");
  auto short_dbf = dbf.bytes();
  short_dbf.resize(short_dbf.size() - 5);
  out.expect(raises([&] { parse_dbf(short_dbf); }, ErrorCode::Truncated), "short dbf accepted");
  out.expect(raises([&] { parse_dbf(fixtures::DbfBuilder({{"X", 'Z', 3}}).bytes()); }, ErrorCode::BadFieldType),
             "bad field type accepted");

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coord(-179.9, 179.9);
  std::size_t trips = 0;
  for (int i = 0; i < 50; ++i) {
    Ring ring;
    for (int k = 0; k < 6; ++k) ring.push_back({coord(rng), coord(rng) / 2});
    ring.push_back(ring.front());
    const auto back = parse_shapefile(fixtures::ShpBuilder{}.polygon({ring}).bytes());
    bool exact = back.size() == 1 && back[0].rings[0].size() == ring.size();
    for (std::size_t k = 0; exact && k < ring.size(); ++k) {
      exact = std::bit_cast<std::uint64_t>(back[0].rings[0][k].lon) == std::bit_cast<std::uint64_t>(ring[k].lon) &&
              std::bit_cast<std::uint64_t>(back[0].rings[0][k].lat) == std::bit_cast<std::uint64_t>(ring[k].lat);
    }
    out.expect(exact, "round trip " + std::to_string(i) + " not bit exact");
    trips += exact ? 1 : 0;
  }
  out.detail << "fixtures decoded, 4 error fixtures raised, " << trips << "/50 round trips bit exact";
}

void map_claims(Outcome& out) {
  const auto a = fixtures::ny_regions(2000);
  const auto b = fixtures::ny_regions(2010);
  const auto changes = mapviz::diff_years(a, b);
  std::set<std::string> names;
  bool all_n_to_y = true;
  for (const auto& c : changes) {
    names.insert(c.name);
    all_n_to_y = all_n_to_y && c.from == Label::N && c.to == Label::Y;
  }
  out.expect(changes.size() == 5, "diff has " + std::to_string(changes.size()) + " entries");
  out.expect(all_n_to_y, "a change is not N to Y");
  out.expect(names.count("Putnam") && names.count("Orange") && names.count("Dutchess"), "named counties missing");
  for (const auto* set : {&a, &b}) {
    const auto parsed = nlohmann::json::parse(mapviz::export_geojson_text(*set));
    out.expect(parsed["features"].size() == 62, "year " + std::to_string(set->year) + " feature count");
  }
  std::string listed;
  for (const auto& n : names) listed += (listed.empty() ? "" : ", ") + n;
  out.detail << changes.size() << " changes N->Y (" << listed << "); 62 features per year";
}

struct Child {
  pid_t pid = -1;
  FILE* stdout_pipe = nullptr;
};

Child spawn(const std::vector<std::string>& args, bool capture) {
  int fds[2] = {-1, -1};
  if (capture && pipe(fds) != 0) throw std::runtime_error("pipe failed");
  const pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    if (capture) {
      dup2(fds[1], STDOUT_FILENO);
      close(fds[0]);
      close(fds[1]);
    } else if (FILE* null = std::fopen("/dev/null", "w")) {
      dup2(fileno(null), STDOUT_FILENO);
    }
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execv(argv[0], argv.data());
    _exit(127);
  }
  Child child{pid, nullptr};
  if (capture) {
    close(fds[1]);
    child.stdout_pipe = fdopen(fds[0], "r");
  }
  return child;
}

int wait_exit(pid_t pid) {
  int status = 0;
  waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void end_to_end(Outcome& out) {
  const std::string cli = SPRAWL_CLI_PATH;
  const auto dir = std::filesystem::temp_directory_path() / ("sprawl_e2e_" + std::to_string(getpid()));
  std::filesystem::create_directories(dir);
  const auto bundle_path = (dir / "bundle.json").string();
  const auto d = fixtures::data_dir();

  const auto start = Clock::now();
  const int train = wait_exit(spawn({cli, "train", "--data", (d / "ny_2000.csv").string(), "--data",
                                     (d / "ny_2010.csv").string(), "--method", "bagging", "--rounds", "10", "--seed",
                                     "42", "--out", bundle_path, "--quiet"},
                                    false)
                                  .pid);
  out.expect(train == 0, "train exited " + std::to_string(train));
  const int mine = wait_exit(spawn({cli, "mine-rules", "--data", (d / "ny_2010.csv").string(), "--min-support", "0.2",
                                    "--min-confidence", "0.7", "--count"},
                                   false)
                                 .pid);
  out.expect(mine == 0, "mine-rules exited " + std::to_string(mine));
  if (!out.ok) return;

  auto server = spawn({cli, "serve", "--bundle", bundle_path, "--bind", "127.0.0.1:0", "--shp",
                       (d / "ny_counties.shp").string(), "--labels", "2000=" + (d / "ny_labels_2000.csv").string(),
                       "--labels", "2010=" + (d / "ny_labels_2010.csv").string()},
                      true);
  char line[256] = {};
  int port = -1;
  if (std::fgets(line, sizeof line, server.stdout_pipe)) {
    const std::string text = line;
    port = std::atoi(text.substr(text.rfind(':') + 1).c_str());
  }
  out.expect(port > 0, "server did not report a port");

  const std::string body = R"({"PopulationDensity": 54545, "TotalPersonalIncome": 9000000})";
  nlohmann::json over_http;
  if (port > 0) {
    httplib::Client client("127.0.0.1", port);
    const auto res = client.Post("/api/predict", body, "application/json");
    out.expect(res && res->status == 200, "predict request failed");
    if (res) over_http = nlohmann::json::parse(res->body);
    const auto map = client.Get("/api/map/2010.geojson");
    out.expect(map && map->status == 200, "map request failed");
  }
  kill(server.pid, SIGTERM);
  const int served = wait_exit(server.pid);
  std::fclose(server.stdout_pipe);
  const double elapsed = seconds_since(start);

  const auto bundle = sdss::load_bundle(bundle_path);
  const nlohmann::json in_process = sdss::predict_sprawl(bundle, {{"PopulationDensity", 54545}, {"TotalPersonalIncome", 9000000}});
  out.expect(over_http == in_process, "HTTP prediction differs from in-process");
  out.expect(served == 0, "server exited " + std::to_string(served));
  out.expect(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  std::filesystem::remove_all(dir);
  out.detail << "train + mine-rules + serve in " << elapsed << " s; HTTP predict "
             << over_http.value("label", std::string("?")) << " equals in-process";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"apriori oracle equivalence", apriori_oracle},
      {"rule soundness", rule_soundness},
      {"entropy/gain oracle", entropy_oracle},
      {"tree golden", tree_golden},
      {"pruning property", pruning_property},
      {"ensemble determinism and boosting invariants", ensemble_invariants},
      {"scenario goldens", scenario_goldens},
      {"parser fixtures", parser_fixtures},
      {"map claims", map_claims},
      {"end to end", end_to_end},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail << " threw: " << e.what();
    }
    failures += out.ok ? 0 : 1;
    std::cout << (out.ok ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << out.detail.str()
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures;
}
