#include <filesystem>

#include "check_error.hpp"
#include "doctest.h"
#include "httplib.h"
#include "scenarios.hpp"
#include "sprawl/io.hpp"
#include "sprawl/mapviz.hpp"
#include "sprawl/sdss/engine.hpp"
#include "sprawl/sdss/service.hpp"

using namespace sprawl;
using namespace sprawl::sdss;

namespace {

bool mentions(const std::vector<std::string>& lines, std::string_view needle) {
  return std::any_of(lines.begin(), lines.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

const ModelBundle& ny() {
  static const ModelBundle bundle = fixtures::ny_bundle();
  return bundle;
}

}  // namespace

TEST_SUITE("bundle") {
  TEST_CASE("round trip is exact") {
    const auto text = serialize_bundle(ny());
    const auto back = parse_bundle(text);
    CHECK(back == ny());
    CHECK(serialize_bundle(back) == text);

    const auto path = std::filesystem::temp_directory_path() / "sprawl_unit_bundle.json";
    save_bundle(ny(), path);
    CHECK(load_bundle(path) == ny());
    std::filesystem::remove(path);
  }

  TEST_CASE("tampering is detected") {
    auto text = serialize_bundle(fixtures::housing_bundle());
    const auto at = text.find("\"confidence\"");
    REQUIRE(at != std::string::npos);
    const auto digit = text.find_first_of("0123456789", at);
    text[digit] = text[digit] == '1' ? '2' : '1';
    CHECK_ERROR_CODE(parse_bundle(text), ErrorCode::CorruptBundle);
    CHECK_ERROR_CODE(parse_bundle("{not json"), ErrorCode::CorruptBundle);
    CHECK_ERROR_CODE(parse_bundle("{}"), ErrorCode::CorruptBundle);
    CHECK_ERROR_CODE(load_bundle("/nonexistent/bundle.json"), ErrorCode::Io);
  }

  TEST_CASE("future version names both versions") {
    auto doc = nlohmann::json::parse(serialize_bundle(fixtures::density_bundle()));
    doc["format_version"] = 7;
    try {
      parse_bundle(doc.dump());
      FAIL("expected VersionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::VersionMismatch);
      const std::string what = e.what();
      CHECK(what.find('7') != std::string::npos);
      CHECK(what.find('1') != std::string::npos);
    }
  }

  TEST_CASE("metadata covers every referenced attribute") {
    auto b = fixtures::density_bundle();
    CHECK_NOTHROW(b.validate());
    b.attributes.pop_back();
    CHECK_ERROR_CODE(b.validate(), ErrorCode::InvalidParameter);
  }

  TEST_CASE("fingerprint follows the data") {
    const auto tables = fixtures::ny_tables();
    CHECK(dataset_fingerprint(tables[0]) == dataset_fingerprint(tables[0]));
    CHECK(dataset_fingerprint(tables[0]) != dataset_fingerprint(tables[1]));
    CHECK(ny().dataset_fingerprint == dataset_fingerprint(stack_years(tables)));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("methods") {
    CHECK_FALSE(fixtures::density_bundle("tree").ensemble);
    CHECK(fixtures::density_bundle("bagging").ensemble->kind == tree::EnsembleKind::bagging);
    CHECK(fixtures::density_bundle("boosting").ensemble->kind == tree::EnsembleKind::boosting);
    sdss::TrainingConfig bad;
    bad.method = "forest";
    CHECK_ERROR_CODE(train_bundle({fixtures::density_table()}, bad), ErrorCode::InvalidParameter);
  }

  TEST_CASE("stacked keys stay unique") {
    const auto t = fixtures::density_table();
    const auto stacked = stack_years({t, t});
    CHECK(stacked.row_count() == 2 * t.row_count());
    CHECK(stacked.find_row("r0@1"));
  }

  TEST_CASE("ny bundle") {
    CHECK(ny().training_rows == 124);
    CHECK(ny().attributes.size() == 27);
    CHECK(ny().ensemble->members.size() == 10);
    CHECK_FALSE(ny().rules.empty());
    for (const auto& e : ny().binning.entries()) CHECK(e.bin_count() <= 3);
  }

  TEST_CASE("ny bagging golden") {
    const auto data = tree::TrainingSet::from_table(stack_years(fixtures::ny_tables()), "Target");
    tree::TrainParams params;
    params.rounds = 10;
    params.seed = 42;
    const auto text = tree::render_ensemble(tree::bagging_fit(data, params));
    CHECK(text == read_text_file(fixtures::golden_dir() / "ny_bagging_seed42.txt"));
    CHECK(text == tree::render_ensemble(*ny().ensemble));
  }
}

TEST_SUITE("engine") {
  TEST_CASE("density above 420 predicts sprawl") {
    const auto b = fixtures::density_bundle();
    REQUIRE(b.single_tree);
    CHECK(b.single_tree->root().threshold == 420.0);
    const auto p = predict_sprawl(b, {{"PopulationDensity", 54545}});
    CHECK(p.label == Label::Y);
    CHECK(p.provenance == "tree");
    REQUIRE_FALSE(p.explanation.empty());
    CHECK(p.explanation.front() == "PopulationDensity >= 420");
  }

  TEST_CASE("ensemble explanations cite the winning members") {
    const auto b = fixtures::density_bundle("bagging");
    const auto p = predict_sprawl(b, {{"PopulationDensity", 54545}});
    CHECK(p.label == Label::Y);
    CHECK(p.provenance == "bagging");
    CHECK(p.votes.size() == 3);
    CHECK(mentions(p.explanation, "PopulationDensity >="));
  }

  TEST_CASE("empty assignment answers the prior") {
    const auto b = fixtures::density_bundle();
    const auto p = predict_sprawl(b, {});
    CHECK(p.label == Label::N);
    CHECK(p.confidence == doctest::Approx(14.0 / 24.0));
    CHECK(p.explanation == std::vector<std::string>{"no conditions supplied"});
    CHECK(p.provenance == "prior");
  }

  TEST_CASE("unemployment-only query") {
    const auto b = fixtures::density_bundle();
    const auto p = predict_sprawl(b, {{"Unemployment", 4.5}});
    CHECK_FALSE(p.explanation.empty());
    CHECK(p.confidence > 0.0);
  }

  TEST_CASE("rejects bad input") {
    const auto b = fixtures::density_bundle();
    CHECK_ERROR_CODE(predict_sprawl(b, {{"Nope", 1}}), ErrorCode::UnknownAttribute);
    CHECK_ERROR_CODE(predict_sprawl(b, {{"PopulationDensity", std::nan("")}}), ErrorCode::InvalidParameter);
    ModelBundle empty;
    CHECK_ERROR_CODE(predict_sprawl(empty, {}), ErrorCode::NoModel);
  }

  TEST_CASE("supporting rules match the assignment") {
    const auto p = predict_sprawl(ny(), {{"PopulationDensity", 54545}, {"TotalPersonalIncome", 9e10}});
    std::size_t rules = 0;
    for (const auto& line : p.explanation) rules += line.starts_with("rule: ") ? 1 : 0;
    CHECK(rules <= kMaxSupportingRules);
  }

  TEST_CASE("housing units to electric heating") {
    const auto b = fixtures::housing_bundle();
    const auto r = query_impact(b, "HousingUnits", "ElectricHeating", 76767);
    CHECK(r.from_token == "HousingUnits_Range3");
    REQUIRE(r.headline);
    CHECK(*r.headline == "less than 20,000");
    CHECK_FALSE(r.rules.empty());
    for (const auto& rule : r.rules) {
      CHECK(std::find(rule.antecedent.begin(), rule.antecedent.end(), "HousingUnits_Range3") != rule.antecedent.end());
    }

    const auto all = query_impact(b, "HousingUnits", "ElectricHeating");
    CHECK(all.rules.size() >= r.rules.size());
    CHECK_FALSE(all.headline);

    const auto high = query_impact(b, "HousingUnits", "ElectricHeating", 250000);
    CHECK(high.headline == "greater than 40,000");

    const auto sprawl = query_impact(b, "HousingUnits", "Target", 250000);
    CHECK(sprawl.headline == "sprawl");
  }

  TEST_CASE("impact errors and empty answers") {
    const auto b = fixtures::housing_bundle();
    CHECK_ERROR_CODE(query_impact(b, "HousingUnits", "HousingUnits"), ErrorCode::InvalidQuery);
    CHECK_ERROR_CODE(query_impact(b, "Target", "HousingUnits", 3.0), ErrorCode::InvalidQuery);
    CHECK_ERROR_CODE(query_impact(b, "Nope", "HousingUnits"), ErrorCode::UnknownAttribute);
    const auto none = query_impact(b, "ElectricHeating", "HousingUnits", 30000);
    CHECK(none.rules.empty());
    CHECK(none.note.starts_with("no mined relationship between ElectricHeating and HousingUnits"));
  }

  TEST_CASE("quantities and ranges") {
    CHECK(format_quantity(20000) == "20,000");
    CHECK(format_quantity(18.88) == "18.88");
    CHECK(format_quantity(-1234.5) == "-1,234.5");
    CHECK(format_quantity(420) == "420");
    CHECK(format_quantity(11713160) == "11,713,160");
    const auto bins = binning::make_bins("E", binning::Strategy::explicit_cuts, {20000, 40000});
    CHECK(describe_range(bins, 0) == "less than 20,000");
    CHECK(describe_range(bins, 1) == "between 20,000 and 40,000");
    CHECK(describe_range(bins, 2) == "greater than 40,000");
  }
}

TEST_SUITE("service") {
  std::shared_ptr<const Service> service() {
    static const auto svc = std::make_shared<const Service>(
        fixtures::density_bundle("bagging"),
        std::map<int, ingest::LabeledRegionSet>{{2000, fixtures::ny_regions(2000)}, {2010, fixtures::ny_regions(2010)}});
    return svc;
  }

  TEST_CASE("predict matches the engine") {
    const auto r = service()->handle("POST", "/api/predict", R"({"PopulationDensity": 54545})");
    CHECK(r.status == 200);
    const nlohmann::json expected = predict_sprawl(service()->bundle(), {{"PopulationDensity", 54545}});
    CHECK(nlohmann::json::parse(r.body) == expected);
  }

  TEST_CASE("errors carry machine codes") {
    auto code = [](const Response& r) { return nlohmann::json::parse(r.body).at("code").get<std::string>(); };
    auto r = service()->handle("POST", "/api/predict", R"({"Nope": 1})");
    CHECK(r.status == 400);
    CHECK(code(r) == "UnknownAttribute");
    r = service()->handle("POST", "/api/predict", "[1,");
    CHECK(r.status == 400);
    CHECK(code(r) == "InvalidQuery");
    r = service()->handle("POST", "/api/predict", R"({"PopulationDensity": "lots"})");
    CHECK(code(r) == "InvalidQuery");
    r = service()->handle("POST", "/api/impact", R"({"from": "PopulationDensity"})");
    CHECK(code(r) == "InvalidQuery");
    r = service()->handle("GET", "/api/rules", "", {{"filter", "bad:x"}});
    CHECK(code(r) == "InvalidQuery");
    r = service()->handle("GET", "/api/map/1990.geojson", "");
    CHECK(r.status == 404);
    CHECK(code(r) == "UnknownYear");
    r = service()->handle("GET", "/api/map/abc.geojson", "");
    CHECK(r.status == 400);
    r = service()->handle("GET", "/api/nowhere", "");
    CHECK(r.status == 404);
    CHECK(code(r) == "NotFound");
  }

  TEST_CASE("read endpoints") {
    auto r = service()->handle("GET", "/api/attributes", "");
    const auto attrs = nlohmann::json::parse(r.body);
    CHECK(attrs["attributes"].size() == 2);
    CHECK(attrs["attributes"][0]["units"] == "people per square mile");

    r = service()->handle("GET", "/api/rules", "", {{"filter", "rhs:Target_Sprawl"}});
    const auto rules = nlohmann::json::parse(r.body);
    CHECK(rules["count"] == rules["rules"].size());

    r = service()->handle("GET", "/api/map/2010.geojson", "");
    CHECK(r.status == 200);
    CHECK(r.content_type == "application/geo+json");
    CHECK(nlohmann::json::parse(r.body)["features"].size() == 62);

    r = service()->handle("GET", "/api/model/summary", "");
    const auto summary = nlohmann::json::parse(r.body);
    CHECK(summary["method"] == "bagging");
    CHECK(summary["members"] == 3);
    CHECK(summary["years"] == nlohmann::json::array({2000, 2010}));

    r = service()->handle("POST", "/api/impact", R"({"from": "PopulationDensity", "to": "Target", "value": 54545})");
    CHECK(r.status == 200);
  }

  TEST_CASE("bind addresses") {
    CHECK(parse_bind_address("0.0.0.0:9000") == std::pair<std::string, int>{"0.0.0.0", 9000});
    CHECK(parse_bind_address(":8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
    CHECK(parse_bind_address("8081") == std::pair<std::string, int>{"127.0.0.1", 8081});
    CHECK_ERROR_CODE(parse_bind_address("host:99999"), ErrorCode::InvalidParameter);
    CHECK_ERROR_CODE(parse_bind_address("host:"), ErrorCode::InvalidParameter);
  }

  TEST_CASE("http round trip") {
    HttpServer server(service());
    const int port = server.start("127.0.0.1", 0);
    REQUIRE(port > 0);
    httplib::Client client("127.0.0.1", port);
    auto res = client.Post("/api/predict", R"({"PopulationDensity": 54545})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == service()->handle("POST", "/api/predict", R"({"PopulationDensity": 54545})").body);
    res = client.Get("/api/rules?filter=rhs%3ATarget_Sprawl");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = client.Get("/api/map/1999.geojson");
    REQUIRE(res);
    CHECK(res->status == 404);
    server.stop();
  }
}
