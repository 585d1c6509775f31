#include "sprawl/sdss/bundle.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "sprawl/error.hpp"
#include "sprawl/ingest/csv.hpp"

namespace sprawl::sdss {
namespace {

using nlohmann::json;

json payload_of(const ModelBundle& b) {
  json attributes = json::array();
  for (const auto& a : b.attributes) {
    attributes.push_back({{"name", a.name}, {"units", a.units}, {"min", a.min}, {"max", a.max}});
  }
  return {{"method", b.method},
          {"binning", b.binning},
          {"rules", b.rules},
          {"ensemble", b.ensemble ? json(*b.ensemble) : json(nullptr)},
          {"single_tree", b.single_tree ? json(*b.single_tree) : json(nullptr)},
          {"attribute_metadata", std::move(attributes)},
          {"dataset_fingerprint", b.dataset_fingerprint},
          {"training_params", b.training_params},
          {"target_column", b.target_column},
          {"training_rows", b.training_rows},
          {"prior_y", b.prior_y}};
}

ModelBundle bundle_from(const json& p, int version) {
  ModelBundle b;
  b.format_version = version;
  b.method = p.at("method").get<std::string>();
  b.binning = p.at("binning").get<binning::BinningScheme>();
  b.rules = p.at("rules").get<std::vector<rules::AssociationRule>>();
  if (!p.at("ensemble").is_null()) b.ensemble = p.at("ensemble").get<tree::Ensemble>();
  if (!p.at("single_tree").is_null()) b.single_tree = p.at("single_tree").get<tree::DecisionTree>();
  for (const auto& a : p.at("attribute_metadata")) {
    b.attributes.push_back({a.at("name").get<std::string>(), a.at("units").get<std::string>(),
                            a.at("min").get<double>(), a.at("max").get<double>()});
  }
  b.dataset_fingerprint = p.at("dataset_fingerprint").get<std::string>();
  b.training_params = p.at("training_params").get<tree::TrainParams>();
  b.target_column = p.at("target_column").get<std::string>();
  b.training_rows = p.at("training_rows").get<std::size_t>();
  b.prior_y = p.at("prior_y").get<double>();
  return b;
}

}  // namespace

const AttributeInfo* ModelBundle::find_attribute(std::string_view name) const noexcept {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

void ModelBundle::validate() const {
  auto require = [&](std::string_view name, const char* where) {
    if (name == target_column || name == binning::kTargetAttribute) return;
    if (!find_attribute(name)) {
      throw Error(ErrorCode::InvalidParameter,
                  std::string(where) + " names '" + std::string(name) + "' but it has no metadata");
    }
  };
  for (const auto& e : binning.entries()) require(e.attribute, "binning");
  for (const auto& r : rules) {
    for (const auto* side : {&r.antecedent, &r.consequent}) {
      for (const auto& token : *side) {
        const auto parts = binning::parse_token(token);
        if (!parts) throw Error(ErrorCode::InvalidParameter, "rule token '" + token + "' is malformed");
        require(parts->attribute, "rule");
      }
    }
  }
  auto check_tree = [&](const tree::DecisionTree& t) {
    for (const auto& name : t.attributes()) require(name, "tree");
  };
  if (single_tree) check_tree(*single_tree);
  if (ensemble) {
    ensemble->validate();
    for (const auto& m : ensemble->members) check_tree(m.tree);
  }
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string dataset_fingerprint(const AttributeTable& table) { return sha256_hex(ingest::write_csv(table)); }

std::string serialize_bundle(const ModelBundle& bundle) {
  bundle.validate();
  const json payload = payload_of(bundle);
  const json doc = {{"format_version", bundle.format_version},
                    {"payload", payload},
                    {"payload_sha256", sha256_hex(payload.dump())}};
  return doc.dump(1) + "\n";
}

ModelBundle parse_bundle(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptBundle, std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    throw Error(ErrorCode::CorruptBundle, "missing format_version");
  }
  const int version = doc["format_version"].get<int>();
  if (version != kBundleFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "bundle has format_version " + std::to_string(version) +
                                                ", this build reads format_version " +
                                                std::to_string(kBundleFormatVersion));
  }
  if (!doc.contains("payload") || !doc.contains("payload_sha256") || !doc["payload_sha256"].is_string()) {
    throw Error(ErrorCode::CorruptBundle, "missing payload or hash");
  }
  const auto& payload = doc["payload"];
  if (sha256_hex(payload.dump()) != doc["payload_sha256"].get<std::string>()) {
    throw Error(ErrorCode::CorruptBundle, "payload hash does not match");
  }
  try {
    auto bundle = bundle_from(payload, version);
    bundle.validate();
    return bundle;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptBundle, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptBundle, e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const auto text = serialize_bundle(bundle);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bundle(buf.str());
}

}  // namespace sprawl::sdss
