#include "sprawl/ingest/regions.hpp"

#include <unordered_map>

#include "sprawl/error.hpp"
#include "sprawl/ingest/csv.hpp"
#include "sprawl/ingest/dbf.hpp"
#include "sprawl/io.hpp"

namespace sprawl::ingest {

void attach_attributes(std::vector<CountyGeometry>& geometries, const AttributeTable& dbf,
                       const std::string& key_field, const std::string& name_field) {
  if (geometries.size() != dbf.row_count()) {
    throw Error(ErrorCode::KeyMismatch, std::to_string(geometries.size()) + " shapes but " +
                                            std::to_string(dbf.row_count()) + " attribute rows");
  }
  const auto key_col = dbf.column_index(key_field);
  const auto name_col = dbf.column_index(name_field);
  for (std::size_t i = 0; i < geometries.size(); ++i) {
    auto text_of = [&](std::size_t col) -> std::string {
      const auto& cell = dbf.at(i, col);
      if (const auto* s = std::get_if<std::string>(&cell)) return *s;
      if (const double* v = std::get_if<double>(&cell)) return format_number(*v);
      return {};
    };
    geometries[i].key = text_of(key_col);
    geometries[i].name = text_of(name_col);
  }
}

std::map<std::string, Label> parse_labels_csv(std::string_view csv_text, const std::string& key_column,
                                              const std::string& label_column) {
  const auto table = parse_csv(csv_text, key_column, label_column);
  const auto label_col = table.column_index(label_column);
  std::map<std::string, Label> labels;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    const auto* text = std::get_if<std::string>(&table.at(r, label_col));
    const auto label = text ? parse_label(*text) : std::nullopt;
    if (!label) {
      throw Error(ErrorCode::MissingLabel, "row '" + table.key(r) + "' has no Y/N label");
    }
    labels.emplace(table.key(r), *label);
  }
  return labels;
}

LabeledRegionSet make_region_set(std::vector<CountyGeometry> geometries,
                                 std::map<std::string, Label> labels, int year) {
  std::unordered_map<std::string, int> key_count;
  for (const auto& g : geometries) ++key_count[g.key];
  for (const auto& [key, label] : labels) {
    auto it = key_count.find(key);
    if (it == key_count.end() || it->second != 1) {
      throw Error(ErrorCode::KeyMismatch,
                  "label key '" + key + "' does not match exactly one geometry");
    }
  }
  return {std::move(geometries), std::move(labels), year};
}

LabeledRegionSet load_region_set(const RegionFiles& files, int year) {
  auto geometries = parse_shapefile(read_binary_file(files.shp));
  auto dbf_path = files.dbf;
  if (dbf_path.empty()) dbf_path = std::filesystem::path(files.shp).replace_extension(".dbf");
  attach_attributes(geometries, parse_dbf(read_binary_file(dbf_path), files.key_field), files.key_field,
                    files.name_field);
  auto labels = parse_labels_csv(read_text_file(files.labels), files.key_field, files.label_column);
  return make_region_set(std::move(geometries), std::move(labels), year);
}

}  // namespace sprawl::ingest
