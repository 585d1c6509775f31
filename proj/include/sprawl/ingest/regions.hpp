#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sprawl/ingest/shapefile.hpp"
#include "sprawl/label.hpp"
#include "sprawl/table.hpp"

namespace sprawl::ingest {

struct LabeledRegionSet {
  std::vector<CountyGeometry> geometries;
  std::map<std::string, Label> labels;
  int year = 0;
};

/// Copies key and name from the DBF rows onto geometries, matched by record
/// order (shapefile record i pairs with DBF row i).
void attach_attributes(std::vector<CountyGeometry>& geometries, const AttributeTable& dbf,
                       const std::string& key_field, const std::string& name_field);

/// Reads a `key,<label column>` CSV of Y/N values.
std::map<std::string, Label> parse_labels_csv(std::string_view csv_text, const std::string& key_column,
                                              const std::string& label_column);

/// Builds a region set, checking every label key names exactly one geometry.
LabeledRegionSet make_region_set(std::vector<CountyGeometry> geometries,
                                 std::map<std::string, Label> labels, int year);

struct RegionFiles {
  std::filesystem::path shp;
  std::filesystem::path dbf;  // defaults to shp with a .dbf extension
  std::filesystem::path labels;
  std::string key_field = "GEOID";
  std::string name_field = "NAME";
  std::string label_column = "Sprawl";
};

LabeledRegionSet load_region_set(const RegionFiles& files, int year);

}  // namespace sprawl::ingest
