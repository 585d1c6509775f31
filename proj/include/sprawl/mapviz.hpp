#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sprawl/ingest/regions.hpp"
#include "sprawl/label.hpp"

namespace sprawl::mapviz {

inline constexpr std::string_view kSprawlFill = "#d73027";
inline constexpr std::string_view kNoSprawlFill = "#1a9850";

std::string_view fill_for(Label label) noexcept;

/// GeoJSON FeatureCollection with one feature per geometry, ordered by key.
/// Rings are rewound to the GeoJSON convention (exterior counterclockwise,
/// holes clockwise); counties with several exteriors become MultiPolygons.
/// Throws Error{MissingLabel} when a geometry has no label.
nlohmann::json export_geojson(const ingest::LabeledRegionSet& regions);

std::string export_geojson_text(const ingest::LabeledRegionSet& regions);

struct LabelChange {
  std::string key;
  std::string name;
  Label from = Label::N;
  Label to = Label::N;

  bool operator==(const LabelChange&) const = default;
};

/// Counties whose label differs between two years, sorted by key.
/// Throws Error{KeyMismatch} unless both sets label the same keys.
std::vector<LabelChange> diff_years(const ingest::LabeledRegionSet& a, const ingest::LabeledRegionSet& b);

void to_json(nlohmann::json& j, const LabelChange& change);

}  // namespace sprawl::mapviz
