#include "sprawl/mapviz.hpp"

#include <algorithm>

#include "sprawl/error.hpp"

namespace sprawl::mapviz {
namespace {

using nlohmann::json;
using ingest::Ring;

bool contains(const Ring& ring, const ingest::LonLat& p) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat) &&
        p.lon < (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon) {
      inside = !inside;
    }
  }
  return inside;
}

json ring_json(const Ring& ring, bool want_ccw) {
  const bool is_ccw = ingest::signed_area(ring) > 0.0;
  json coords = json::array();
  auto emit = [&](const ingest::LonLat& p) { coords.push_back(json::array({p.lon, p.lat})); };
  if (is_ccw == want_ccw) {
    std::for_each(ring.begin(), ring.end(), emit);
  } else {
    std::for_each(ring.rbegin(), ring.rend(), emit);
  }
  return coords;
}

json geometry_json(const ingest::CountyGeometry& g) {
  // Shapefiles wind exteriors clockwise and holes counterclockwise.
  std::vector<std::size_t> exteriors;
  for (std::size_t i = 0; i < g.rings.size(); ++i) {
    if (ingest::signed_area(g.rings[i]) < 0.0) exteriors.push_back(i);
  }
  if (exteriors.empty()) {
    for (std::size_t i = 0; i < g.rings.size(); ++i) exteriors.push_back(i);
  }
  std::vector<json> polygons;
  for (auto e : exteriors) polygons.push_back(json::array({ring_json(g.rings[e], true)}));
  for (std::size_t i = 0; i < g.rings.size(); ++i) {
    if (std::find(exteriors.begin(), exteriors.end(), i) != exteriors.end()) continue;
    std::size_t owner = 0;
    for (std::size_t k = 0; k < exteriors.size(); ++k) {
      if (exteriors[k] < i) owner = k;
      if (contains(g.rings[exteriors[k]], g.rings[i].front())) {
        owner = k;
        break;
      }
    }
    polygons[owner].push_back(ring_json(g.rings[i], false));
  }
  if (polygons.size() == 1) return {{"type", "Polygon"}, {"coordinates", polygons.front()}};
  return {{"type", "MultiPolygon"}, {"coordinates", polygons}};
}

}  // namespace

std::string_view fill_for(Label label) noexcept { return label == Label::Y ? kSprawlFill : kNoSprawlFill; }

json export_geojson(const ingest::LabeledRegionSet& regions) {
  std::vector<const ingest::CountyGeometry*> ordered;
  for (const auto& g : regions.geometries) ordered.push_back(&g);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->key < b->key; });

  json features = json::array();
  for (const auto* g : ordered) {
    const auto it = regions.labels.find(g->key);
    if (it == regions.labels.end()) {
      throw Error(ErrorCode::MissingLabel, "no label for county '" + g->key + "' (" + g->name + ")");
    }
    features.push_back({{"type", "Feature"},
                        {"id", g->key},
                        {"geometry", geometry_json(*g)},
                        {"properties",
                         {{"key", g->key},
                          {"name", g->name},
                          {"sprawl", std::string(to_string(it->second))},
                          {"fill", std::string(fill_for(it->second))}}}});
  }
  return {{"type", "FeatureCollection"}, {"year", regions.year}, {"features", std::move(features)}};
}

std::string export_geojson_text(const ingest::LabeledRegionSet& regions) { return export_geojson(regions).dump(); }

std::vector<LabelChange> diff_years(const ingest::LabeledRegionSet& a, const ingest::LabeledRegionSet& b) {
  if (a.labels.size() != b.labels.size() ||
      !std::equal(a.labels.begin(), a.labels.end(), b.labels.begin(),
                   [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw Error(ErrorCode::KeyMismatch, "the two years label different counties");
  }
  auto name_of = [](const ingest::LabeledRegionSet& set, const std::string& key) -> std::string {
    for (const auto& g : set.geometries) {
      if (g.key == key) return g.name;
    }
    return {};
  };
  std::vector<LabelChange> out;
  auto ib = b.labels.begin();
  for (auto ia = a.labels.begin(); ia != a.labels.end(); ++ia, ++ib) {
    if (ia->second == ib->second) continue;
    auto name = name_of(b, ia->first);
    if (name.empty()) name = name_of(a, ia->first);
    out.push_back({ia->first, std::move(name), ia->second, ib->second});
  }
  return out;
}

void to_json(nlohmann::json& j, const LabelChange& change) {
  j = {{"key", change.key},
       {"name", change.name},
       {"from", std::string(to_string(change.from))},
       {"to", std::string(to_string(change.to))}};
}

}  // namespace sprawl::mapviz
