#include "gallery_sync/collection.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <json.hpp>

#include "gallery_sync/error.hpp"
#include "gallery_sync/io.hpp"

namespace gsync {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error("collection", msg); }

Seconds parse_timestamp(const json& value, const std::string& photo_id) {
  if (value.is_number_integer()) return value.get<Seconds>();
  if (value.is_number_float())
    fail("photo '" + photo_id + "': timestamp must be whole seconds (sub-second precision is not supported)");
  fail("photo '" + photo_id + "': timestamp must be an integer");
}

double parse_degrees(const json& value, const char* key, const std::string& photo_id) {
  if (!value.is_number()) fail("photo '" + photo_id + "': '" + key + "' must be a number");
  return value.get<double>();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing '" + key + "'");
  return *it;
}

}  // namespace

std::size_t Collection::photo_count() const {
  std::size_t n = 0;
  for (const auto& g : galleries) n += g.photos.size();
  return n;
}

std::optional<std::size_t> Collection::find_gallery(std::string_view id) const {
  for (std::size_t i = 0; i < galleries.size(); ++i)
    if (galleries[i].id == id) return i;
  return std::nullopt;
}

const Gallery& Collection::gallery(std::string_view id) const {
  auto idx = find_gallery(id);
  if (!idx) fail("unknown gallery '" + std::string(id) + "'");
  return galleries[*idx];
}

bool valid_geo(const GeoPoint& p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

void sort_photos(Gallery& gallery) {
  std::sort(gallery.photos.begin(), gallery.photos.end(), [](const Photo& a, const Photo& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.id < b.id;
  });
}

void validate(Collection& collection) {
  if (collection.galleries.size() < 2)
    fail("a collection needs at least 2 galleries, got " + std::to_string(collection.galleries.size()));
  std::set<std::string> gallery_ids;
  std::set<std::string> photo_ids;
  for (auto& g : collection.galleries) {
    if (!gallery_ids.insert(g.id).second) fail("duplicate gallery id '" + g.id + "'");
    for (const auto& p : g.photos) {
      if (p.gallery_id != g.id)
        fail("photo '" + p.id + "' claims gallery '" + p.gallery_id + "' but is listed under '" + g.id + "'");
      if (!photo_ids.insert(p.id).second) fail("duplicate photo id '" + p.id + "'");
      if (p.geo && !valid_geo(*p.geo)) fail("photo '" + p.id + "': coordinate out of range");
    }
    sort_photos(g);
  }
  if (collection.reference_gallery_id.empty()) collection.reference_gallery_id = collection.galleries.front().id;
  if (!gallery_ids.count(collection.reference_gallery_id))
    fail("reference gallery '" + collection.reference_gallery_id + "' does not exist");
}

Collection parse_collection(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("manifest must be a JSON object");

  Collection c;
  if (auto it = doc.find("reference"); it != doc.end()) {
    if (!it->is_string()) fail("'reference' must be a string");
    c.reference_gallery_id = it->get<std::string>();
  }
  const json& galleries = require(doc, "galleries", "manifest");
  if (!galleries.is_array()) fail("'galleries' must be an array");
  for (const auto& gj : galleries) {
    Gallery g;
    const json& gid = require(gj, "id", "gallery");
    if (!gid.is_string()) fail("gallery id must be a string");
    g.id = gid.get<std::string>();
    const json& photos = require(gj, "photos", "gallery '" + g.id + "'");
    if (!photos.is_array()) fail("gallery '" + g.id + "': 'photos' must be an array");
    for (const auto& pj : photos) {
      Photo p;
      const json& pid = require(pj, "id", "photo in gallery '" + g.id + "'");
      if (!pid.is_string()) fail("photo id must be a string");
      p.id = pid.get<std::string>();
      p.gallery_id = g.id;
      p.timestamp = parse_timestamp(require(pj, "timestamp", "photo '" + p.id + "'"), p.id);
      auto lat = pj.find("lat");
      auto lon = pj.find("lon");
      if ((lat == pj.end()) != (lon == pj.end()))
        fail("photo '" + p.id + "': 'lat' and 'lon' must be given together");
      if (lat != pj.end()) {
        p.geo = GeoPoint{parse_degrees(*lat, "lat", p.id), parse_degrees(*lon, "lon", p.id)};
      }
      g.photos.push_back(std::move(p));
    }
    c.galleries.push_back(std::move(g));
  }
  validate(c);
  return c;
}

Collection load_collection(const std::filesystem::path& manifest_path) {
  return parse_collection(read_text_file(manifest_path));
}

std::string collection_to_json(const Collection& collection) {
  json galleries = json::array();
  for (const auto& g : collection.galleries) {
    json photos = json::array();
    for (const auto& p : g.photos) {
      json pj = {{"id", p.id}, {"timestamp", p.timestamp}};
      if (p.geo) {
        pj["lat"] = p.geo->lat;
        pj["lon"] = p.geo->lon;
      }
      photos.push_back(std::move(pj));
    }
    galleries.push_back({{"id", g.id}, {"photos", std::move(photos)}});
  }
  json doc = {{"reference", collection.reference_gallery_id}, {"galleries", std::move(galleries)}};
  return doc.dump(2) + "\n";
}

GroundTruth parse_ground_truth(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("ground truth is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("ground truth must be a JSON object of gallery id -> offset");
  GroundTruth gt;
  for (const auto& [id, value] : doc.items()) {
    if (!value.is_number_integer()) fail("ground truth for '" + id + "' must be integer seconds");
    gt.offsets[id] = value.get<Seconds>();
  }
  return gt;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(read_text_file(path));
}

std::string ground_truth_to_json(const GroundTruth& truth) {
  json doc = json::object();
  for (const auto& [id, off] : truth.offsets) doc[id] = off;
  return doc.dump(2) + "\n";
}

Gallery apply_offset(const Gallery& gallery, Seconds offset) {
  Gallery out = gallery;
  for (auto& p : out.photos) {
    Seconds shifted = 0;
    if (__builtin_add_overflow(p.timestamp, offset, &shifted))
      fail("offset " + std::to_string(offset) + " overflows timestamp of photo '" + p.id + "'");
    p.timestamp = shifted;
  }
  return out;
}

}  // namespace gsync
