#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsync {

/// Signed whole seconds. Device clocks are only trusted to the second.
using Seconds = std::int64_t;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Photo {
  std::string id;
  std::string gallery_id;
  Seconds timestamp = 0;  // device-local clock
  std::optional<GeoPoint> geo;

  friend bool operator==(const Photo&, const Photo&) = default;
};

/// Photos from one device, kept sorted by (timestamp, id).
struct Gallery {
  std::string id;
  std::vector<Photo> photos;

  friend bool operator==(const Gallery&, const Gallery&) = default;
};

struct Collection {
  std::vector<Gallery> galleries;  // manifest order
  std::string reference_gallery_id;

  std::size_t gallery_count() const { return galleries.size(); }
  std::size_t photo_count() const;

  /// Index of the gallery with the given id, or nullopt.
  std::optional<std::size_t> find_gallery(std::string_view id) const;
  const Gallery& gallery(std::string_view id) const;

  friend bool operator==(const Collection&, const Collection&) = default;
};

/// True offsets (seconds to add to a gallery's clock to reach the reference clock).
struct GroundTruth {
  std::map<std::string, Seconds> offsets;
};

bool valid_geo(const GeoPoint& p);

/// Sorts photos by (timestamp, id) in place.
void sort_photos(Gallery& gallery);

/// Checks every type invariant and throws gsync::Error("collection", ...) on the
/// first violation. Sorts galleries that are out of order.
void validate(Collection& collection);

Collection parse_collection(std::string_view json_text);
Collection load_collection(const std::filesystem::path& manifest_path);
std::string collection_to_json(const Collection& collection);

GroundTruth parse_ground_truth(std::string_view json_text);
GroundTruth load_ground_truth(const std::filesystem::path& path);
std::string ground_truth_to_json(const GroundTruth& truth);

/// Shifts every timestamp by `offset`. Throws on int64 overflow.
Gallery apply_offset(const Gallery& gallery, Seconds offset);

}  // namespace gsync
