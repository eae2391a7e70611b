#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gallery_sync/collection.hpp"
#include "gallery_sync/features.hpp"
#include "gallery_sync/vlad.hpp"

namespace gsync::synth {

enum class GeoMode { none, venue, track };

struct ScenarioConfig {
  std::size_t galleries = 10;
  std::size_t photos_per_gallery = 30;
  Seconds duration = 4 * 3600;  // event length on the true clock
  Seconds offset_range = 21600;  // true offsets drawn from [-range, range]
  double planted_rate = 0.8;     // share of each gallery's photos showing a shared scene
  std::size_t descriptor_dim = 32;
  double noise = 0.05;           // per-component sigma added to planted descriptors
  Seconds jitter = 30;           // max spread of capture times within one scene
  GeoMode geo = GeoMode::none;
  std::uint64_t seed = 7;
  /// Optional explicit offsets, one per gallery, first one 0.
  std::vector<Seconds> offsets;
};

/// In-memory scenario. Gallery i has id "gNN" (1-based, zero padded); the first
/// gallery is the reference with true offset 0.
struct Scenario {
  Collection collection;
  GroundTruth truth;  // non-reference galleries only
  std::vector<RegionFeatureSet> features;  // one kSynthLayer set per photo, collection order
  std::vector<int> scene_of;               // per feature set: scene index, -1 for unplanted photos
  std::vector<Seconds> true_time;          // per feature set: capture time on the true clock
};

/// Throws gsync::Error("synth-gen", ...) on an impossible configuration.
Scenario generate(const ScenarioConfig& config);

/// Writes manifest.json, ground_truth.json and features/<photo-id>.gsft.
void write_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

/// Raw descriptors of every photo, in collection order.
std::vector<VladDescriptor> raw_descriptors(const Scenario& scenario);

}  // namespace gsync::synth
