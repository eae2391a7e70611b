#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gallery_sync/collection.hpp"
#include "gallery_sync/graph.hpp"
#include "gallery_sync/kernels.hpp"
#include "gallery_sync/links.hpp"
#include "gallery_sync/mrf.hpp"
#include "gallery_sync/similarity.hpp"

namespace gsync {

enum class DescriptorEncoding {
  automatic,  // raw for classifier / synthetic layers, VLAD otherwise
  vlad,
  raw,
};

struct FeatureConfig {
  /// Layers to load; several layers are fused by averaging their similarity
  /// matrices. Empty means "whatever single layer the flat feature files hold".
  std::vector<std::string> layers;
  DescriptorEncoding encoding = DescriptorEncoding::automatic;
  std::size_t vocabulary_size = 256;
  std::uint64_t seed = 0;
  /// Prebuilt vocabulary; only valid with a single layer.
  std::optional<std::filesystem::path> vocabulary_path;
  kernels::Backend backend = kernels::Backend::parallel;
};

/// Whether `layer` is compared with VLAD under `encoding`.
bool uses_vlad(const std::string& layer, DescriptorEncoding encoding);

/// Loads every photo's features and builds the (possibly fused) similarity matrix.
SimilarityMatrix compute_similarity(const Collection& collection, const std::filesystem::path& features_dir,
                                    const FeatureConfig& config);

/// Reads all feature sets of one layer, in collection order.
std::vector<RegionFeatureSet> load_layer(const Collection& collection, const std::filesystem::path& features_dir,
                                         const std::optional<std::string>& layer);

struct SyncConfig {
  LinkApproach approach = LinkApproach::exact;
  double alpha = kDefaultAlpha;
  PotentialParams params;
  MrfOptions mrf;
};

enum class SyncStatus { synchronized, unreachable };

struct GalleryOffset {
  std::optional<Seconds> offset;  // into the reference clock; empty when unreachable
  SyncStatus status = SyncStatus::unreachable;
};

struct EdgeEstimate {
  std::string parent;  // local reference
  std::string child;   // gallery synchronized against the parent
  std::vector<Link> links;
  EdgeSyncResult result;
};

struct SyncResult {
  std::string reference;
  std::map<std::string, GalleryOffset> galleries;
  // Diagnostics; not serialized.
  LinkSet links;
  GalleryGraph graph;
  SpanningTree tree;
  std::vector<EdgeEstimate> edges;  // tree traversal order
};

SyncResult synchronize(const Collection& collection, const SimilarityMatrix& w, const SyncConfig& config);
SyncResult synchronize(const Collection& collection, const std::filesystem::path& features_dir,
                       const FeatureConfig& features, const SyncConfig& config);

struct CorrectedCollection {
  Collection collection;                // synchronized galleries moved into the reference clock
  std::vector<std::string> unsynchronized;  // left on their own clock
};

CorrectedCollection corrected_timestamps(const Collection& collection, const SyncResult& result);

/// {"offsets": {id: int|null}, "reference": id, "status": {id: "synchronized"|"unreachable"}}
std::string sync_result_to_json(const SyncResult& result);
SyncResult parse_sync_result(std::string_view json_text);

}  // namespace gsync
