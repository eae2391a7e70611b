#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gallery_sync/features.hpp"
#include "gallery_sync/kernels.hpp"

namespace gsync {

struct Vocabulary {
  std::string layer;
  RowMatrix centers;  // K x dim

  std::size_t size() const { return centers.rows; }
  std::size_t dim() const { return centers.cols; }
};

struct KMeansOptions {
  std::size_t clusters = 256;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 100;
  kernels::Backend backend = kernels::Backend::parallel;
};

struct KMeansResult {
  RowMatrix centers;
  std::vector<std::uint32_t> labels;
  std::vector<double> distortion;  // after each assignment step
  std::size_t iterations = 0;
  bool converged = false;  // assignments stopped changing
};

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded with
/// the point farthest from its center.
KMeansResult kmeans(const RowMatrix& points, const KMeansOptions& options);

/// Stacks all region rows and clusters them. Rows should already be normalized.
Vocabulary build_vocabulary(std::span<const RegionFeatureSet> all_regions, const KMeansOptions& options);

struct VladDescriptor {
  std::string photo_id;
  std::vector<float> values;  // K blocks of dim, each unit norm or all zero
};

/// Residuals to the nearest word (ties -> lowest index), summed per word, then
/// each word block scaled to unit norm.
VladDescriptor encode_vlad(const RegionFeatureSet& regions, const Vocabulary& vocab);

/// encode_vlad over many photos; the parallel backend splits by photo.
std::vector<VladDescriptor> encode_vlad_all(std::span<const RegionFeatureSet> photos, const Vocabulary& vocab,
                                            kernels::Backend backend = kernels::Backend::parallel);

/// Concatenated region rows, unnormalized. Used for layers whose output is
/// compared directly (classifier scores, synthetic descriptors).
VladDescriptor raw_descriptor(const RegionFeatureSet& regions);

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace gsync
