#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsync {

/// Dense row-major float matrix. Storage is float to keep per-region layer
/// responses affordable; arithmetic on it accumulates in double.
struct RowMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  RowMatrix() = default;
  RowMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0f) {}

  std::span<const float> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  std::span<float> row(std::size_t i) { return {values.data() + i * cols, cols}; }

  friend bool operator==(const RowMatrix&, const RowMatrix&) = default;
};

/// Region grid and response width of the network layers the extractor knows.
struct LayerGeometry {
  std::string_view name;         // canonical, e.g. "inception3a/output"
  std::string_view short_name;   // CLI alias, e.g. "inception3a"
  std::uint32_t region_count;
  std::uint32_t dim;
};

std::span<const LayerGeometry> known_layers();
const LayerGeometry* find_layer(std::string_view name);

/// Maps CLI aliases onto canonical layer names; unknown names pass through.
std::string canonical_layer_name(std::string_view name);

/// Layer emitted by the synthetic generator: one region holding the raw descriptor.
inline constexpr std::string_view kSynthLayer = "synth/flat";

struct RegionFeatureSet {
  std::string photo_id;
  std::string layer;
  RowMatrix vectors;  // region_count x dim

  std::size_t region_count() const { return vectors.rows; }
  std::size_t dim() const { return vectors.cols; }
};

/// Throws if the layer is a known one and the geometry disagrees.
void check_geometry(const RegionFeatureSet& set);

/// Each row divided by its Euclidean norm; zero rows stay zero.
RegionFeatureSet normalize_regions(RegionFeatureSet raw);

// .gsft binary format, little-endian:
//   "GSFT" | u16 version(=1) | u16 name_len | name bytes | u32 regions | u32 dim
//   | regions*dim float32, row-major
inline constexpr std::uint16_t kGsftVersion = 1;

std::vector<std::uint8_t> encode_gsft(const RegionFeatureSet& set);
RegionFeatureSet decode_gsft(std::span<const std::uint8_t> bytes, std::string photo_id);

void write_gsft(const std::filesystem::path& path, const RegionFeatureSet& set);
RegionFeatureSet read_gsft(const std::filesystem::path& path, std::string photo_id);

/// Locates `<photo-id>.gsft` for a layer. Per-layer subdirectories (layer name
/// with '/' replaced by '_') are searched first, then the flat directory.
std::filesystem::path feature_path(const std::filesystem::path& features_dir, std::string_view photo_id,
                                   std::optional<std::string_view> layer);

/// Loads one photo's features. With a layer given, the file's header must name
/// the same (canonical) layer.
RegionFeatureSet load_features(const std::filesystem::path& features_dir, std::string_view photo_id,
                               std::optional<std::string_view> layer);

}  // namespace gsync
