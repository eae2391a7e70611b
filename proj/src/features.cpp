#include "gallery_sync/features.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "gallery_sync/error.hpp"
#include "gallery_sync/io.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("features", msg); }

constexpr std::array<LayerGeometry, 5> kLayers{{
    {"conv2/norm2", "conv2", 28 * 28, 192},
    {"inception3a/output", "inception3a", 28 * 28, 256},
    {"inception4a/output", "inception4a", 14 * 14, 512},
    {"inception5a/output", "inception5a", 7 * 7, 832},
    {"loss3/classifier", "loss3", 1, 1000},
}};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail("truncated .gsft data");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint16_t u16() {
    auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32() {
    auto b = take(4);
    return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
           (std::uint32_t{b[3]} << 24);
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string layer_dir_name(std::string_view layer) {
  std::string s(layer);
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

}  // namespace

std::span<const LayerGeometry> known_layers() { return kLayers; }

const LayerGeometry* find_layer(std::string_view name) {
  for (const auto& l : kLayers)
    if (l.name == name || l.short_name == name) return &l;
  return nullptr;
}

std::string canonical_layer_name(std::string_view name) {
  if (const auto* l = find_layer(name)) return std::string(l->name);
  return std::string(name);
}

void check_geometry(const RegionFeatureSet& set) {
  const auto* l = find_layer(set.layer);
  if (!l) return;
  if (set.region_count() != l->region_count || set.dim() != l->dim)
    fail("photo '" + set.photo_id + "': layer " + std::string(l->name) + " expects " +
         std::to_string(l->region_count) + " regions x " + std::to_string(l->dim) + " dims, got " +
         std::to_string(set.region_count()) + " x " + std::to_string(set.dim()));
}

RegionFeatureSet normalize_regions(RegionFeatureSet raw) {
  for (std::size_t r = 0; r < raw.vectors.rows; ++r) {
    auto row = raw.vectors.row(r);
    double sq = 0.0;
    for (float v : row) sq += double(v) * double(v);
    if (sq == 0.0) continue;
    const double norm = std::sqrt(sq);
    for (float& v : row) v = static_cast<float>(double(v) / norm);
  }
  return raw;
}

std::vector<std::uint8_t> encode_gsft(const RegionFeatureSet& set) {
  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  if (set.layer.size() > 0xffff) fail("layer name too long");
  std::vector<std::uint8_t> out;
  out.reserve(16 + set.layer.size() + set.vectors.values.size() * 4);
  for (char c : std::string_view("GSFT")) out.push_back(static_cast<std::uint8_t>(c));
  put_u16(out, kGsftVersion);
  put_u16(out, static_cast<std::uint16_t>(set.layer.size()));
  out.insert(out.end(), set.layer.begin(), set.layer.end());
  put_u32(out, static_cast<std::uint32_t>(set.vectors.rows));
  put_u32(out, static_cast<std::uint32_t>(set.vectors.cols));
  for (float v : set.vectors.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

RegionFeatureSet decode_gsft(std::span<const std::uint8_t> bytes, std::string photo_id) {
  Reader in(bytes);
  auto magic = in.take(4);
  if (std::memcmp(magic.data(), "GSFT", 4) != 0) fail("bad .gsft magic for photo '" + photo_id + "'");
  const auto version = in.u16();
  if (version != kGsftVersion) fail("unsupported .gsft version " + std::to_string(version));
  const auto name_len = in.u16();
  auto name = in.take(name_len);
  RegionFeatureSet set;
  set.photo_id = std::move(photo_id);
  set.layer.assign(name.begin(), name.end());
  const std::size_t regions = in.u32();
  const std::size_t dim = in.u32();
  if (in.remaining() != regions * dim * 4)
    fail("photo '" + set.photo_id + "': body holds " + std::to_string(in.remaining()) + " bytes, header implies " +
         std::to_string(regions * dim * 4));
  set.vectors = RowMatrix(regions, dim);
  for (float& v : set.vectors.values) v = std::bit_cast<float>(in.u32());
  check_geometry(set);
  return set;
}

void write_gsft(const std::filesystem::path& path, const RegionFeatureSet& set) {
  const auto bytes = encode_gsft(set);
  write_file_atomic(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

RegionFeatureSet read_gsft(const std::filesystem::path& path, std::string photo_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("missing feature file '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_gsft(bytes, std::move(photo_id));
}

std::filesystem::path feature_path(const std::filesystem::path& features_dir, std::string_view photo_id,
                                   std::optional<std::string_view> layer) {
  const std::string file = std::string(photo_id) + ".gsft";
  if (layer) {
    auto nested = features_dir / layer_dir_name(canonical_layer_name(*layer)) / file;
    if (std::filesystem::exists(nested)) return nested;
    if (const auto* l = find_layer(*layer)) {
      auto short_dir = features_dir / std::string(l->short_name) / file;
      if (std::filesystem::exists(short_dir)) return short_dir;
    }
  }
  return features_dir / file;
}

RegionFeatureSet load_features(const std::filesystem::path& features_dir, std::string_view photo_id,
                               std::optional<std::string_view> layer) {
  auto set = read_gsft(feature_path(features_dir, photo_id, layer), std::string(photo_id));
  if (layer && canonical_layer_name(set.layer) != canonical_layer_name(*layer))
    fail("photo '" + std::string(photo_id) + "': file holds layer '" + set.layer + "', expected '" +
         canonical_layer_name(*layer) + "'");
  return set;
}

}  // namespace gsync
