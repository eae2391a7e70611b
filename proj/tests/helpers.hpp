#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gallery_sync/collection.hpp"
#include "gallery_sync/similarity.hpp"

namespace testing {

/// Gallery with photos "<id>_<n>" at the given device times.
inline gsync::Gallery gallery(const std::string& id, const std::vector<gsync::Seconds>& times) {
  gsync::Gallery g{id, {}};
  for (std::size_t i = 0; i < times.size(); ++i)
    g.photos.push_back({id + "_" + std::to_string(i), id, times[i], std::nullopt});
  return g;
}

inline gsync::Collection collection(std::vector<gsync::Gallery> galleries) {
  gsync::Collection c{std::move(galleries), {}};
  gsync::validate(c);
  return c;
}

/// Symmetric matrix over every photo of `c` with unit diagonal and random
/// off-diagonal entries in (0, 1).
inline gsync::SimilarityMatrix random_similarity(const gsync::Collection& c, std::mt19937_64& rng) {
  std::vector<std::string> ids;
  for (const auto& g : c.galleries)
    for (const auto& p : g.photos) ids.push_back(p.id);
  const std::size_t n = ids.size();
  std::vector<double> v(n * n, 1.0);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = u(rng);
  return {std::move(ids), std::move(v)};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gallery_sync_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
