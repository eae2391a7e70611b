#include "gallery_sync/vlad.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gallery_sync/error.hpp"

namespace gsync {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("visual-features", msg); }

constexpr std::string_view kVocabPrefix = "vocabulary:";

RowMatrix seed_plus_plus(const RowMatrix& points, std::size_t k, std::mt19937_64& rng) {
  RowMatrix centers(k, points.cols);
  std::uniform_int_distribution<std::size_t> pick(0, points.rows - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto copy_row = [&](std::size_t center, std::size_t point) {
    std::copy_n(points.row(point).begin(), points.cols, centers.row(center).begin());
  };
  copy_row(0, pick(rng));

  std::vector<double> nearest(points.rows);
  for (std::size_t p = 0; p < points.rows; ++p)
    nearest[p] = kernels::squared_distance(points.row(p), centers.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : nearest) total += d;
    if (total <= 0.0) fail("fewer distinct rows than the requested " + std::to_string(k) + " words");
    const double target = unit(rng) * total;
    std::size_t chosen = points.rows;
    double running = 0.0;
    for (std::size_t p = 0; p < points.rows; ++p) {
      if (nearest[p] <= 0.0) continue;
      running += nearest[p];
      chosen = p;
      if (running > target) break;
    }
    copy_row(c, chosen);
    for (std::size_t p = 0; p < points.rows; ++p)
      nearest[p] = std::min(nearest[p], kernels::squared_distance(points.row(p), centers.row(c)));
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const RowMatrix& points, const KMeansOptions& options) {
  const std::size_t k = options.clusters;
  if (k == 0) fail("k-means needs at least one cluster");
  if (points.rows < k)
    fail("k-means needs at least " + std::to_string(k) + " rows, got " + std::to_string(points.rows));

  std::mt19937_64 rng(options.seed);
  KMeansResult res;
  res.centers = seed_plus_plus(points, k, rng);
  res.labels.assign(points.rows, 0);
  std::vector<std::uint32_t> previous;
  std::vector<double> sq(points.rows);
  std::vector<double> sums(k * points.cols);
  std::vector<std::size_t> counts(k);

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    kernels::assign_nearest(options.backend, points, res.centers, res.labels, sq);
    double distortion = 0.0;
    for (double d : sq) distortion += d;
    res.distortion.push_back(distortion);
    res.iterations = it + 1;
    if (res.labels == previous) {
      res.converged = true;
      break;
    }
    previous = res.labels;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    kernels::accumulate_centroids(options.backend, points, res.labels, sums, counts);

    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      // Empty: steal the worst-served point. Zeroing its distance keeps two
      // empty clusters from grabbing the same point.
      std::size_t far = 0;
      for (std::size_t p = 1; p < points.rows; ++p)
        if (sq[p] > sq[far]) far = p;
      const std::size_t old = res.labels[far];
      auto row = points.row(far);
      for (std::size_t j = 0; j < points.cols; ++j) {
        sums[old * points.cols + j] -= row[j];
        sums[c * points.cols + j] = row[j];
      }
      --counts[old];
      counts[c] = 1;
      res.labels[far] = static_cast<std::uint32_t>(c);
      sq[far] = 0.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      auto center = res.centers.row(c);
      if (counts[c] == 0) continue;  // donor emptied by re-seeding; keep its old position
      for (std::size_t j = 0; j < points.cols; ++j)
        center[j] = static_cast<float>(sums[c * points.cols + j] / double(counts[c]));
    }
  }
  return res;
}

Vocabulary build_vocabulary(std::span<const RegionFeatureSet> all_regions, const KMeansOptions& options) {
  if (all_regions.empty()) fail("no region features to build a vocabulary from");
  const std::size_t dim = all_regions.front().dim();
  std::size_t rows = 0;
  for (const auto& r : all_regions) {
    if (r.dim() != dim) fail("photo '" + r.photo_id + "' has dim " + std::to_string(r.dim()) + ", expected " +
                             std::to_string(dim));
    rows += r.region_count();
  }
  if (rows < options.clusters)
    fail("vocabulary of " + std::to_string(options.clusters) + " words needs at least as many region rows, got " +
         std::to_string(rows));
  RowMatrix stacked(rows, dim);
  auto out = stacked.values.begin();
  for (const auto& r : all_regions) out = std::copy(r.vectors.values.begin(), r.vectors.values.end(), out);

  Vocabulary vocab;
  vocab.layer = canonical_layer_name(all_regions.front().layer);
  vocab.centers = kmeans(stacked, options).centers;
  return vocab;
}

VladDescriptor encode_vlad(const RegionFeatureSet& regions, const Vocabulary& vocab) {
  if (regions.dim() != vocab.dim())
    fail("photo '" + regions.photo_id + "': region dim " + std::to_string(regions.dim()) +
         " does not match vocabulary dim " + std::to_string(vocab.dim()));
  const std::size_t k = vocab.size();
  const std::size_t dim = vocab.dim();
  std::vector<std::uint32_t> labels(regions.region_count());
  std::vector<double> sq(regions.region_count());
  if (regions.region_count() > 0) kernels::serial::assign_nearest(regions.vectors, vocab.centers, labels, sq);

  std::vector<double> acc(k * dim, 0.0);
  for (std::size_t r = 0; r < regions.region_count(); ++r) {
    auto row = regions.vectors.row(r);
    auto center = vocab.centers.row(labels[r]);
    double* block = acc.data() + labels[r] * dim;
    for (std::size_t j = 0; j < dim; ++j) block[j] += double(row[j]) - double(center[j]);
  }

  VladDescriptor out{regions.photo_id, std::vector<float>(k * dim, 0.0f)};
  for (std::size_t c = 0; c < k; ++c) {
    const double* block = acc.data() + c * dim;
    double sqn = 0.0;
    for (std::size_t j = 0; j < dim; ++j) sqn += block[j] * block[j];
    if (sqn == 0.0) continue;
    const double norm = std::sqrt(sqn);
    for (std::size_t j = 0; j < dim; ++j) out.values[c * dim + j] = static_cast<float>(block[j] / norm);
  }
  return out;
}

std::vector<VladDescriptor> encode_vlad_all(std::span<const RegionFeatureSet> photos, const Vocabulary& vocab,
                                            kernels::Backend backend) {
  std::vector<VladDescriptor> out(photos.size());
  if (backend == kernels::Backend::serial) {
    for (std::size_t i = 0; i < photos.size(); ++i) out[i] = encode_vlad(photos[i], vocab);
    return out;
  }
  const auto n = static_cast<std::ptrdiff_t>(photos.size());
  // Exceptions cannot cross the OpenMP region; capture the first one.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = encode_vlad(photos[static_cast<std::size_t>(i)], vocab);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

VladDescriptor raw_descriptor(const RegionFeatureSet& regions) {
  return {regions.photo_id, regions.vectors.values};
}

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  RegionFeatureSet as_set{"", std::string(kVocabPrefix) + vocab.layer, vocab.centers};
  write_gsft(path, as_set);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  auto set = read_gsft(path, "");
  if (!set.layer.starts_with(kVocabPrefix)) fail("'" + path.string() + "' is not a vocabulary file");
  return {set.layer.substr(kVocabPrefix.size()), std::move(set.vectors)};
}

}  // namespace gsync
