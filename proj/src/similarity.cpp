#include "gallery_sync/similarity.hpp"

#include <cmath>

#include "gallery_sync/error.hpp"

namespace gsync {

namespace {
[[noreturn]] void fail(const std::string& msg) { throw Error("visual-features", msg); }
}  // namespace

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> photo_ids, std::vector<double> values)
    : ids_(std::move(photo_ids)), values_(std::move(values)) {
  if (values_.size() != ids_.size() * ids_.size()) fail("similarity values do not form a square matrix");
  for (std::size_t i = 0; i < ids_.size(); ++i)
    if (!index_.emplace(ids_[i], i).second) fail("duplicate photo id '" + ids_[i] + "' in similarity matrix");
}

std::size_t SimilarityMatrix::index_of(const std::string& photo_id) const {
  auto it = index_.find(photo_id);
  if (it == index_.end()) fail("photo '" + photo_id + "' is not in the similarity matrix");
  return it->second;
}

double SimilarityMatrix::at(const std::string& a, const std::string& b) const {
  return (*this)(index_of(a), index_of(b));
}

SimilarityMatrix similarity_matrix(std::span<const VladDescriptor> descriptors, kernels::Backend backend) {
  const std::size_t n = descriptors.size();
  const std::size_t len = n ? descriptors.front().values.size() : 0;
  RowMatrix rows(n, len);
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (descriptors[i].values.size() != len)
      fail("descriptor of photo '" + descriptors[i].photo_id + "' has length " +
           std::to_string(descriptors[i].values.size()) + ", expected " + std::to_string(len));
    std::copy(descriptors[i].values.begin(), descriptors[i].values.end(), rows.row(i).begin());
    ids.push_back(descriptors[i].photo_id);
  }
  std::vector<double> w(n * n);
  kernels::pairwise_distances(backend, rows, w);
  for (double& v : w) v = std::exp(-v);  // exp(-0) == 1 keeps the diagonal exact
  return SimilarityMatrix(std::move(ids), std::move(w));
}

SimilarityMatrix fuse_similarities(std::span<const SimilarityMatrix> matrices) {
  if (matrices.empty()) fail("nothing to fuse");
  const auto& first = matrices.front();
  std::vector<double> sum(first.values().size(), 0.0);
  for (const auto& m : matrices) {
    if (m.photo_ids() != first.photo_ids()) fail("fused similarity matrices must share photo ordering");
    auto v = m.values();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
  }
  const double count = static_cast<double>(matrices.size());
  for (double& v : sum) v /= count;
  return SimilarityMatrix(first.photo_ids(), std::move(sum));
}

}  // namespace gsync
