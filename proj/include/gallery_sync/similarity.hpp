#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gallery_sync/kernels.hpp"
#include "gallery_sync/vlad.hpp"

namespace gsync {

/// Pairwise photo similarity exp(-||Vi - Vj||). Symmetric, unit diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<std::string> photo_ids, std::vector<double> values);

  std::size_t size() const { return ids_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * ids_.size() + j]; }
  double at(const std::string& a, const std::string& b) const;

  const std::vector<std::string>& photo_ids() const { return ids_; }
  std::size_t index_of(const std::string& photo_id) const;
  bool contains(const std::string& photo_id) const { return index_.count(photo_id) != 0; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> values_;
};

SimilarityMatrix similarity_matrix(std::span<const VladDescriptor> descriptors,
                                   kernels::Backend backend = kernels::Backend::parallel);

/// Element-wise mean of matrices over the same photo ordering.
SimilarityMatrix fuse_similarities(std::span<const SimilarityMatrix> matrices);

}  // namespace gsync
