#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version. Both visit each output cell with the same
// floating-point operation order, so their results are bit-identical for any
// thread count; tests hold them to that.

#include <cstdint>
#include <span>

#include "gallery_sync/features.hpp"

namespace gsync::kernels {

enum class Backend { serial, parallel };

/// Sum of squared differences, accumulated in double in index order.
double squared_distance(std::span<const float> a, std::span<const float> b);

/// Number of threads the parallel backend will use.
int thread_count();
/// Sets the OpenMP thread count (n >= 1). No-op without OpenMP.
void set_thread_count(int n);

namespace serial {

/// out[i*n + j] = Euclidean distance between rows i and j; out is n*n.
void pairwise_distances(const RowMatrix& rows, std::span<double> out);

/// Nearest center per point (ties -> lowest center index) and its squared distance.
void assign_nearest(const RowMatrix& points, const RowMatrix& centers, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist);

/// sums[c*dim + j] += point[j] for points labelled c; counts[c] += 1.
void accumulate_centroids(const RowMatrix& points, std::span<const std::uint32_t> labels, std::span<double> sums,
                          std::span<std::size_t> counts);

}  // namespace serial

namespace parallel {

void pairwise_distances(const RowMatrix& rows, std::span<double> out);
void assign_nearest(const RowMatrix& points, const RowMatrix& centers, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist);
void accumulate_centroids(const RowMatrix& points, std::span<const std::uint32_t> labels, std::span<double> sums,
                          std::span<std::size_t> counts);

}  // namespace parallel

// Backend dispatch.
void pairwise_distances(Backend b, const RowMatrix& rows, std::span<double> out);
void assign_nearest(Backend b, const RowMatrix& points, const RowMatrix& centers, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist);
void accumulate_centroids(Backend b, const RowMatrix& points, std::span<const std::uint32_t> labels,
                          std::span<double> sums, std::span<std::size_t> counts);

}  // namespace gsync::kernels
