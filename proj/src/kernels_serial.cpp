#include <cmath>

#include "gallery_sync/error.hpp"
#include "gallery_sync/kernels.hpp"

namespace gsync::kernels {

double squared_distance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    acc += d * d;
  }
  return acc;
}

namespace serial {

void pairwise_distances(const RowMatrix& rows, std::span<double> out) {
  const std::size_t n = rows.rows;
  if (out.size() != n * n) throw Error("kernels", "pairwise output has wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    out[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(rows.row(i), rows.row(j)));
      out[i * n + j] = d;
      out[j * n + i] = d;
    }
  }
}

void assign_nearest(const RowMatrix& points, const RowMatrix& centers, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist) {
  if (centers.rows == 0 || points.cols != centers.cols) throw Error("kernels", "assign_nearest: shape mismatch");
  for (std::size_t p = 0; p < points.rows; ++p) {
    std::uint32_t best = 0;
    double best_d = squared_distance(points.row(p), centers.row(0));
    for (std::size_t c = 1; c < centers.rows; ++c) {
      const double d = squared_distance(points.row(p), centers.row(c));
      if (d < best_d) {
        best_d = d;
        best = static_cast<std::uint32_t>(c);
      }
    }
    labels[p] = best;
    sq_dist[p] = best_d;
  }
}

void accumulate_centroids(const RowMatrix& points, std::span<const std::uint32_t> labels, std::span<double> sums,
                          std::span<std::size_t> counts) {
  const std::size_t dim = points.cols;
  for (std::size_t p = 0; p < points.rows; ++p) {
    const std::size_t c = labels[p];
    auto row = points.row(p);
    for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += row[j];
    ++counts[c];
  }
}

}  // namespace serial

void pairwise_distances(Backend b, const RowMatrix& rows, std::span<double> out) {
  b == Backend::serial ? serial::pairwise_distances(rows, out) : parallel::pairwise_distances(rows, out);
}

void assign_nearest(Backend b, const RowMatrix& points, const RowMatrix& centers, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist) {
  b == Backend::serial ? serial::assign_nearest(points, centers, labels, sq_dist)
                       : parallel::assign_nearest(points, centers, labels, sq_dist);
}

void accumulate_centroids(Backend b, const RowMatrix& points, std::span<const std::uint32_t> labels,
                          std::span<double> sums, std::span<std::size_t> counts) {
  b == Backend::serial ? serial::accumulate_centroids(points, labels, sums, counts)
                       : parallel::accumulate_centroids(points, labels, sums, counts);
}

}  // namespace gsync::kernels
