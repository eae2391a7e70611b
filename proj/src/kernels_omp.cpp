#include <cmath>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gallery_sync/error.hpp"
#include "gallery_sync/kernels.hpp"

namespace gsync::kernels {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int n) {
#ifdef _OPENMP
  if (n >= 1) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace parallel {

void pairwise_distances(const RowMatrix& rows, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(rows.rows);
  if (out.size() != rows.rows * rows.rows) throw Error("kernels", "pairwise output has wrong size");
  // Row i owns cells (i, j>i) and their mirrors; no two iterations share a cell.
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out[ui * rows.rows + ui] = 0.0;
    for (std::size_t j = ui + 1; j < rows.rows; ++j) {
      const double d = std::sqrt(squared_distance(rows.row(ui), rows.row(j)));
      out[ui * rows.rows + j] = d;
      out[j * rows.rows + ui] = d;
    }
  }
}

void assign_nearest(const RowMatrix& points, const RowMatrix& centers, std::span<std::uint32_t> labels,
                    std::span<double> sq_dist) {
  if (centers.rows == 0 || points.cols != centers.cols) throw Error("kernels", "assign_nearest: shape mismatch");
  const auto n = static_cast<std::ptrdiff_t>(points.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
    const auto p = static_cast<std::size_t>(pi);
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
  const auto d = static_cast<std::ptrdiff_t>(dim);
  // Split by column: each (center, column) sum still sees points in index order.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t jj = 0; jj < d; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    for (std::size_t p = 0; p < points.rows; ++p) sums[labels[p] * dim + j] += points.values[p * dim + j];
  }
  for (std::size_t p = 0; p < points.rows; ++p) ++counts[labels[p]];
}

}  // namespace parallel

}  // namespace gsync::kernels
