// SPDX-License-Identifier: Apache-2.0

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "tsel/kernels.hpp"

namespace tsel::kernels {

void set_max_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

namespace omp {

namespace {

using Index = std::int64_t;  // OpenMP loop counters

}  // namespace

std::vector<double> row_norms(const Matrix& x) {
  std::vector<double> out(x.rows());
  const Index rows = static_cast<Index>(x.rows());
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (double v : x.row(static_cast<std::size_t>(r))) acc += v * v;
    out[static_cast<std::size_t>(r)] = std::sqrt(acc);
  }
  return out;
}

Matrix cosine(const Matrix& q, std::span<const double> q_norms, const Matrix& c,
              std::span<const double> c_norms) {
  Matrix out(q.rows(), c.rows());
  const Index m = static_cast<Index>(q.rows());
  const Index n = static_cast<Index>(c.rows());
  const std::size_t dims = q.cols();
#pragma omp parallel for collapse(2) schedule(static)
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double* qj = q.row(static_cast<std::size_t>(j)).data();
      const double* ci = c.row(static_cast<std::size_t>(i)).data();
      double dot = 0.0;
      for (std::size_t k = 0; k < dims; ++k) dot += qj[k] * ci[k];
      out(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) =
          dot / (q_norms[static_cast<std::size_t>(j)] * c_norms[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

Matrix l2_distance(const Matrix& q, const Matrix& c) {
  Matrix out(q.rows(), c.rows());
  const Index m = static_cast<Index>(q.rows());
  const Index n = static_cast<Index>(c.rows());
  const std::size_t dims = q.cols();
#pragma omp parallel for collapse(2) schedule(static)
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double* qj = q.row(static_cast<std::size_t>(j)).data();
      const double* ci = c.row(static_cast<std::size_t>(i)).data();
      double acc = 0.0;
      for (std::size_t k = 0; k < dims; ++k) {
        const double diff = qj[k] - ci[k];
        acc += diff * diff;
      }
      out(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = std::sqrt(acc);
    }
  }
  return out;
}

// The sign matrix is materialized one block of input coordinates at a time
// and applied to groups of rows, so each tile is reused from cache. Every
// output element still accumulates input coordinates in increasing order.
Matrix rademacher_project(const Matrix& x, std::uint64_t seed, std::size_t out_dim) {
  constexpr std::size_t kCoordBlock = 32;
  constexpr std::size_t kColBlock = 512;
  constexpr std::size_t kRowGroup = 4;

  Matrix out(x.rows(), out_dim);
  const std::size_t in_dim = x.cols();
  const std::size_t words = (out_dim + 63) / 64;
  std::vector<double> tile(kCoordBlock * out_dim);
  const Index groups = static_cast<Index>((x.rows() + kRowGroup - 1) / kRowGroup);

  for (std::size_t p0 = 0; p0 < in_dim; p0 += kCoordBlock) {
    const std::size_t pn = std::min(kCoordBlock, in_dim - p0);
    const Index tile_rows = static_cast<Index>(pn);
#pragma omp parallel for schedule(static)
    for (Index pp = 0; pp < tile_rows; ++pp) {
      double* t = tile.data() + static_cast<std::size_t>(pp) * out_dim;
      for (std::size_t w = 0; w < words; ++w) {
        const std::uint64_t bits = rademacher_word(seed, p0 + static_cast<std::size_t>(pp), w);
        const std::size_t end = std::min<std::size_t>(64, out_dim - w * 64);
        for (std::size_t b = 0; b < end; ++b) t[w * 64 + b] = ((bits >> b) & 1U) ? 1.0 : -1.0;
      }
    }

#pragma omp parallel for schedule(static)
    for (Index g = 0; g < groups; ++g) {
      const std::size_t r0 = static_cast<std::size_t>(g) * kRowGroup;
      const std::size_t rn = std::min(kRowGroup, x.rows() - r0);
      for (std::size_t k0 = 0; k0 < out_dim; k0 += kColBlock) {
        const std::size_t kn = std::min(kColBlock, out_dim - k0);
        for (std::size_t pp = 0; pp < pn; ++pp) {
          const double* t = tile.data() + pp * out_dim + k0;
          for (std::size_t r = r0; r < r0 + rn; ++r) {
            const double v = x(r, p0 + pp);
            if (v == 0.0) continue;
            double* acc = out.row(r).data() + k0;
#pragma omp simd
            for (std::size_t k = 0; k < kn; ++k) acc[k] += v * t[k];
          }
        }
      }
    }
  }
  return out;
}

void log_sum_exp_rows(const Matrix& cost, std::span<const double> potential, double epsilon,
                      std::span<double> out) {
  const Index rows = static_cast<Index>(cost.rows());
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    const auto cr = cost.row(static_cast<std::size_t>(r));
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cr.size(); ++c) hi = std::max(hi, (potential[c] - cr[c]) / epsilon);
    if (hi == -std::numeric_limits<double>::infinity()) {
      out[static_cast<std::size_t>(r)] = hi;
      continue;
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < cr.size(); ++c) acc += std::exp((potential[c] - cr[c]) / epsilon - hi);
    out[static_cast<std::size_t>(r)] = hi + std::log(acc);
  }
}

}  // namespace omp
}  // namespace tsel::kernels
