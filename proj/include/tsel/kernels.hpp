// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version. Both reduce each output element in the
// same fixed order, so their results are bit-identical for any thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "tsel/matrix.hpp"

namespace tsel::kernels {

/// 64 Rademacher signs for (seed, row, 64-column block). Bit b set means +1
/// for column 64 * block + b.
inline std::uint64_t rademacher_word(std::uint64_t seed, std::uint64_t row,
                                     std::uint64_t block) {
  // splitmix64 finalizer over a mixed key
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL;
  z ^= (row + 0x632BE59BD9B4E019ULL) * 0xBF58476D1CE4E5B9ULL;
  z ^= (block + 0x8CB92BA72F3D8DD7ULL) * 0x94D049BB133111EBULL;
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline int rademacher_sign(std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
  return ((rademacher_word(seed, row, col / 64) >> (col % 64)) & 1U) ? 1 : -1;
}

namespace serial {

std::vector<double> row_norms(const Matrix& x);
/// entry (j, i) = <q_j, c_i> / (qn_j * cn_i); no clamping, norms must be nonzero.
Matrix cosine(const Matrix& q, std::span<const double> q_norms, const Matrix& c,
              std::span<const double> c_norms);
Matrix l2_distance(const Matrix& q, const Matrix& c);
/// Rows of x mapped through an unscaled +-1 projection of shape x.cols() x out_dim.
Matrix rademacher_project(const Matrix& x, std::uint64_t seed, std::size_t out_dim);
/// out[r] = log sum_c exp((potential[c] - cost(r, c)) / epsilon)
void log_sum_exp_rows(const Matrix& cost, std::span<const double> potential,
                      double epsilon, std::span<double> out);

}  // namespace serial

namespace omp {

std::vector<double> row_norms(const Matrix& x);
Matrix cosine(const Matrix& q, std::span<const double> q_norms, const Matrix& c,
              std::span<const double> c_norms);
Matrix l2_distance(const Matrix& q, const Matrix& c);
Matrix rademacher_project(const Matrix& x, std::uint64_t seed, std::size_t out_dim);
void log_sum_exp_rows(const Matrix& cost, std::span<const double> potential,
                      double epsilon, std::span<double> out);

}  // namespace omp

/// Caps OpenMP parallelism for subsequent kernel calls (0 keeps the runtime default).
void set_max_threads(int threads);
int max_threads();

}  // namespace tsel::kernels
