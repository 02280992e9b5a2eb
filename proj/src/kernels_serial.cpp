// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsel/kernels.hpp"

namespace tsel::kernels::serial {

std::vector<double> row_norms(const Matrix& x) {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double acc = 0.0;
    for (double v : x.row(r)) acc += v * v;
    out[r] = std::sqrt(acc);
  }
  return out;
}

Matrix cosine(const Matrix& q, std::span<const double> q_norms, const Matrix& c,
              std::span<const double> c_norms) {
  Matrix out(q.rows(), c.rows());
  for (std::size_t j = 0; j < q.rows(); ++j) {
    const auto qj = q.row(j);
    for (std::size_t i = 0; i < c.rows(); ++i) {
      const auto ci = c.row(i);
      double dot = 0.0;
      for (std::size_t k = 0; k < qj.size(); ++k) dot += qj[k] * ci[k];
      out(j, i) = dot / (q_norms[j] * c_norms[i]);
    }
  }
  return out;
}

Matrix l2_distance(const Matrix& q, const Matrix& c) {
  Matrix out(q.rows(), c.rows());
  for (std::size_t j = 0; j < q.rows(); ++j) {
    const auto qj = q.row(j);
    for (std::size_t i = 0; i < c.rows(); ++i) {
      const auto ci = c.row(i);
      double acc = 0.0;
      for (std::size_t k = 0; k < qj.size(); ++k) {
        const double diff = qj[k] - ci[k];
        acc += diff * diff;
      }
      out(j, i) = std::sqrt(acc);
    }
  }
  return out;
}

Matrix rademacher_project(const Matrix& x, std::uint64_t seed, std::size_t out_dim) {
  Matrix out(x.rows(), out_dim);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto xr = x.row(r);
    auto acc = out.row(r);
    for (std::size_t p = 0; p < xr.size(); ++p) {
      const double v = xr[p];
      if (v == 0.0) continue;
      for (std::size_t k = 0; k < out_dim; ++k) {
        acc[k] += rademacher_sign(seed, p, k) > 0 ? v : -v;
      }
    }
  }
  return out;
}

void log_sum_exp_rows(const Matrix& cost, std::span<const double> potential, double epsilon,
                      std::span<double> out) {
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    const auto cr = cost.row(r);
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cr.size(); ++c) hi = std::max(hi, (potential[c] - cr[c]) / epsilon);
    if (hi == -std::numeric_limits<double>::infinity()) {
      out[r] = hi;
      continue;
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < cr.size(); ++c) acc += std::exp((potential[c] - cr[c]) / epsilon - hi);
    out[r] = hi + std::log(acc);
  }
}

}  // namespace tsel::kernels::serial
