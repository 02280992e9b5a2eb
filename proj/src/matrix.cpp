// SPDX-License-Identifier: Apache-2.0

#include "tsel/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsel/error.hpp"

namespace tsel {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kDegenerateInput: return "degenerate input";
    case ErrorCode::kNotConverged: return "not converged";
    case ErrorCode::kCapExceeded: return "size cap exceeded";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kBadVersion: return "unsupported version";
    case ErrorCode::kTruncated: return "truncated payload";
    case ErrorCode::kNonFinite: return "non-finite value";
  }
  return "unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kShapeMismatch,
                "matrix data has " + std::to_string(data_.size()) + " values, expected " +
                    std::to_string(rows_ * cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::kShapeMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::vector<double> Matrix::row_sums() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (double v : row(r)) out[r] += v;
  return out;
}

std::vector<double> Matrix::col_sums() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[c] += (*this)(r, c);
  return out;
}

FeatureMatrix::FeatureMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "feature matrix needs at least one row and one dim");
  }
  const auto data = values_.data();
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!std::isfinite(data[k])) {
      throw Error(ErrorCode::kNonFinite, "non-finite feature at row " +
                                             std::to_string(k / values_.cols()) + ", dim " +
                                             std::to_string(k % values_.cols()));
    }
  }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), dims());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row index " + std::to_string(indices[k]) + " out of range");
    }
    std::ranges::copy(row(indices[k]), out.row(k).begin());
  }
  return FeatureMatrix(std::move(out));
}

SimilarityMatrix::SimilarityMatrix(Matrix values) : values_(std::move(values)) {
  for (double v : values_.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite similarity");
  }
}

CostMatrix::CostMatrix(Matrix values) : values_(std::move(values)) {
  for (double v : values_.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite cost");
    if (v < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative cost");
  }
}

double CostMatrix::max_value() const {
  const auto d = values_.data();
  return d.empty() ? 0.0 : *std::ranges::max_element(d);
}

}  // namespace tsel
