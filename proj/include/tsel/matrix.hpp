// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tsel {

/// Dense row-major matrix of doubles. Plain storage, no invariants.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Sample representations: rows are samples, columns are feature dimensions.
/// Always non-empty and finite.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix values);
  FeatureMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : FeatureMatrix(Matrix(rows)) {}

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t dims() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t r) const { return values_.row(r); }
  double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
  const Matrix& values() const noexcept { return values_; }

  /// Rows picked by index, in the given order (duplicates allowed).
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  Matrix values_;
};

/// M queries x N candidates. Entries are finite; cosine-derived ones lie in [-1, 1].
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(Matrix values);
  SimilarityMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SimilarityMatrix(Matrix(rows)) {}

  std::size_t queries() const noexcept { return values_.rows(); }
  std::size_t candidates() const noexcept { return values_.cols(); }
  double operator()(std::size_t q, std::size_t c) const { return values_(q, c); }
  std::span<const double> row(std::size_t q) const { return values_.row(q); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

/// M queries x N candidates of nonnegative finite costs.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix values);
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : CostMatrix(Matrix(rows)) {}

  std::size_t queries() const noexcept { return values_.rows(); }
  std::size_t candidates() const noexcept { return values_.cols(); }
  double operator()(std::size_t q, std::size_t c) const { return values_(q, c); }
  std::span<const double> row(std::size_t q) const { return values_.row(q); }
  const Matrix& values() const noexcept { return values_; }

  double max_value() const;

 private:
  Matrix values_;
};

}  // namespace tsel
