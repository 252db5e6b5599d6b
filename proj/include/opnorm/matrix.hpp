#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace opnorm {

// Dense real matrix in row-major order.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix ones(std::size_t rows, std::size_t cols) { return Matrix(rows, cols, 1.0); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  Matrix scaled(double c) const;
  bool all_finite() const;

  // y = M x and y = M^T x.
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> y) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double norm2(std::span<const double> v);

}  // namespace opnorm
