#include "opnorm/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace opnorm {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("Matrix: data size does not match dimensions");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::scaled(double c) const {
  Matrix out = *this;
  for (auto& x : out.data_) x *= c;
  return out;
}

bool Matrix::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = data_.data() + i * cols_;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> Matrix::apply_transpose(std::span<const double> y) const {
  std::vector<double> x(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = data_.data() + i * cols_;
    const double yi = y[i];
    for (std::size_t j = 0; j < cols_; ++j) x[j] += r[j] * yi;
  }
  return x;
}

double norm2(std::span<const double> v) {
  // Scaled accumulation avoids overflow for large entries.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double ss = 0.0;
  for (double x : v) {
    const double t = x / scale;
    ss += t * t;
  }
  return scale * std::sqrt(ss);
}

}  // namespace opnorm
