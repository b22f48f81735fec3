#pragma once

// Minimal row-major dense matrix kernel for the dual encoders.

#include <cstddef>
#include <span>
#include <vector>

namespace dyadic {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v);
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y += A x
void matvec_add(const Matrix& a, std::span<const double> x, std::span<double> y);
// y += A^T x
void matvec_t_add(const Matrix& a, std::span<const double> x, std::span<double> y);
// A += s * u v^T
void add_outer(Matrix& a, std::span<const double> u, std::span<const double> v, double s = 1.0);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

}  // namespace dyadic
