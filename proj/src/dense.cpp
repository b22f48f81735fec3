#include "dyadic/dense.hpp"

#include <algorithm>
#include <cassert>

namespace dyadic {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void matvec_add(const Matrix& a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == a.cols() && y.size() == a.rows());
  const std::size_t n = a.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* row = a.row(r).data();
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

void matvec_t_add(const Matrix& a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == a.rows() && y.size() == a.cols());
  const std::size_t n = a.cols();
  double* out = y.data();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const double* row = a.row(r).data();
    for (std::size_t c = 0; c < n; ++c) out[c] += row[c] * xr;
  }
}

void add_outer(Matrix& a, std::span<const double> u, std::span<const double> v, double s) {
  assert(u.size() == a.rows() && v.size() == a.cols());
  const std::size_t n = a.cols();
  const double* vp = v.data();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double ur = s * u[r];
    if (ur == 0.0) continue;
    double* row = a.row(r).data();
    for (std::size_t c = 0; c < n; ++c) row[c] += ur * vp[c];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

Matrix multiply(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

}  // namespace dyadic
