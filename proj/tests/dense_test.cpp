#include <gtest/gtest.h>

#include "dyadic/dense.hpp"

using namespace dyadic;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST(Matrix, IdentityAndShape) {
  const Matrix i = Matrix::identity(3);
  EXPECT_EQ(i.rows(), 3u);
  EXPECT_EQ(i(1, 1), 1.0);
  EXPECT_EQ(i(0, 2), 0.0);
  EXPECT_TRUE(i.same_shape(Matrix(3, 3)));
  EXPECT_FALSE(i.same_shape(Matrix(3, 2)));
}

TEST(Matrix, MatvecAndTranspose) {
  const Matrix a = from_rows({{1, 2, 3}, {4, 5, 6}});
  Vector y{10, 20};
  matvec_add(a, std::vector<double>{1, 0, -1}, y);
  EXPECT_EQ(y, (Vector{8, 18}));
  Vector z(3, 0.0);
  matvec_t_add(a, std::vector<double>{1, 1}, z);
  EXPECT_EQ(z, (Vector{5, 7, 9}));
  EXPECT_EQ(transpose(a), from_rows({{1, 4}, {2, 5}, {3, 6}}));
}

TEST(Matrix, MultiplyAndOuter) {
  const Matrix a = from_rows({{1, 2}, {3, 4}});
  const Matrix b = from_rows({{0, 1}, {1, 0}});
  EXPECT_EQ(multiply(a, b), from_rows({{2, 1}, {4, 3}}));
  Matrix m(2, 3);
  add_outer(m, std::vector<double>{1, 2}, std::vector<double>{1, 0, 3}, 2.0);
  EXPECT_EQ(m, from_rows({{2, 0, 6}, {4, 0, 12}}));
}

TEST(Matrix, DotAndNorm) {
  const Vector a{1, 2, 3}, b{4, -5, 6};
  EXPECT_EQ(dot(a, b), 12.0);
  EXPECT_EQ(squared_norm(a), 14.0);
}

TEST(Matrix, RowsAndFill) {
  Matrix m(2, 2, 1.0);
  m.row(1)[0] = 7.0;
  EXPECT_EQ(m(1, 0), 7.0);
  m.fill(0.5);
  for (double v : m.values()) EXPECT_EQ(v, 0.5);
}
