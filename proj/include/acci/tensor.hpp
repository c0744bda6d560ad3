#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace acci {

using Vector = std::vector<double>;

// Dense row-major matrix. Kept deliberately small: the toy encoder and the
// scoring heads only need a handful of products, and hand-written loops give
// a fixed summation order, so equal rows in produce bitwise-equal rows out.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double v);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A^T * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// C = A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// acc += A^T * B
void add_matmul_tn(const Matrix& a, const Matrix& b, Matrix& acc);

// y = W^T x, with W of shape (x.size() x out).
Vector project(const Matrix& w, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double sigmoid(double x);

// Mean of the given rows of `m`.
Vector mean_rows(const Matrix& m, std::size_t begin, std::size_t end);

}  // namespace acci
