#include "acci/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "acci/error.hpp"

namespace acci {

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ContractError("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  Matrix c(a.cols(), b.cols());
  add_matmul_tn(a, b, c);
  return c;
}

void add_matmul_tn(const Matrix& a, const Matrix& b, Matrix& acc) {
  if (a.rows() != b.rows() || acc.rows() != a.cols() || acc.cols() != b.cols())
    throw ContractError("matmul_tn: shape mismatch");
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto arow = a.row(k);
    const auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      auto out = acc.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aki * brow[j];
    }
  }
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ContractError("matmul_nt: inner dimensions differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
  return c;
}

Vector project(const Matrix& w, std::span<const double> x) {
  if (w.rows() != x.size()) throw ContractError("project: input size mismatch");
  Vector y(w.cols(), 0.0);
  for (std::size_t k = 0; k < w.rows(); ++k) {
    const double xk = x[k];
    if (xk == 0.0) continue;
    const auto wrow = w.row(k);
    for (std::size_t j = 0; j < w.cols(); ++j) y[j] += xk * wrow[j];
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vector mean_rows(const Matrix& m, std::size_t begin, std::size_t end) {
  if (begin >= end || end > m.rows()) throw ContractError("mean_rows: empty or out-of-range row set");
  Vector out(m.cols(), 0.0);
  for (std::size_t r = begin; r < end; ++r) {
    const auto row = m.row(r);
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[j];
  }
  const double n = static_cast<double>(end - begin);
  for (double& v : out) v /= n;
  return out;
}

}  // namespace acci
