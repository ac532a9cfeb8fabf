#pragma once

#include <cstddef>
#include <vector>

#include "common.hpp"

namespace selfonn {

// A 1D sample sequence (signal or feature map).
using Signal = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Sliding-window matrix of a signal under valid windowing (no padding):
// row m = [y(m), ..., y(m+k-1)], with len(y)-k+1 rows. Errors when the
// signal is shorter than the window.
Matrix unfold(const Signal& y, std::size_t k);

// Hadamard power stacking: [Y, Y^2, ..., Y^q] as column blocks of k columns
// each. base is treated as a plain matrix; q >= 1.
Matrix power_stack(const Matrix& base, int q_order);

// Fused unfold + power stacking; identical layout and values to
// power_stack(unfold(y, k), q).
Matrix unfold_powers(const Signal& y, std::size_t k, int q_order);

// out(m) = sum_c mat(m, c) * w(c). Per-row accumulation is strictly
// left-to-right so results are bit-reproducible; rows are independent.
Signal matvec(const Matrix& mat, const std::vector<double>& w);

// Exact adjoint of unfold: out(p) = sum over all (m, r) with m + r = p of
// grad(m, r). out_len must equal rows + cols - 1.
Signal fold_adjoint(const Matrix& grad, std::size_t out_len);

}  // namespace selfonn
