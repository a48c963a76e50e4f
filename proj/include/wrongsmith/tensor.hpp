#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wrongsmith {

class Rng;

using Vector = std::vector<double>;

// Row-major dense matrix. All reductions below run left to right so results
// are reproducible bit for bit.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// y += W x
void gemv_acc(const Matrix& w, std::span<const double> x, std::span<double> y);
// x_grad += W^T y_grad
void gemv_t_acc(const Matrix& w, std::span<const double> y_grad, std::span<double> x_grad);
// W_grad += y_grad x^T
void outer_acc(Matrix& w_grad, std::span<const double> y_grad, std::span<const double> x);

// W x restricted to the column block [col0, col0 + x.size()).
void gemv_block_acc(const Matrix& w, std::size_t col0, std::span<const double> x, std::span<double> y);
void gemv_t_block_acc(const Matrix& w, std::size_t col0, std::span<const double> y_grad, std::span<double> x_grad);
void outer_block_acc(Matrix& w_grad, std::size_t col0, std::span<const double> y_grad, std::span<const double> x);

void axpy(double a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_sum_exp(std::span<const double> x);
// Numerically stable softmax and log-softmax of logits.
Vector softmax(std::span<const double> logits);
Vector log_softmax(std::span<const double> logits);

void fill_uniform(std::span<double> values, Rng& rng, double lo, double hi);
bool all_finite(std::span<const double> values);

}  // namespace wrongsmith
