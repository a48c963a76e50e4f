#include "wrongsmith/tensor.hpp"

#include <algorithm>
#include <limits>

#include "wrongsmith/random.hpp"

namespace wrongsmith {

void gemv_acc(const Matrix& w, std::span<const double> x, std::span<double> y) {
  gemv_block_acc(w, 0, x, y);
}

void gemv_t_acc(const Matrix& w, std::span<const double> y_grad, std::span<double> x_grad) {
  gemv_t_block_acc(w, 0, y_grad, x_grad);
}

void outer_acc(Matrix& w_grad, std::span<const double> y_grad, std::span<const double> x) {
  outer_block_acc(w_grad, 0, y_grad, x);
}

void gemv_block_acc(const Matrix& w, std::size_t col0, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* row = w.data.data() + r * w.cols + col0;
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) sum += row[c] * x[c];
    y[r] += sum;
  }
}

void gemv_t_block_acc(const Matrix& w, std::size_t col0, std::span<const double> y_grad,
                      std::span<double> x_grad) {
  const std::size_t n = x_grad.size();
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double g = y_grad[r];
    if (g == 0.0) continue;
    const double* row = w.data.data() + r * w.cols + col0;
    for (std::size_t c = 0; c < n; ++c) x_grad[c] += row[c] * g;
  }
}

void outer_block_acc(Matrix& w_grad, std::size_t col0, std::span<const double> y_grad,
                     std::span<const double> x) {
  const std::size_t n = x.size();
  for (std::size_t r = 0; r < w_grad.rows; ++r) {
    const double g = y_grad[r];
    if (g == 0.0) continue;
    double* row = w_grad.data.data() + r * w_grad.cols + col0;
    for (std::size_t c = 0; c < n; ++c) row[c] += g * x[c];
  }
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : x) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

Vector softmax(std::span<const double> logits) {
  Vector out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

Vector log_softmax(std::span<const double> logits) {
  const double lse = log_sum_exp(logits);
  Vector out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

void fill_uniform(std::span<double> values, Rng& rng, double lo, double hi) {
  for (double& v : values) v = rng.uniform(lo, hi);
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace wrongsmith
