#include "wrongsmith/lstm.hpp"

#include <cmath>

namespace wrongsmith {

LstmStep lstm_forward(const LstmWeights& w, std::span<const double> x, const LstmState& prev) {
  const std::size_t hidden = w.hidden();
  Vector pre = w.bias;
  gemv_acc(w.input, x, pre);
  gemv_acc(w.recurrent, prev.h, pre);

  LstmStep step;
  step.x.assign(x.begin(), x.end());
  step.prev = prev;
  step.i.resize(hidden);
  step.f.resize(hidden);
  step.g.resize(hidden);
  step.o.resize(hidden);
  step.tanh_c.resize(hidden);
  step.next = LstmState::zeros(hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    step.i[k] = sigmoid(pre[k]);
    step.f[k] = sigmoid(pre[hidden + k]);
    step.g[k] = std::tanh(pre[2 * hidden + k]);
    step.o[k] = sigmoid(pre[3 * hidden + k]);
    step.next.c[k] = step.f[k] * prev.c[k] + step.i[k] * step.g[k];
    step.tanh_c[k] = std::tanh(step.next.c[k]);
    step.next.h[k] = step.o[k] * step.tanh_c[k];
  }
  return step;
}

void lstm_backward(const LstmWeights& w, const LstmStep& step, std::span<const double> dh,
                   std::span<const double> dc, LstmWeights& grad, std::span<double> dx, LstmState& dprev) {
  const std::size_t hidden = w.hidden();
  Vector dpre(4 * hidden);
  dprev = LstmState::zeros(hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    const double d_o = dh[k] * step.tanh_c[k];
    const double d_c = dc[k] + dh[k] * step.o[k] * (1.0 - step.tanh_c[k] * step.tanh_c[k]);
    const double d_i = d_c * step.g[k];
    const double d_f = d_c * step.prev.c[k];
    const double d_g = d_c * step.i[k];
    dprev.c[k] = d_c * step.f[k];
    dpre[k] = d_i * step.i[k] * (1.0 - step.i[k]);
    dpre[hidden + k] = d_f * step.f[k] * (1.0 - step.f[k]);
    dpre[2 * hidden + k] = d_g * (1.0 - step.g[k] * step.g[k]);
    dpre[3 * hidden + k] = d_o * step.o[k] * (1.0 - step.o[k]);
  }
  axpy(1.0, dpre, grad.bias);
  outer_acc(grad.input, dpre, step.x);
  outer_acc(grad.recurrent, dpre, step.prev.h);
  gemv_t_acc(w.input, dpre, dx);
  gemv_t_acc(w.recurrent, dpre, dprev.h);
}

}  // namespace wrongsmith
