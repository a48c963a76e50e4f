#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "wrongsmith/tensor.hpp"

namespace wrongsmith {

// Single LSTM layer. Gate rows are stacked [input, forget, cell, output],
// each `hidden` rows tall.
struct LstmWeights {
  Matrix input;      // 4H x X
  Matrix recurrent;  // 4H x H
  Vector bias;       // 4H

  LstmWeights() = default;
  LstmWeights(std::size_t input_size, std::size_t hidden)
      : input(4 * hidden, input_size), recurrent(4 * hidden, hidden), bias(4 * hidden, 0.0) {}

  std::size_t hidden() const { return recurrent.cols; }
  std::size_t input_size() const { return input.cols; }

  template <class Self, class F>
  static void visit(Self& self, const char* prefix, F&& f) {
    f(std::string(prefix) + ".input", self.input.data);
    f(std::string(prefix) + ".recurrent", self.recurrent.data);
    f(std::string(prefix) + ".bias", self.bias);
  }

  friend bool operator==(const LstmWeights&, const LstmWeights&) = default;
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(std::size_t hidden) { return {Vector(hidden, 0.0), Vector(hidden, 0.0)}; }
  friend bool operator==(const LstmState&, const LstmState&) = default;
};

// Everything the backward pass needs from one forward step.
struct LstmStep {
  Vector x;
  LstmState prev;
  Vector i, f, g, o;
  Vector tanh_c;
  LstmState next;
};

LstmStep lstm_forward(const LstmWeights& w, std::span<const double> x, const LstmState& prev);

// Backpropagates (dh, dc) at the step output. Accumulates weight gradients
// into `grad`, input gradient into `dx`, and writes the gradient w.r.t. the
// previous state into `dprev`.
void lstm_backward(const LstmWeights& w, const LstmStep& step, std::span<const double> dh,
                   std::span<const double> dc, LstmWeights& grad, std::span<double> dx, LstmState& dprev);

}  // namespace wrongsmith
