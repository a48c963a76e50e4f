#pragma once

// Generic algebra over parameter structs. A parameter struct exposes
//   template <class Self, class F> static void visit(Self&, F&&)
// which calls f(name, Vector&) once per tensor in a fixed order. Gradients
// use the same struct type as the parameters they mirror.

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "wrongsmith/tensor.hpp"

namespace wrongsmith::params {

template <class P>
std::vector<std::span<double>> views(P& p) {
  std::vector<std::span<double>> out;
  P::visit(p, [&](const std::string&, Vector& v) { out.emplace_back(v); });
  return out;
}

template <class P>
std::vector<std::span<const double>> views(const P& p) {
  std::vector<std::span<const double>> out;
  P::visit(p, [&](const std::string&, const Vector& v) { out.emplace_back(v); });
  return out;
}

template <class P>
std::vector<std::string> names(const P& p) {
  std::vector<std::string> out;
  P::visit(p, [&](const std::string& name, const Vector&) { out.push_back(name); });
  return out;
}

template <class P>
std::size_t count(const P& p) {
  std::size_t n = 0;
  for (auto v : views(p)) n += v.size();
  return n;
}

template <class P>
P zeros_like(const P& p) {
  P out = p;
  for (auto v : views(out)) std::fill(v.begin(), v.end(), 0.0);
  return out;
}

// dst += a * src
template <class P>
void add_scaled(P& dst, const P& src, double a) {
  auto d = views(dst);
  auto s = views(src);
  for (std::size_t t = 0; t < d.size(); ++t) axpy(a, s[t], d[t]);
}

template <class P>
void scale(P& p, double a) {
  for (auto v : views(p)) {
    for (double& x : v) x *= a;
  }
}

template <class P>
double squared_norm(const P& p) {
  double sum = 0.0;
  for (auto v : views(p)) {
    for (double x : v) sum += x * x;
  }
  return sum;
}

template <class P>
bool finite(const P& p) {
  for (auto v : views(p)) {
    if (!all_finite(v)) return false;
  }
  return true;
}

// Flat coordinate access for finite-difference checks.
template <class P>
double& coordinate(P& p, std::size_t index) {
  for (auto v : views(p)) {
    if (index < v.size()) return v[index];
    index -= v.size();
  }
  throw std::out_of_range("parameter coordinate");
}

// One plain SGD step with the gradient rescaled to at most `clip_norm`
// (disabled when clip_norm <= 0). Returns the pre-clip gradient norm.
template <class P>
double sgd_step(P& p, const P& grad, double learning_rate, double clip_norm) {
  const double norm = std::sqrt(squared_norm(grad));
  double step = learning_rate;
  if (clip_norm > 0.0 && norm > clip_norm) step *= clip_norm / norm;
  add_scaled(p, grad, -step);
  return norm;
}

}  // namespace wrongsmith::params
