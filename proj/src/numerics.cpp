#include "memdd/numerics.hpp"

#include <cmath>
#include <string>

#include "memdd/errors.hpp"

namespace memdd {

namespace {

[[noreturn]] void throw_len_mismatch(const char* op, size_t a, size_t b) {
  throw ShapeError(std::string(op) + ": length mismatch " + std::to_string(a) +
                   " vs " + std::to_string(b));
}

}  // namespace

Vec64 mat_vec(const Mat64& w, const Vec64& x) {
  if (static_cast<size_t>(w.cols) != x.size()) {
    throw ShapeError("mat_vec: shape mismatch " + std::to_string(w.rows) + "x" +
                     std::to_string(w.cols) + " vs vector of length " +
                     std::to_string(x.size()));
  }
  Vec64 y(w.rows, 0.0);
  for (int i = 0; i < w.rows; ++i) {
    const double* row = w.data.data() + static_cast<size_t>(i) * w.cols;
    double acc = 0.0;
    for (int j = 0; j < w.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

Vec64 mat_tvec(const Mat64& w, const Vec64& x) {
  if (static_cast<size_t>(w.rows) != x.size()) {
    throw ShapeError("mat_tvec: shape mismatch " + std::to_string(w.rows) + "x" +
                     std::to_string(w.cols) + " vs vector of length " +
                     std::to_string(x.size()));
  }
  Vec64 y(w.cols, 0.0);
  for (int i = 0; i < w.rows; ++i) {
    const double* row = w.data.data() + static_cast<size_t>(i) * w.cols;
    const double xi = x[i];
    for (int j = 0; j < w.cols; ++j) y[j] += row[j] * xi;
  }
  return y;
}

void add_outer(Mat64& acc, const Vec64& y, const Vec64& x) {
  if (static_cast<size_t>(acc.rows) != y.size() ||
      static_cast<size_t>(acc.cols) != x.size()) {
    throw ShapeError("add_outer: shape mismatch " + std::to_string(acc.rows) +
                     "x" + std::to_string(acc.cols) + " vs " +
                     std::to_string(y.size()) + " x " + std::to_string(x.size()));
  }
  for (int i = 0; i < acc.rows; ++i) {
    double* row = acc.data.data() + static_cast<size_t>(i) * acc.cols;
    const double yi = y[i];
    for (int j = 0; j < acc.cols; ++j) row[j] += yi * x[j];
  }
}

Vec64 hadamard(const Vec64& a, const Vec64& b) {
  if (a.size() != b.size()) throw_len_mismatch("hadamard", a.size(), b.size());
  Vec64 c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] * b[i];
  return c;
}

Vec64 add(const Vec64& a, const Vec64& b) {
  if (a.size() != b.size()) throw_len_mismatch("add", a.size(), b.size());
  Vec64 c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vec64 sub(const Vec64& a, const Vec64& b) {
  if (a.size() != b.size()) throw_len_mismatch("sub", a.size(), b.size());
  Vec64 c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vec64 tanh_vec(const Vec64& x) {
  static const double kInsideOne = std::nextafter(1.0, 0.0);
  Vec64 y(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double t = std::tanh(x[i]);
    if (t >= 1.0) t = kInsideOne;
    if (t <= -1.0) t = -kInsideOne;
    y[i] = t;
  }
  return y;
}

Vec64 layer_norm(const Vec64& x, const LayerNormParams& p) {
  if (x.size() != p.gain.size() || p.gain.size() != p.bias.size()) {
    throw ShapeError("layer_norm: shape mismatch x=" + std::to_string(x.size()) +
                     " gain=" + std::to_string(p.gain.size()) +
                     " bias=" + std::to_string(p.bias.size()));
  }
  const size_t n = x.size();
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mu) * (v - mu);
  var /= static_cast<double>(n);
  const double inv_std = 1.0 / std::sqrt(var + p.eps);
  Vec64 y(n);
  for (size_t i = 0; i < n; ++i) y[i] = p.gain[i] * (x[i] - mu) * inv_std + p.bias[i];
  return y;
}

std::uint64_t prng_next_u64(PrngState& s) {
  std::uint64_t z = (s.state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double prng_next_uniform(PrngState& s, double lo, double hi) {
  if (!(lo < hi)) {
    throw ArgumentError("prng_next_uniform: lo must be < hi, got lo=" +
                        std::to_string(lo) + " hi=" + std::to_string(hi));
  }
  const double u = static_cast<double>(prng_next_u64(s) >> 11) * 0x1.0p-53;
  double v = lo + (hi - lo) * u;
  // rounding can land exactly on hi when the range spans only a few ulps
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

size_t prng_next_index(PrngState& s, size_t n) {
  if (n == 0) throw ArgumentError("prng_next_index: n must be positive");
  const double u = static_cast<double>(prng_next_u64(s) >> 11) * 0x1.0p-53;
  size_t k = static_cast<size_t>(u * static_cast<double>(n));
  return k < n ? k : n - 1;
}

void adam_step(std::span<double> param, std::span<const double> grad, AdamState& s) {
  if (param.size() != grad.size()) {
    throw ShapeError("adam_step: param length " + std::to_string(param.size()) +
                     " vs grad length " + std::to_string(grad.size()));
  }
  if (s.m.empty() && s.v.empty()) {
    s.m.assign(param.size(), 0.0);
    s.v.assign(param.size(), 0.0);
  }
  if (s.m.size() != param.size() || s.v.size() != param.size()) {
    throw ShapeError("adam_step: moment length " + std::to_string(s.m.size()) +
                     " vs param length " + std::to_string(param.size()));
  }
  s.t += 1;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * g;
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * g * g;
    const double mhat = s.m[i] / bc1;
    const double vhat = s.v[i] / bc2;
    param[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
  }
}

}  // namespace memdd
