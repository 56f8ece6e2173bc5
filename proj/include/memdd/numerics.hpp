#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace memdd {

// All arithmetic in this project is 64-bit; gradient checks need the headroom.
using Vec64 = std::vector<double>;

// Dense row-major matrix.
struct Mat64 {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat64() = default;
  Mat64(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  size_t size() const { return data.size(); }
};

// y = W x
Vec64 mat_vec(const Mat64& w, const Vec64& x);
// y = W^T x (adjoint of mat_vec)
Vec64 mat_tvec(const Mat64& w, const Vec64& x);
// acc += y x^T
void add_outer(Mat64& acc, const Vec64& y, const Vec64& x);

Vec64 hadamard(const Vec64& a, const Vec64& b);
Vec64 add(const Vec64& a, const Vec64& b);
Vec64 sub(const Vec64& a, const Vec64& b);

// Elementwise tanh. Outputs are kept strictly inside (-1, 1): for large
// inputs std::tanh rounds to exactly +-1.0 in doubles, which would break
// the open-interval contract, so saturated values are nudged one ulp in.
Vec64 tanh_vec(const Vec64& x);

struct LayerNormParams {
  Vec64 gain;
  Vec64 bias;
  double eps = 1e-5;
};

// y[i] = gain[i]*(x[i]-mu)/sqrt(var+eps) + bias[i], population variance.
Vec64 layer_norm(const Vec64& x, const LayerNormParams& p);

// splitmix64. Identical seeds give identical streams on every platform.
struct PrngState {
  std::uint64_t state = 0;
};

std::uint64_t prng_next_u64(PrngState& s);

// Uniform draw in [lo, hi) built from the top 53 bits of the next output,
// so the result can never round up to hi.
double prng_next_uniform(PrngState& s, double lo, double hi);

// Draw an index in [0, n), used for deterministic shuffles.
size_t prng_next_index(PrngState& s, size_t n);

// Adam moments for one parameter array.
struct AdamState {
  Vec64 m;
  Vec64 v;
  long long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One Adam update with bias correction; increments s.t.
void adam_step(std::span<double> param, std::span<const double> grad, AdamState& s);

}  // namespace memdd
