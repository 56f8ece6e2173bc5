#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memdd/errors.hpp"
#include "memdd/numerics.hpp"

using namespace memdd;

TEST_CASE("mat_vec basics") {
  Mat64 eye(2, 2);
  eye.at(0, 0) = 1;
  eye.at(1, 1) = 1;
  CHECK(mat_vec(eye, {3, 4}) == Vec64{3, 4});

  Mat64 w(2, 2);
  w.at(0, 0) = 1; w.at(0, 1) = 2;
  w.at(1, 0) = 3; w.at(1, 1) = 4;
  CHECK(mat_vec(w, {1, 1}) == Vec64{3, 7});

  Mat64 zero(1, 2);
  CHECK(mat_vec(zero, {5, 6}) == Vec64{0});

  CHECK_THROWS_AS(mat_vec(w, {1, 2, 3}), ShapeError);
}

TEST_CASE("mat_vec distributes over vector addition") {
  PrngState rng{7};
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 1 + static_cast<int>(prng_next_index(rng, 5));
    const int c = 1 + static_cast<int>(prng_next_index(rng, 5));
    Mat64 w(r, c);
    for (auto& v : w.data) v = prng_next_uniform(rng, -1e3, 1e3);
    Vec64 x(c), y(c);
    for (auto& v : x) v = prng_next_uniform(rng, -1e3, 1e3);
    for (auto& v : y) v = prng_next_uniform(rng, -1e3, 1e3);
    const Vec64 lhs = mat_vec(w, add(x, y));
    const Vec64 rhs = add(mat_vec(w, x), mat_vec(w, y));
    for (int i = 0; i < r; ++i) {
      const double scale = std::max({std::fabs(lhs[i]), std::fabs(rhs[i]), 1.0});
      CHECK(std::fabs(lhs[i] - rhs[i]) / scale < 1e-12);
    }
  }
}

TEST_CASE("mat_tvec and add_outer agree with direct evaluation") {
  Mat64 w(2, 3);
  double k = 1;
  for (auto& v : w.data) v = k++;
  const Vec64 y{2, -1};
  const Vec64 got = mat_tvec(w, y);
  // w^T y with w = [[1,2,3],[4,5,6]]
  CHECK(got == Vec64{1 * 2 - 4, 2 * 2 - 5, 3 * 2 - 6});

  Mat64 acc(2, 3);
  add_outer(acc, {1, 2}, {3, 4, 5});
  CHECK(acc.at(0, 0) == 3);
  CHECK(acc.at(1, 2) == 10);
  CHECK_THROWS_AS(add_outer(acc, {1, 2, 3}, {1}), ShapeError);
}

TEST_CASE("hadamard matches worked examples") {
  CHECK(hadamard({1.2}, {0.7}) == Vec64{1.2 * 0.7});
  CHECK(hadamard({1.2}, {0.7})[0] == doctest::Approx(0.84));
  const Vec64 r = hadamard({0.5, 0.001}, {0.7, 0.7});
  CHECK(r[0] == doctest::Approx(0.35));
  CHECK(r[1] == doctest::Approx(0.0007));
  CHECK(hadamard({3, -2, 9}, {0, 0, 0}) == Vec64{0, 0, 0});
  CHECK_THROWS_AS(hadamard({1}, {1, 2}), ShapeError);
}

TEST_CASE("hadamard is commutative with elementwise identity") {
  PrngState rng{11};
  for (int trial = 0; trial < 50; ++trial) {
    Vec64 a(4), b(4);
    for (auto& v : a) v = prng_next_uniform(rng, -10, 10);
    for (auto& v : b) v = prng_next_uniform(rng, -10, 10);
    CHECK(hadamard(a, b) == hadamard(b, a));
    CHECK(hadamard(a, {1, 1, 1, 1}) == a);
  }
}

TEST_CASE("tanh_vec values and strict open-interval bound") {
  CHECK(tanh_vec({0})[0] == 0.0);
  CHECK(tanh_vec({1})[0] == doctest::Approx(0.7615941559557649).epsilon(1e-15));
  CHECK(std::fabs(tanh_vec({20})[0] - 1.0) < 1e-15);

  PrngState rng{3};
  for (int trial = 0; trial < 200; ++trial) {
    const double x = prng_next_uniform(rng, -50, 50);
    const double y = tanh_vec({x})[0];
    CHECK(std::fabs(y) < 1.0);
  }
  CHECK(std::fabs(tanh_vec({1e300})[0]) < 1.0);
  CHECK(std::fabs(tanh_vec({-1e300})[0]) < 1.0);
}

TEST_CASE("layer_norm worked examples") {
  LayerNormParams p;
  p.gain = {1, 1, 1};
  p.bias = {0, 0, 0};
  const Vec64 y = layer_norm({1, 1, 1}, p);
  CHECK(y == Vec64{0, 0, 0});

  LayerNormParams q;
  q.gain = {1, 1};
  q.bias = {0, 0};
  q.eps = 0.0;
  CHECK(layer_norm({1, -1}, q) == Vec64{1, -1});

  q.gain = {2, 2};
  q.bias = {1, 1};
  CHECK(layer_norm({1, -1}, q) == Vec64{3, -1});

  CHECK_THROWS_AS(layer_norm({1, 2, 3}, q), ShapeError);
}

TEST_CASE("layer_norm output is standardized") {
  PrngState rng{5};
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(prng_next_index(rng, 6));
    Vec64 x(n);
    for (auto& v : x) v = prng_next_uniform(rng, -5, 5);
    x[0] += 1.0;  // keep the input non-degenerate
    LayerNormParams p;
    p.gain.assign(n, 1.0);
    p.bias.assign(n, 0.0);
    p.eps = 1e-14;
    const Vec64 y = layer_norm(x, p);
    double mu = 0, var = 0;
    for (double v : y) mu += v;
    mu /= n;
    for (double v : y) var += (v - mu) * (v - mu);
    var /= n;
    CHECK(std::fabs(mu) < 1e-9);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("adam_step worked examples") {
  // first step with g=0.5 moves by about -lr * 0.5/(0.5 + eps)
  Vec64 p{1.0};
  Vec64 g{0.5};
  AdamState s;
  s.lr = 1e-3;
  adam_step(p, g, s);
  CHECK(s.t == 1);
  CHECK(p[0] - 1.0 == doctest::Approx(-0.00099999998).epsilon(1e-9));

  // zero gradient with zero moments is the identity
  Vec64 p2{0.25, -3.5};
  Vec64 g2{0.0, 0.0};
  AdamState s2;
  adam_step(p2, g2, s2);
  CHECK(p2 == Vec64{0.25, -3.5});

  // first step against g=-2 moves by +lr
  Vec64 p3{0.0};
  Vec64 g3{-2.0};
  AdamState s3;
  s3.lr = 1e-3;
  adam_step(p3, g3, s3);
  CHECK(p3[0] == doctest::Approx(0.001).epsilon(1e-7));

  CHECK_THROWS_AS(adam_step(p3, g2, s3), ShapeError);
}

TEST_CASE("splitmix64 reference vector and determinism") {
  PrngState s{0};
  CHECK(prng_next_u64(s) == 0xE220A8397B1DCDAFULL);

  PrngState a{42}, b{42};
  for (int i = 0; i < 1000; ++i) {
    CHECK(prng_next_u64(a) == prng_next_u64(b));
  }
}

TEST_CASE("prng uniform respects the half-open range") {
  PrngState s{123};
  for (int i = 0; i < 10000; ++i) {
    const double v = prng_next_uniform(s, -0.25, 0.75);
    CHECK(v >= -0.25);
    CHECK(v < 0.75);
  }
  const double lo = 1.0;
  const double hi = std::nextafter(1.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double v = prng_next_uniform(s, lo, hi);
    CHECK(v >= lo);
    CHECK(v < hi);
  }
  CHECK_THROWS_AS(prng_next_uniform(s, 1.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(prng_next_uniform(s, 2.0, 1.0), ArgumentError);
}

TEST_CASE("prng_next_index stays in range and is deterministic") {
  PrngState a{9}, b{9};
  for (int i = 0; i < 1000; ++i) {
    const size_t k = prng_next_index(a, 7);
    CHECK(k < 7);
    CHECK(k == prng_next_index(b, 7));
  }
}
