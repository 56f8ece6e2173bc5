#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "memdd/errors.hpp"
#include "memdd/metrics.hpp"
#include "memdd/numerics.hpp"

using namespace memdd;

namespace {

// binary confusion matrix with class 1 as "positive"
ConfusionMatrix binary(long long tp, long long tn, long long fp, long long fn) {
  ConfusionMatrix cm(2);
  cm.counts[1 * 2 + 1] = tp;
  cm.counts[0 * 2 + 0] = tn;
  cm.counts[0 * 2 + 1] = fp;
  cm.counts[1 * 2 + 0] = fn;
  return cm;
}

}  // namespace

TEST_CASE("accuracy worked examples") {
  CHECK(accuracy(binary(8, 7, 3, 2)) == doctest::Approx(0.75).epsilon(1e-15));

  ConfusionMatrix diag(3);
  diag.add(0, 0);
  diag.add(1, 1);
  diag.add(2, 2);
  CHECK(accuracy(diag) == 1.0);

  ConfusionMatrix off(2);
  off.add(0, 1);
  off.add(1, 0);
  CHECK(accuracy(off) == 0.0);

  ConfusionMatrix empty(2);
  CHECK_THROWS_AS(accuracy(empty), ArgumentError);
}

TEST_CASE("precision and recall with the zero convention") {
  const ConfusionMatrix cm = binary(8, 7, 3, 2);
  const auto [p, r] = precision_recall(cm, 1);
  CHECK(p == doctest::Approx(8.0 / 11.0).epsilon(1e-15));
  CHECK(r == doctest::Approx(0.8).epsilon(1e-15));

  // nothing ever predicted as class 1 -> precision 0 by convention
  ConfusionMatrix never(2);
  never.add(0, 0);
  never.add(1, 0);
  const auto [p0, r0] = precision_recall(never, 1);
  CHECK(p0 == 0.0);
  CHECK(r0 == 0.0);

  CHECK_THROWS_AS(precision_recall(cm, 5), ArgumentError);
}

TEST_CASE("macro F1 worked examples") {
  // single class with P=0.8, R=0.5 -> 2PR/(P+R) = 0.8/1.3
  ConfusionMatrix cm(2);
  // class 1: tp=4, fp=1 (p=0.8), fn=4 (r=0.5); class 0 fills the rest
  cm.counts[1 * 2 + 1] = 4;
  cm.counts[0 * 2 + 1] = 1;
  cm.counts[1 * 2 + 0] = 4;
  cm.counts[0 * 2 + 0] = 0;
  const auto [p, r] = precision_recall(cm, 1);
  CHECK(p == doctest::Approx(0.8));
  CHECK(r == doctest::Approx(0.5));
  const double f1_class1 = 2 * p * r / (p + r);
  CHECK(f1_class1 == doctest::Approx(0.8 / 1.3).epsilon(1e-12));

  ConfusionMatrix perfect(2);
  perfect.add(0, 0);
  perfect.add(1, 1);
  CHECK(f1_macro(perfect) == 1.0);

  // macro average is the unweighted mean of per-class F1:
  // class 0 perfect (f1=1), class 1 p=1 r=1/3 (f1=0.5), class 2 only
  // collects false positives (f1=0)
  ConfusionMatrix three(3);
  three.add(0, 0);
  three.add(1, 1);
  three.add(1, 2);
  three.add(1, 2);
  const auto [p1, r1] = precision_recall(three, 1);
  CHECK(2 * p1 * r1 / (p1 + r1) == doctest::Approx(0.5));
  const auto [p2, r2] = precision_recall(three, 2);
  CHECK(p2 == 0.0);
  CHECK(f1_macro(three) == doctest::Approx((1.0 + 0.5 + 0.0) / 3).epsilon(1e-12));
}

TEST_CASE("macro F1 is 1 exactly when the matrix is diagonal") {
  PrngState rng{6};
  for (int trial = 0; trial < 50; ++trial) {
    const int C = 2 + static_cast<int>(prng_next_index(rng, 4));
    ConfusionMatrix cm(C);
    bool diagonal = true;
    for (int i = 0; i < 20; ++i) {
      const int a = static_cast<int>(prng_next_index(rng, C));
      const int p = prng_next_uniform(rng, 0, 1) < 0.8
                        ? a
                        : static_cast<int>(prng_next_index(rng, C));
      if (a != p) diagonal = false;
      cm.add(a, p);
    }
    const double f1 = f1_macro(cm);
    CHECK(f1 <= 1.0);
    // every class with no samples scores zero, so require all classes seen
    bool all_seen = true;
    for (int c = 0; c < C; ++c) {
      if (cm.tp(c) + cm.fn(c) == 0) all_seen = false;
    }
    if (all_seen) CHECK((f1 == 1.0) == diagonal);
  }
}

TEST_CASE("metrics equal a brute-force recomputation from raw pairs") {
  PrngState rng{2718};
  for (int trial = 0; trial < 1000; ++trial) {
    const int C = 2 + static_cast<int>(prng_next_index(rng, 9));
    const int n = 1 + static_cast<int>(prng_next_index(rng, 200));
    std::vector<int> labels(n), preds(n);
    ConfusionMatrix cm(C);
    for (int i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(prng_next_index(rng, C));
      preds[i] = static_cast<int>(prng_next_index(rng, C));
      cm.add(labels[i], preds[i]);
    }

    long long correct = 0;
    for (int i = 0; i < n; ++i) correct += labels[i] == preds[i];
    CHECK(accuracy(cm) == static_cast<double>(correct) / n);

    double f1_sum = 0;
    for (int c = 0; c < C; ++c) {
      long long tp = 0, fp = 0, fn = 0;
      for (int i = 0; i < n; ++i) {
        if (preds[i] == c && labels[i] == c) ++tp;
        if (preds[i] == c && labels[i] != c) ++fp;
        if (preds[i] != c && labels[i] == c) ++fn;
      }
      const double p = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
      const double r = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
      const auto [pp, rr] = precision_recall(cm, c);
      CHECK(pp == p);
      CHECK(rr == r);
      f1_sum += (p + r) == 0.0 ? 0.0 : 2 * p * r / (p + r);
    }
    CHECK(f1_macro(cm) == f1_sum / C);
  }
}

TEST_CASE("confusion matrices merge associatively") {
  PrngState rng{31415};
  ConfusionMatrix whole(4), part1(4), part2(4);
  for (int i = 0; i < 200; ++i) {
    const int a = static_cast<int>(prng_next_index(rng, 4));
    const int p = static_cast<int>(prng_next_index(rng, 4));
    whole.add(a, p);
    (i % 2 ? part1 : part2).add(a, p);
  }
  part1.merge(part2);
  CHECK(part1.counts == whole.counts);
  CHECK(accuracy(part1) == accuracy(whole));
  CHECK(f1_macro(part1) == f1_macro(whole));
}

TEST_CASE("mse worked examples and invariances") {
  CHECK(mse(std::vector<double>{1, 2}, std::vector<double>{1, 3}) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mse(std::vector<double>{4, 5, 6}, std::vector<double>{4, 5, 6}) == 0.0);

  // homogeneity: scaling both by 3 scales the value by 9
  const std::vector<double> y{0.5, -1.0, 2.0};
  const std::vector<double> yh{0.4, -0.7, 2.5};
  std::vector<double> y3, yh3;
  for (double v : y) y3.push_back(3 * v);
  for (double v : yh) yh3.push_back(3 * v);
  CHECK(mse(y3, yh3) == doctest::Approx(9 * mse(y, yh)).epsilon(1e-12));

  CHECK_THROWS_AS(mse(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeError);

  // permuting paired samples leaves the value bit-identical
  PrngState rng{8};
  std::vector<double> a(257), b(257);
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = prng_next_uniform(rng, -5, 5);
    b[i] = prng_next_uniform(rng, -5, 5);
  }
  const double base = mse(a, b);
  std::vector<double> pa = a, pb = b;
  for (size_t i = pa.size(); i-- > 1;) {
    const size_t j = prng_next_index(rng, i + 1);
    std::swap(pa[i], pa[j]);
    std::swap(pb[i], pb[j]);
  }
  CHECK(mse(pa, pb) == base);

  // matches a direct high-precision summation to 1e-12 relative
  long double acc = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const long double e = static_cast<long double>(b[i]) - a[i];
    acc += e * e;
  }
  const double direct = static_cast<double>(acc / a.size());
  CHECK(std::fabs(base - direct) / direct < 1e-12);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax_lowest({1, 3, 3, 2}) == 1);
  CHECK(argmax_lowest({5}) == 0);
  CHECK(argmax_lowest({2, 2, 2}) == 0);
  CHECK_THROWS_AS(argmax_lowest({}), ArgumentError);
}
