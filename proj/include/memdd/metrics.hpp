#pragma once

#include <span>
#include <utility>
#include <vector>

#include "memdd/numerics.hpp"

namespace memdd {

struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<long long> counts;  // actual * num_classes + predicted

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int c)
      : num_classes(c), counts(static_cast<size_t>(c) * c, 0) {}

  void add(int actual, int predicted);
  // Matrices merge associatively, so evaluation can shard and reduce.
  void merge(const ConfusionMatrix& other);
  long long total() const;
  long long tp(int c) const;
  long long fp(int c) const;
  long long fn(int c) const;
  long long tn(int c) const;
};

double accuracy(const ConfusionMatrix& cm);

// One-vs-rest view of class c; undefined denominators yield 0.
std::pair<double, double> precision_recall(const ConfusionMatrix& cm, int c);

// Unweighted mean of per-class F1.
double f1_macro(const ConfusionMatrix& cm);

double mse(std::span<const double> predicted, std::span<const double> actual);

// Deterministic argmax: ties break to the lowest index.
int argmax_lowest(const Vec64& v);

struct EvalReport {
  long long sample_count = 0;
  // classification
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  // regression (normalized scale unless noted)
  double mse = 0.0;
  double mse_raw = 0.0;
  std::vector<double> mse_per_step;
};

}  // namespace memdd
