#include "memdd/metrics.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "memdd/errors.hpp"

namespace memdd {

void ConfusionMatrix::add(int actual, int predicted) {
  if (actual < 0 || actual >= num_classes || predicted < 0 || predicted >= num_classes) {
    throw ArgumentError("ConfusionMatrix::add: class out of range (actual=" +
                        std::to_string(actual) + " predicted=" + std::to_string(predicted) +
                        " C=" + std::to_string(num_classes) + ")");
  }
  counts[static_cast<size_t>(actual) * num_classes + predicted] += 1;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes != num_classes) {
    throw ShapeError("ConfusionMatrix::merge: class counts differ (" +
                     std::to_string(num_classes) + " vs " +
                     std::to_string(other.num_classes) + ")");
  }
  for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (long long v : counts) t += v;
  return t;
}

long long ConfusionMatrix::tp(int c) const {
  return counts[static_cast<size_t>(c) * num_classes + c];
}

long long ConfusionMatrix::fp(int c) const {
  long long s = 0;
  for (int a = 0; a < num_classes; ++a) {
    if (a != c) s += counts[static_cast<size_t>(a) * num_classes + c];
  }
  return s;
}

long long ConfusionMatrix::fn(int c) const {
  long long s = 0;
  for (int p = 0; p < num_classes; ++p) {
    if (p != c) s += counts[static_cast<size_t>(c) * num_classes + p];
  }
  return s;
}

long long ConfusionMatrix::tn(int c) const {
  return total() - tp(c) - fp(c) - fn(c);
}

double accuracy(const ConfusionMatrix& cm) {
  const long long t = cm.total();
  if (t == 0) throw ArgumentError("accuracy: empty evaluation");
  long long diag = 0;
  for (int c = 0; c < cm.num_classes; ++c) diag += cm.tp(c);
  return static_cast<double>(diag) / static_cast<double>(t);
}

std::pair<double, double> precision_recall(const ConfusionMatrix& cm, int c) {
  if (cm.total() == 0) throw ArgumentError("precision_recall: empty evaluation");
  if (c < 0 || c >= cm.num_classes) {
    throw ArgumentError("precision_recall: class " + std::to_string(c) +
                        " out of range for C=" + std::to_string(cm.num_classes));
  }
  const long long tp = cm.tp(c), fp = cm.fp(c), fn = cm.fn(c);
  const double precision =
      (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall =
      (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return {precision, recall};
}

double f1_macro(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ArgumentError("f1_macro: empty evaluation");
  double acc = 0.0;
  for (int c = 0; c < cm.num_classes; ++c) {
    const auto [p, r] = precision_recall(cm, c);
    acc += (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  return acc / static_cast<double>(cm.num_classes);
}

double mse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw ShapeError("mse: length mismatch " + std::to_string(predicted.size()) + " vs " +
                     std::to_string(actual.size()));
  }
  if (predicted.empty()) throw ArgumentError("mse: empty arrays");
  // summed in sorted order so the value is a pure function of the error
  // multiset, invariant under sample permutation
  std::vector<double> sq(predicted.size());
  for (size_t i = 0; i < predicted.size(); ++i) {
    const double e = actual[i] - predicted[i];
    sq[i] = e * e;
  }
  std::sort(sq.begin(), sq.end());
  double acc = 0.0;
  for (double v : sq) acc += v;
  return acc / static_cast<double>(predicted.size());
}

int argmax_lowest(const Vec64& v) {
  if (v.empty()) throw ArgumentError("argmax_lowest: empty vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace memdd
