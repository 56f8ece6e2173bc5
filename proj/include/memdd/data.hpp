#pragma once

#include <string>
#include <utility>
#include <vector>

#include "memdd/numerics.hpp"

namespace memdd {

// "ts-cls v1": header "ts-cls v1 T=<int> D=<int> C=<int>", then one line
// per sample: integer label, a tab, and T*D space-separated decimals in
// time-major, channel-minor order.
struct ClassificationDataset {
  int T = 0;  // series length
  int D = 0;  // variable count
  int C = 0;  // class count
  struct Sample {
    int label = 0;
    std::vector<double> series;  // T*D, time-major
  };
  std::vector<Sample> samples;
};

ClassificationDataset parse_classification_file(const std::string& path);
ClassificationDataset parse_classification_text(const std::string& text,
                                                const std::string& origin = "<memory>");
std::string serialize_classification(const ClassificationDataset& ds);
void write_classification_file(const std::string& path, const ClassificationDataset& ds);

// Plain CSV: first row variable names, each later row one timestep.
struct RegressionSeries {
  int D = 0;
  std::vector<std::string> variable_names;
  std::vector<double> values;  // N*D row-major, chronological
  int N() const { return D == 0 ? 0 : static_cast<int>(values.size()) / D; }
  double at(int row, int var) const { return values[static_cast<size_t>(row) * D + var]; }
};

RegressionSeries parse_regression_csv(const std::string& path);
RegressionSeries parse_regression_csv_text(const std::string& text,
                                           const std::string& origin = "<memory>");
void write_regression_csv(const std::string& path, const RegressionSeries& s);

// First floor(N*train_fraction) rows vs the rest, order preserved.
std::pair<RegressionSeries, RegressionSeries> chronological_split(
    const RegressionSeries& s, double train_fraction = 0.7);

struct WindowedDataset {
  int L = 0;  // input length
  int P = 0;  // horizon
  int D = 0;
  struct Sample {
    std::vector<double> input;   // L*D
    std::vector<double> target;  // P*D
  };
  std::vector<Sample> samples;
};

// Sliding windows inside one segment; never crosses segment boundaries.
WindowedDataset make_windows(const RegressionSeries& segment, int L, int P);

// Per-variable min-max scaling fitted on training data only; constant
// variables map to 0.
struct Normalizer {
  Vec64 mn;
  Vec64 mx;
  bool fitted = false;

  void fit(const RegressionSeries& train);
  RegressionSeries apply(const RegressionSeries& s) const;
  double apply_value(int var, double v) const;
  double invert_value(int var, double v) const;
};

}  // namespace memdd
