#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "memdd/bptt.hpp"
#include "memdd/checkpoint.hpp"
#include "memdd/complexity.hpp"
#include "memdd/data.hpp"
#include "memdd/metrics.hpp"

namespace memdd {

using Json = nlohmann::json;

struct TrainConfig {
  TaskKind task = TaskKind::classification;
  CellKind model = CellKind::memdd;
  Variant variant = Variant::baseline;
  int hidden = -1;  // -1 resolves to 128 (cls) / 256 (reg)
  int batch = -1;   // -1 resolves to 32 (cls) / 128 (reg)
  double lr = 1e-3;
  int epochs = 100;
  std::uint64_t seed = 1;
  int L = -1;  // regression input length; unset values pair up, default 3
  int P = -1;  // regression horizon
  Activation activation = Activation::tanh;
  std::optional<double> clip_norm;
  bool normalize_cls = false;  // optional per-variable z-score for classification
  std::string data_path;
  std::string test_path;
  std::string ckpt_path;
  std::string report_path;
  bool quiet = false;     // suppress per-epoch progress lines
  int eval_workers = 1;   // shard test evaluation; metrics merge associatively,
                          // so results match the single-threaded run exactly

  void resolve_defaults();
  Json echo() const;
};

// Fills the report if report_path is set; returns the report JSON.
Json cmd_train(TrainConfig cfg);

struct EvalRequest {
  std::string ckpt_path;
  std::string data_path;  // classification file or regression series
  std::string report_path;
  int eval_workers = 1;
};

Json cmd_eval(const EvalRequest& req);

struct ComplexityRequest {
  std::vector<ArchKind> kinds;
  long long d_h = 0;
  long long d_x = 0;
  long long L = 0;
  long long k = -1;
  long long layers = -1;
  long long d_ff = -1;
  std::string report_path;
};

Json cmd_complexity(const ComplexityRequest& req);

struct GradCheckRequest {
  CellKind model = CellKind::memdd;
  Variant variant = Variant::baseline;
  TaskKind task = TaskKind::classification;
  int hidden = 4;
  int d_x = 2;
  int T = 5;
  int batch = 2;
  std::uint64_t seed = 1;
  double fd_step = 1e-5;
  std::string report_path;
};

Json cmd_gradcheck(const GradCheckRequest& req);

// Trains the baseline and variants A-E with identical seed and budget.
Json cmd_ablate(TrainConfig cfg);

// --- shared helpers used by commands, tests and the acceptance suite ----

// Classification samples as model-ready sequences (optionally z-scored).
SampleSet classification_samples(const ClassificationDataset& ds,
                                 const std::pair<Vec64, Vec64>* zscore = nullptr);

// Per-variable mean/std over every training series value.
std::pair<Vec64, Vec64> fit_zscore(const ClassificationDataset& train);

SampleSet regression_samples(const WindowedDataset& ds);

EvalReport evaluate_classification(const Model& m, const SampleSet& test, int num_classes,
                                   int workers = 1);
EvalReport evaluate_regression(const Model& m, const SampleSet& test, int P, int D,
                               const Normalizer& norm, int workers = 1);

Json eval_report_json(const EvalReport& r, TaskKind task);

}  // namespace memdd
