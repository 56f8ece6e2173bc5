#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "memdd/cells.hpp"
#include "memdd/numerics.hpp"

namespace memdd {

// LayerNorm + fully connected prediction head applied to the final
// hidden state.
struct HeadParams {
  LayerNormParams ln;
  Mat64 w;  // out_dim x head_in
  Vec64 b;  // out_dim
};

struct ModelParams {
  CellParams cell;
  HeadParams head;
};

struct Model {
  ModelSpec spec;
  ModelParams params;
};

// Gradients mirror the parameter layout exactly.
using Gradients = ModelParams;

// Flat named view over one parameter array; traversal order is fixed
// (cell arrays first, head last) and shared by the optimizer, the
// checkpoint writer and the finite-difference sweep.
struct ParamView {
  std::string name;
  double* data = nullptr;
  int rows = 0;
  int cols = 0;
  bool head = false;
  size_t size() const { return static_cast<size_t>(rows) * cols; }
};

std::vector<ParamView> param_views(ModelParams& p, const ModelSpec& spec);
std::vector<ParamView> param_views(const ModelParams& p, const ModelSpec& spec);

// Model with correctly shaped, zero-filled arrays (LayerNorm gain one).
Model make_model(const ModelSpec& spec);

// Fresh model: weights ~ uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) drawn
// from the seeded stream in traversal order, biases zero, LayerNorm
// gain one.
Model init_model(const ModelSpec& spec, std::uint64_t seed);

// Zero-filled gradient container shaped like the model.
Gradients zero_gradients(const Model& m);

struct HeadTrace {
  Vec64 input;       // final hidden state fed to the head
  Vec64 normalized;  // (x - mu) * inv_std
  Vec64 ln_out;
  double mu = 0.0;
  double inv_std = 0.0;
  Vec64 prediction;
};

struct Tape {
  std::vector<Vec64> inputs;
  std::variant<std::vector<MemddTrace>, std::vector<LstmTrace>, std::vector<GruTrace>,
               BiLstmTrace>
      steps;
  HeadTrace head;
};

// Threads the cell over the sequence from a zero state and applies the
// head; optionally records every intermediate for the backward pass.
Vec64 forward_sequence(const Model& m, const std::vector<Vec64>& xs,
                       Tape* tape = nullptr, FlopCounter* fc = nullptr);

enum class LossKind { softmax_cross_entropy, mean_squared_error };

// Per-sample losses; gradient w.r.t. the prediction written when requested.
double ce_loss(const Vec64& logits, int label, Vec64* dlogits = nullptr);
double mse_loss(const Vec64& pred, const Vec64& target, Vec64* dpred = nullptr);

// Exact reverse pass over a recorded tape; loss_grad is d(loss)/d(prediction).
// Accumulates into grads (callers zero or reuse across a minibatch).
void backward(const Tape& tape, const Model& m, const Vec64& loss_grad,
              Gradients& grads);

// One training/evaluation example. label is used for classification,
// target for regression.
struct SequenceSample {
  std::vector<Vec64> xs;
  int label = -1;
  Vec64 target;
};

struct SampleSet {
  LossKind loss = LossKind::softmax_cross_entropy;
  std::vector<SequenceSample> samples;
};

// Mean loss over the set (forward only; this is the path the
// finite-difference sweep perturbs).
double batch_loss(const Model& m, const SampleSet& set);

// Mean loss and mean gradients over the set.
double batch_loss_and_gradients(const Model& m, const SampleSet& set, Gradients& grads);

// Central finite differences against the analytic gradients over every
// parameter element. Returns the max relative error with denominator
// max(|analytic|, |numeric|, 1e-8). Throws NumericError naming the
// parameter if the loss goes non-finite.
double grad_check(Model& m, const SampleSet& set, double fd_step);

struct Optimizer {
  std::vector<AdamState> slots;  // aligned with param_views order
  double lr = 1e-3;
};

Optimizer init_optimizer(const Model& m, double lr);

// Shuffles with the seeded stream, averages gradients per minibatch,
// applies one Adam step per minibatch. Returns mean per-sample loss.
double train_epoch(Model& m, Optimizer& opt, const SampleSet& data, int batch_size,
                   PrngState& rng, std::optional<double> clip_norm = std::nullopt);

}  // namespace memdd
