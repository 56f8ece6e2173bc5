#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "memdd/numerics.hpp"

namespace memdd {

enum class CellKind { memdd, lstm, gru, bilstm };
enum class Variant { baseline, A, B, C, D, E };
enum class Activation { tanh, identity };
enum class TaskKind { classification, regression };

std::string to_string(CellKind k);
std::string to_string(Variant v);
std::string to_string(Activation a);
std::string to_string(TaskKind t);
CellKind cell_kind_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);
TaskKind task_from_string(const std::string& s);

struct ModelSpec {
  CellKind kind = CellKind::memdd;
  Variant variant = Variant::baseline;
  int d_h = 0;
  int d_x = 0;
  Activation activation = Activation::tanh;
  TaskKind task = TaskKind::classification;
  int out_dim = 0;  // class count, or P*D for regression

  // Dimension of the vector the prediction head sees.
  int head_in() const { return kind == CellKind::bilstm ? 2 * d_h : d_h; }
  void validate() const;  // throws ConfigError
};

// Learnable arrays of the Memory-DD cell. In baseline mode the single
// matrix w gates both neuron groups; variant E unties them (w2 present).
struct MemoryDDParams {
  Mat64 w1;                 // d_h x (d_h + d_x), fusion layer
  Vec64 b;                  // d_h, fusion bias
  Mat64 w;                  // d_h x d_h, shared gate matrix
  std::optional<Mat64> w2;  // d_h x d_h, group-2 gate when untied
};

// One gate block = weights over [h_prev, x] plus bias.
struct LstmParams {
  Mat64 wi, wf, wg, wo;
  Vec64 bi, bf, bg, bo;
};

struct GruParams {
  Mat64 wz, wr, wn;
  Vec64 bz, br, bn;
};

struct BiLstmParams {
  LstmParams fwd;
  LstmParams bwd;
};

using CellParams = std::variant<MemoryDDParams, LstmParams, GruParams, BiLstmParams>;

struct CellState {
  Vec64 h;
  Vec64 c;
};

CellState zero_state(const ModelSpec& spec);

// Operation counter matching the published closed-form convention:
// a matrix product charges 2*rows*cols, a gate product charges its
// length, the LSTM cell-state accumulation charges its length, and
// biases, shortcut additions, interpolation adds and activations are
// free. Only this charging reproduces the closed forms exactly.
struct FlopCounter {
  long long total = 0;
  void matvec(int rows, int cols) { total += 2LL * rows * cols; }
  void gate_product(int n) { total += n; }
  void state_add(int n) { total += n; }
};

// Cached intermediates of one Memory-DD step, enough to run the exact
// adjoint without recomputation.
struct MemddTrace {
  Vec64 x, h_prev, c_prev;
  Vec64 z;  // [h_prev, x]
  Vec64 d;  // fusion output
  Vec64 u;  // w * d        (group-1 gate)
  Vec64 a;  // pre-activation of the memory update
  Vec64 c;
  Vec64 v;  // w * c (or w2 * c)   (group-2 gate)
  Vec64 e;  // pre-activation of the decision output
  Vec64 h;
};

struct LstmTrace {
  Vec64 x, h_prev, c_prev;
  Vec64 z;  // [h_prev, x]
  Vec64 i, f, g, o;  // post-activation gates
  Vec64 c, tanh_c, h;
};

struct GruTrace {
  Vec64 x, h_prev;
  Vec64 z;      // [h_prev, x]
  Vec64 zg, r;  // update / reset gates, post-sigmoid
  Vec64 rh;     // r (.) h_prev
  Vec64 nz;     // [rh, x]
  Vec64 n;      // candidate
  Vec64 hmn;    // h_prev - n
  Vec64 h;      // n + zg (.) hmn
};

// --- Memory-DD primitive operations -------------------------------------

// d_t = w1 [h_prev, x_t] + b, with h_prev first in the concatenation.
Vec64 fuse(const MemoryDDParams& p, const Vec64& h_prev, const Vec64& x_t);

// c_t = f(w d_t (.) c_prev + d_t); variants A/B/D alter the combination.
Vec64 memory_update(const ModelSpec& spec, const MemoryDDParams& p,
                    const Vec64& d_t, const Vec64& c_prev);

// h_t = f(w c_t (.) d_t + d_t); variants A/C/D alter the combination,
// variant E gates with the untied w2.
Vec64 decide(const ModelSpec& spec, const MemoryDDParams& p, const Vec64& c_t,
             const Vec64& d_t);

// One full step: fuse -> memory_update -> decide. Handles every variant.
std::pair<Vec64, CellState> memdd_step(const ModelSpec& spec,
                                       const MemoryDDParams& p, const Vec64& x_t,
                                       const CellState& s,
                                       MemddTrace* trace = nullptr,
                                       FlopCounter* fc = nullptr);

// Checked entry for the ablation variants (rejects baseline / non-memdd).
std::pair<Vec64, CellState> variant_step(const ModelSpec& spec,
                                         const MemoryDDParams& p, const Vec64& x_t,
                                         const CellState& s,
                                         MemddTrace* trace = nullptr,
                                         FlopCounter* fc = nullptr);

// --- baseline cells ------------------------------------------------------

std::pair<Vec64, CellState> lstm_step(const LstmParams& p, const Vec64& x_t,
                                      const CellState& s, LstmTrace* trace = nullptr,
                                      FlopCounter* fc = nullptr);

std::pair<Vec64, CellState> gru_step(const GruParams& p, const Vec64& x_t,
                                     const CellState& s, GruTrace* trace = nullptr,
                                     FlopCounter* fc = nullptr);

struct BiLstmTrace {
  std::vector<LstmTrace> fwd;
  std::vector<LstmTrace> bwd;  // bwd[k] processed xs[T-1-k]
};

// Forward LSTM over t=1..T and backward LSTM over t=T..1; returns
// [final forward h, final backward h] of length 2*d_h.
Vec64 bilstm_forward(const BiLstmParams& p, const std::vector<Vec64>& xs,
                     BiLstmTrace* trace = nullptr, FlopCounter* fc = nullptr);

}  // namespace memdd
