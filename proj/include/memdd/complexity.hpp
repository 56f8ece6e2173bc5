#pragma once

#include <cstdint>
#include <string>

#include "memdd/bptt.hpp"

namespace memdd {

// Architectures with closed-form counts. memdd/lstm/gru/bilstm are also
// instantiable for empirical cross-checks; tcn/transformer are formula-only.
enum class ArchKind { lstm, gru, bilstm, tcn, transformer, memdd };

std::string to_string(ArchKind k);
ArchKind arch_kind_from_string(const std::string& s);

struct ComplexityQuery {
  ArchKind kind = ArchKind::memdd;
  long long d_h = 0;
  long long d_x = 0;
  long long L = 0;       // sequence length
  long long k = -1;      // convolution kernel size (tcn)
  long long layers = -1; // layer count (tcn)
  long long d_ff = -1;   // feedforward width (transformer)
};

struct ComplexityReport {
  long long params = 0;
  long long flops = 0;
  std::string params_formula;
  std::string flops_formula;
};

// Exact integer evaluation of the closed-form parameter count.
long long closed_params(const ComplexityQuery& q);

// Exact integer evaluation of the closed-form operation count over L steps.
long long closed_flops(const ComplexityQuery& q);

// Both counts plus rendered formulas.
ComplexityReport complexity_report(const ComplexityQuery& q);

// Operation count of one fully connected layer: 2*d_in*d_out - d_out
// (multiplies plus the adds of each dot product, no bias term). Layer
// totals add up across a network.
long long fc_flops(long long d_in, long long d_out);

enum class ParamScope { core, full };

// Sums element counts of the learnable arrays; core excludes the
// LayerNorm + FC head, full includes it.
long long count_params_empirical(const Model& m, ParamScope scope);

// Runs the instrumented forward pass for L steps and totals operations
// under the closed-form charging convention (head excluded).
long long trace_flops_empirical(const Model& m, int L);

}  // namespace memdd
