#include "memdd/complexity.hpp"

#include <vector>

#include "memdd/errors.hpp"

namespace memdd {

std::string to_string(ArchKind k) {
  switch (k) {
    case ArchKind::lstm: return "lstm";
    case ArchKind::gru: return "gru";
    case ArchKind::bilstm: return "bilstm";
    case ArchKind::tcn: return "tcn";
    case ArchKind::transformer: return "transformer";
    case ArchKind::memdd: return "memdd";
  }
  return "?";
}

ArchKind arch_kind_from_string(const std::string& s) {
  if (s == "lstm") return ArchKind::lstm;
  if (s == "gru") return ArchKind::gru;
  if (s == "bilstm") return ArchKind::bilstm;
  if (s == "tcn") return ArchKind::tcn;
  if (s == "transformer") return ArchKind::transformer;
  if (s == "memdd") return ArchKind::memdd;
  throw ConfigError("unknown architecture '" + s +
                    "' (expected memdd|lstm|gru|bilstm|tcn|transformer)");
}

namespace {

void check_common(const ComplexityQuery& q) {
  if (q.d_h < 0 || q.d_x < 0) {
    throw ConfigError("complexity query: dimensions must be >= 0, got d_h=" +
                      std::to_string(q.d_h) + " d_x=" + std::to_string(q.d_x));
  }
}

void check_tcn(const ComplexityQuery& q) {
  if (q.k < 0) throw ConfigError("complexity query: tcn requires the kernel size k");
  if (q.layers < 0) throw ConfigError("complexity query: tcn requires the layer count");
}

void check_transformer(const ComplexityQuery& q) {
  if (q.d_ff < 0) {
    throw ConfigError("complexity query: transformer requires the feedforward width d_ff");
  }
}

}  // namespace

long long closed_params(const ComplexityQuery& q) {
  check_common(q);
  const long long h = q.d_h, x = q.d_x;
  switch (q.kind) {
    case ArchKind::lstm:
      return 4 * h * h + 4 * h * x + 4 * h;
    case ArchKind::gru:
      return 3 * h * h + 3 * h * x + 3 * h;
    case ArchKind::bilstm:
      return 8 * h * h + 8 * h * x + 8 * h;
    case ArchKind::tcn:
      check_tcn(q);
      return x * h + q.k * h * h * q.layers;
    case ArchKind::transformer:
      check_transformer(q);
      return x * h + 4 * h * h + 2 * h * q.d_ff;
    case ArchKind::memdd:
      return 2 * h * h + h * x + h;
  }
  throw ConfigError("closed_params: unhandled kind");
}

long long closed_flops(const ComplexityQuery& q) {
  check_common(q);
  if (q.L < 0) throw ConfigError("complexity query: L must be >= 0");
  const long long h = q.d_h, x = q.d_x, L = q.L;
  switch (q.kind) {
    case ArchKind::lstm:
      return L * (8 * h * h + 8 * h * x + 4 * h);
    case ArchKind::gru:
      return L * (6 * h * h + 6 * h * x + 2 * h);
    case ArchKind::bilstm:
      return L * (16 * h * h + 16 * h * x + 8 * h);
    case ArchKind::tcn:
      check_tcn(q);
      return 2 * L * (x * h + q.k * h * h * q.layers);
    case ArchKind::transformer:
      check_transformer(q);
      return 2 * L * x * h + 4 * L * L * h + 8 * L * h * h + 4 * L * h * q.d_ff;
    case ArchKind::memdd:
      return L * (6 * h * h + 2 * h * x + 2 * h);
  }
  throw ConfigError("closed_flops: unhandled kind");
}

ComplexityReport complexity_report(const ComplexityQuery& q) {
  ComplexityReport r;
  r.params = closed_params(q);
  r.flops = closed_flops(q);
  const std::string h = std::to_string(q.d_h);
  const std::string x = std::to_string(q.d_x);
  const std::string L = std::to_string(q.L);
  switch (q.kind) {
    case ArchKind::lstm:
      r.params_formula = "4*" + h + "^2 + 4*" + h + "*" + x + " + 4*" + h;
      r.flops_formula = L + "*(8*" + h + "^2 + 8*" + h + "*" + x + " + 4*" + h + ")";
      break;
    case ArchKind::gru:
      r.params_formula = "3*" + h + "^2 + 3*" + h + "*" + x + " + 3*" + h;
      r.flops_formula = L + "*(6*" + h + "^2 + 6*" + h + "*" + x + " + 2*" + h + ")";
      break;
    case ArchKind::bilstm:
      r.params_formula = "8*" + h + "^2 + 8*" + h + "*" + x + " + 8*" + h;
      r.flops_formula = L + "*(16*" + h + "^2 + 16*" + h + "*" + x + " + 8*" + h + ")";
      break;
    case ArchKind::tcn: {
      const std::string kk = std::to_string(q.k);
      const std::string ll = std::to_string(q.layers);
      r.params_formula = x + "*" + h + " + " + kk + "*" + h + "^2*" + ll;
      r.flops_formula = "2*" + L + "*(" + x + "*" + h + " + " + kk + "*" + h + "^2*" + ll + ")";
      break;
    }
    case ArchKind::transformer: {
      const std::string ff = std::to_string(q.d_ff);
      r.params_formula = x + "*" + h + " + 4*" + h + "^2 + 2*" + h + "*" + ff;
      r.flops_formula = "2*" + L + "*" + x + "*" + h + " + 4*" + L + "^2*" + h + " + 8*" +
                        L + "*" + h + "^2 + 4*" + L + "*" + h + "*" + ff;
      break;
    }
    case ArchKind::memdd:
      r.params_formula = "2*" + h + "^2 + " + h + "*" + x + " + " + h;
      r.flops_formula = L + "*(6*" + h + "^2 + 2*" + h + "*" + x + " + 2*" + h + ")";
      break;
  }
  return r;
}

long long fc_flops(long long d_in, long long d_out) {
  if (d_in < 1 || d_out < 1) {
    throw ArgumentError("fc_flops: dimensions must be >= 1, got d_in=" +
                        std::to_string(d_in) + " d_out=" + std::to_string(d_out));
  }
  return 2 * d_in * d_out - d_out;
}

long long count_params_empirical(const Model& m, ParamScope scope) {
  long long total = 0;
  for (const auto& v : param_views(m.params, m.spec)) {
    if (scope == ParamScope::core && v.head) continue;
    total += static_cast<long long>(v.size());
  }
  return total;
}

long long trace_flops_empirical(const Model& m, int L) {
  if (L < 1) throw ArgumentError("trace_flops_empirical: L must be >= 1");
  FlopCounter fc;
  const std::vector<Vec64> xs(static_cast<size_t>(L), Vec64(m.spec.d_x, 0.0));
  switch (m.spec.kind) {
    case CellKind::memdd: {
      const auto& p = std::get<MemoryDDParams>(m.params.cell);
      CellState s = zero_state(m.spec);
      for (const auto& x : xs) s = memdd_step(m.spec, p, x, s, nullptr, &fc).second;
      break;
    }
    case CellKind::lstm: {
      const auto& p = std::get<LstmParams>(m.params.cell);
      CellState s = zero_state(m.spec);
      for (const auto& x : xs) s = lstm_step(p, x, s, nullptr, &fc).second;
      break;
    }
    case CellKind::gru: {
      const auto& p = std::get<GruParams>(m.params.cell);
      CellState s = zero_state(m.spec);
      for (const auto& x : xs) s = gru_step(p, x, s, nullptr, &fc).second;
      break;
    }
    case CellKind::bilstm: {
      const auto& p = std::get<BiLstmParams>(m.params.cell);
      bilstm_forward(p, xs, nullptr, &fc);
      break;
    }
  }
  return fc.total;
}

}  // namespace memdd
