#include "memdd/cells.hpp"

#include <cmath>

#include "memdd/errors.hpp"

namespace memdd {

std::string to_string(CellKind k) {
  switch (k) {
    case CellKind::memdd: return "memdd";
    case CellKind::lstm: return "lstm";
    case CellKind::gru: return "gru";
    case CellKind::bilstm: return "bilstm";
  }
  return "?";
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::A: return "A";
    case Variant::B: return "B";
    case Variant::C: return "C";
    case Variant::D: return "D";
    case Variant::E: return "E";
  }
  return "?";
}

std::string to_string(Activation a) {
  return a == Activation::tanh ? "tanh" : "identity";
}

std::string to_string(TaskKind t) {
  return t == TaskKind::classification ? "cls" : "reg";
}

CellKind cell_kind_from_string(const std::string& s) {
  if (s == "memdd") return CellKind::memdd;
  if (s == "lstm") return CellKind::lstm;
  if (s == "gru") return CellKind::gru;
  if (s == "bilstm") return CellKind::bilstm;
  throw ConfigError("unknown model kind '" + s + "' (expected memdd|lstm|gru|bilstm)");
}

Variant variant_from_string(const std::string& s) {
  if (s == "baseline") return Variant::baseline;
  if (s == "A") return Variant::A;
  if (s == "B") return Variant::B;
  if (s == "C") return Variant::C;
  if (s == "D") return Variant::D;
  if (s == "E") return Variant::E;
  throw ConfigError("unknown variant '" + s + "' (expected baseline|A|B|C|D|E)");
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + s + "' (expected tanh|identity)");
}

TaskKind task_from_string(const std::string& s) {
  if (s == "cls") return TaskKind::classification;
  if (s == "reg") return TaskKind::regression;
  throw ConfigError("unknown task '" + s + "' (expected cls|reg)");
}

void ModelSpec::validate() const {
  if (d_h < 1 || d_x < 1) {
    throw ConfigError("model dimensions must be >= 1, got d_h=" + std::to_string(d_h) +
                      " d_x=" + std::to_string(d_x));
  }
  if (out_dim < 1) {
    throw ConfigError("output dimension must be >= 1, got " + std::to_string(out_dim));
  }
  if (variant != Variant::baseline && kind != CellKind::memdd) {
    throw ConfigError("variant " + to_string(variant) + " requires kind memdd, got " +
                      to_string(kind));
  }
}

CellState zero_state(const ModelSpec& spec) {
  return CellState{Vec64(spec.d_h, 0.0), Vec64(spec.d_h, 0.0)};
}

namespace {

Vec64 concat(const Vec64& a, const Vec64& b) {
  Vec64 z;
  z.reserve(a.size() + b.size());
  z.insert(z.end(), a.begin(), a.end());
  z.insert(z.end(), b.begin(), b.end());
  return z;
}

Vec64 apply_activation(Activation f, const Vec64& x) {
  return f == Activation::tanh ? tanh_vec(x) : x;
}

Vec64 sigmoid_vec(const Vec64& x) {
  Vec64 y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
  return y;
}

// Pre-activation of neuron group 1 (memory update).
Vec64 group1_preact(Variant v, const Vec64& u, const Vec64& c_prev, const Vec64& d,
                    FlopCounter* fc) {
  if (fc) fc->gate_product(static_cast<int>(u.size()));
  switch (v) {
    case Variant::A:
      return add(add(u, c_prev), d);
    case Variant::B:
    case Variant::D:
      return hadamard(u, c_prev);
    default:
      return add(hadamard(u, c_prev), d);
  }
}

// Pre-activation of neuron group 2 (decision output).
Vec64 group2_preact(Variant v, const Vec64& g, const Vec64& d, FlopCounter* fc) {
  if (fc) fc->gate_product(static_cast<int>(g.size()));
  switch (v) {
    case Variant::A:
      return add(add(g, d), d);
    case Variant::C:
    case Variant::D:
      return hadamard(g, d);
    default:
      return add(hadamard(g, d), d);
  }
}

const Mat64& group2_matrix(const ModelSpec& spec, const MemoryDDParams& p) {
  if (spec.variant == Variant::E) {
    if (!p.w2) throw ConfigError("variant E requires the untied matrix w2");
    return *p.w2;
  }
  return p.w;
}

}  // namespace

Vec64 fuse(const MemoryDDParams& p, const Vec64& h_prev, const Vec64& x_t) {
  return add(mat_vec(p.w1, concat(h_prev, x_t)), p.b);
}

Vec64 memory_update(const ModelSpec& spec, const MemoryDDParams& p, const Vec64& d_t,
                    const Vec64& c_prev) {
  const Vec64 u = mat_vec(p.w, d_t);
  return apply_activation(spec.activation, group1_preact(spec.variant, u, c_prev, d_t, nullptr));
}

Vec64 decide(const ModelSpec& spec, const MemoryDDParams& p, const Vec64& c_t,
             const Vec64& d_t) {
  const Vec64 v = mat_vec(group2_matrix(spec, p), c_t);
  return apply_activation(spec.activation, group2_preact(spec.variant, v, d_t, nullptr));
}

std::pair<Vec64, CellState> memdd_step(const ModelSpec& spec, const MemoryDDParams& p,
                                       const Vec64& x_t, const CellState& s,
                                       MemddTrace* trace, FlopCounter* fc) {
  if (static_cast<int>(x_t.size()) != spec.d_x ||
      static_cast<int>(s.h.size()) != spec.d_h ||
      static_cast<int>(s.c.size()) != spec.d_h) {
    throw ShapeError("memdd_step: input length " + std::to_string(x_t.size()) +
                     " state length " + std::to_string(s.h.size()) + "/" +
                     std::to_string(s.c.size()) + " vs spec d_x=" +
                     std::to_string(spec.d_x) + " d_h=" + std::to_string(spec.d_h));
  }
  const Vec64 z = concat(s.h, x_t);
  if (fc) fc->matvec(p.w1.rows, p.w1.cols);
  const Vec64 d = add(mat_vec(p.w1, z), p.b);

  if (fc) fc->matvec(p.w.rows, p.w.cols);
  const Vec64 u = mat_vec(p.w, d);
  const Vec64 a = group1_preact(spec.variant, u, s.c, d, fc);
  const Vec64 c = apply_activation(spec.activation, a);

  const Mat64& wg2 = group2_matrix(spec, p);
  if (fc) fc->matvec(wg2.rows, wg2.cols);
  const Vec64 v = mat_vec(wg2, c);
  const Vec64 e = group2_preact(spec.variant, v, d, fc);
  const Vec64 h = apply_activation(spec.activation, e);

  if (trace) {
    trace->x = x_t;
    trace->h_prev = s.h;
    trace->c_prev = s.c;
    trace->z = z;
    trace->d = d;
    trace->u = u;
    trace->a = a;
    trace->c = c;
    trace->v = v;
    trace->e = e;
    trace->h = h;
  }
  return {h, CellState{h, c}};
}

std::pair<Vec64, CellState> variant_step(const ModelSpec& spec, const MemoryDDParams& p,
                                         const Vec64& x_t, const CellState& s,
                                         MemddTrace* trace, FlopCounter* fc) {
  if (spec.kind != CellKind::memdd) {
    throw ConfigError("variant_step requires kind memdd, got " + to_string(spec.kind));
  }
  if (spec.variant == Variant::baseline) {
    throw ConfigError("variant_step requires an ablation variant, got baseline");
  }
  return memdd_step(spec, p, x_t, s, trace, fc);
}

std::pair<Vec64, CellState> lstm_step(const LstmParams& p, const Vec64& x_t,
                                      const CellState& s, LstmTrace* trace,
                                      FlopCounter* fc) {
  const Vec64 z = concat(s.h, x_t);
  const int n = p.wi.rows;
  if (fc) {
    fc->matvec(p.wi.rows, p.wi.cols);
    fc->matvec(p.wf.rows, p.wf.cols);
    fc->matvec(p.wg.rows, p.wg.cols);
    fc->matvec(p.wo.rows, p.wo.cols);
  }
  const Vec64 i = sigmoid_vec(add(mat_vec(p.wi, z), p.bi));
  const Vec64 f = sigmoid_vec(add(mat_vec(p.wf, z), p.bf));
  const Vec64 g = tanh_vec(add(mat_vec(p.wg, z), p.bg));
  const Vec64 o = sigmoid_vec(add(mat_vec(p.wo, z), p.bo));

  if (fc) {
    fc->gate_product(n);  // f (.) c_prev
    fc->gate_product(n);  // i (.) g
    fc->state_add(n);
    fc->gate_product(n);  // o (.) tanh(c)
  }
  const Vec64 c = add(hadamard(f, s.c), hadamard(i, g));
  const Vec64 tc = tanh_vec(c);
  const Vec64 h = hadamard(o, tc);

  if (trace) {
    trace->x = x_t;
    trace->h_prev = s.h;
    trace->c_prev = s.c;
    trace->z = z;
    trace->i = i;
    trace->f = f;
    trace->g = g;
    trace->o = o;
    trace->c = c;
    trace->tanh_c = tc;
    trace->h = h;
  }
  return {h, CellState{h, c}};
}

std::pair<Vec64, CellState> gru_step(const GruParams& p, const Vec64& x_t,
                                     const CellState& s, GruTrace* trace,
                                     FlopCounter* fc) {
  const Vec64 z = concat(s.h, x_t);
  const int n = p.wz.rows;
  if (fc) {
    fc->matvec(p.wz.rows, p.wz.cols);
    fc->matvec(p.wr.rows, p.wr.cols);
  }
  const Vec64 zg = sigmoid_vec(add(mat_vec(p.wz, z), p.bz));
  const Vec64 r = sigmoid_vec(add(mat_vec(p.wr, z), p.br));

  if (fc) fc->gate_product(n);
  const Vec64 rh = hadamard(r, s.h);
  const Vec64 nz = concat(rh, x_t);
  if (fc) fc->matvec(p.wn.rows, p.wn.cols);
  const Vec64 cand = tanh_vec(add(mat_vec(p.wn, nz), p.bn));

  // h = (1-zg)(.)cand + zg(.)h_prev, written as cand + zg(.)(h_prev - cand)
  const Vec64 hmn = sub(s.h, cand);
  if (fc) fc->gate_product(n);
  const Vec64 h = add(cand, hadamard(zg, hmn));

  if (trace) {
    trace->x = x_t;
    trace->h_prev = s.h;
    trace->z = z;
    trace->zg = zg;
    trace->r = r;
    trace->rh = rh;
    trace->nz = nz;
    trace->n = cand;
    trace->hmn = hmn;
    trace->h = h;
  }
  return {h, CellState{h, Vec64(s.c.size(), 0.0)}};
}

Vec64 bilstm_forward(const BiLstmParams& p, const std::vector<Vec64>& xs,
                     BiLstmTrace* trace, FlopCounter* fc) {
  if (xs.empty()) throw ArgumentError("bilstm_forward: empty sequence");
  const int d_h = p.fwd.wi.rows;
  CellState sf{Vec64(d_h, 0.0), Vec64(d_h, 0.0)};
  CellState sb{Vec64(d_h, 0.0), Vec64(d_h, 0.0)};
  if (trace) {
    trace->fwd.resize(xs.size());
    trace->bwd.resize(xs.size());
  }
  for (size_t t = 0; t < xs.size(); ++t) {
    sf = lstm_step(p.fwd, xs[t], sf, trace ? &trace->fwd[t] : nullptr, fc).second;
  }
  for (size_t k = 0; k < xs.size(); ++k) {
    const size_t t = xs.size() - 1 - k;
    sb = lstm_step(p.bwd, xs[t], sb, trace ? &trace->bwd[k] : nullptr, fc).second;
  }
  return concat(sf.h, sb.h);
}

}  // namespace memdd
