#include "memdd/bptt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memdd/errors.hpp"

namespace memdd {

namespace {

void append_views(std::vector<ParamView>& out, const std::string& prefix, LstmParams& p) {
  const auto mat = [&](const char* n, Mat64& m) {
    out.push_back({prefix + n, m.data.data(), m.rows, m.cols, false});
  };
  const auto vec = [&](const char* n, Vec64& v) {
    out.push_back({prefix + n, v.data(), 1, static_cast<int>(v.size()), false});
  };
  mat("Wi", p.wi);
  vec("bi", p.bi);
  mat("Wf", p.wf);
  vec("bf", p.bf);
  mat("Wg", p.wg);
  vec("bg", p.bg);
  mat("Wo", p.wo);
  vec("bo", p.bo);
}

}  // namespace

std::vector<ParamView> param_views(ModelParams& p, const ModelSpec& spec) {
  std::vector<ParamView> out;
  const auto mat = [&](const char* n, Mat64& m) {
    out.push_back({n, m.data.data(), m.rows, m.cols, false});
  };
  const auto vec = [&](const char* n, Vec64& v) {
    out.push_back({n, v.data(), 1, static_cast<int>(v.size()), false});
  };
  switch (spec.kind) {
    case CellKind::memdd: {
      auto& c = std::get<MemoryDDParams>(p.cell);
      mat("W1", c.w1);
      vec("b", c.b);
      mat("W", c.w);
      if (c.w2) mat("W2", *c.w2);
      break;
    }
    case CellKind::lstm:
      append_views(out, "", std::get<LstmParams>(p.cell));
      break;
    case CellKind::gru: {
      auto& c = std::get<GruParams>(p.cell);
      mat("Wz", c.wz);
      vec("bz", c.bz);
      mat("Wr", c.wr);
      vec("br", c.br);
      mat("Wn", c.wn);
      vec("bn", c.bn);
      break;
    }
    case CellKind::bilstm: {
      auto& c = std::get<BiLstmParams>(p.cell);
      append_views(out, "fwd_", c.fwd);
      append_views(out, "bwd_", c.bwd);
      break;
    }
  }
  out.push_back({"ln_gain", p.head.ln.gain.data(), 1,
                 static_cast<int>(p.head.ln.gain.size()), true});
  out.push_back({"ln_bias", p.head.ln.bias.data(), 1,
                 static_cast<int>(p.head.ln.bias.size()), true});
  out.push_back({"head_W", p.head.w.data.data(), p.head.w.rows, p.head.w.cols, true});
  out.push_back({"head_b", p.head.b.data(), 1, static_cast<int>(p.head.b.size()), true});
  return out;
}

std::vector<ParamView> param_views(const ModelParams& p, const ModelSpec& spec) {
  return param_views(const_cast<ModelParams&>(p), spec);
}

namespace {

LstmParams make_lstm_params(int d_h, int d_x) {
  LstmParams p;
  const int in = d_h + d_x;
  p.wi = Mat64(d_h, in);
  p.wf = Mat64(d_h, in);
  p.wg = Mat64(d_h, in);
  p.wo = Mat64(d_h, in);
  p.bi = Vec64(d_h, 0.0);
  p.bf = Vec64(d_h, 0.0);
  p.bg = Vec64(d_h, 0.0);
  p.bo = Vec64(d_h, 0.0);
  return p;
}

ModelParams make_params(const ModelSpec& spec) {
  ModelParams p;
  switch (spec.kind) {
    case CellKind::memdd: {
      MemoryDDParams c;
      c.w1 = Mat64(spec.d_h, spec.d_h + spec.d_x);
      c.b = Vec64(spec.d_h, 0.0);
      c.w = Mat64(spec.d_h, spec.d_h);
      if (spec.variant == Variant::E) c.w2 = Mat64(spec.d_h, spec.d_h);
      p.cell = std::move(c);
      break;
    }
    case CellKind::lstm:
      p.cell = make_lstm_params(spec.d_h, spec.d_x);
      break;
    case CellKind::gru: {
      GruParams c;
      const int in = spec.d_h + spec.d_x;
      c.wz = Mat64(spec.d_h, in);
      c.wr = Mat64(spec.d_h, in);
      c.wn = Mat64(spec.d_h, in);
      c.bz = Vec64(spec.d_h, 0.0);
      c.br = Vec64(spec.d_h, 0.0);
      c.bn = Vec64(spec.d_h, 0.0);
      p.cell = std::move(c);
      break;
    }
    case CellKind::bilstm: {
      BiLstmParams c;
      c.fwd = make_lstm_params(spec.d_h, spec.d_x);
      c.bwd = make_lstm_params(spec.d_h, spec.d_x);
      p.cell = std::move(c);
      break;
    }
  }
  const int hin = spec.head_in();
  p.head.ln.gain = Vec64(hin, 1.0);
  p.head.ln.bias = Vec64(hin, 0.0);
  p.head.ln.eps = 1e-5;
  p.head.w = Mat64(spec.out_dim, hin);
  p.head.b = Vec64(spec.out_dim, 0.0);
  return p;
}

bool is_weight_matrix(const ParamView& v) {
  return v.name.find('W') != std::string::npos;
}

}  // namespace

Model make_model(const ModelSpec& spec) {
  spec.validate();
  return Model{spec, make_params(spec)};
}

Model init_model(const ModelSpec& spec, std::uint64_t seed) {
  Model m = make_model(spec);
  PrngState rng{seed};
  for (auto& v : param_views(m.params, spec)) {
    if (!is_weight_matrix(v)) continue;  // biases stay zero, gain stays one
    const double bound = 1.0 / std::sqrt(static_cast<double>(v.cols));
    for (size_t i = 0; i < v.size(); ++i) {
      v.data[i] = prng_next_uniform(rng, -bound, bound);
    }
  }
  return m;
}

Gradients zero_gradients(const Model& m) {
  Gradients g = m.params;
  for (auto& v : param_views(g, m.spec)) {
    std::fill(v.data, v.data + v.size(), 0.0);
  }
  return g;
}

namespace {

void head_forward(const HeadParams& head, const Vec64& x, HeadTrace* tr, Vec64& pred) {
  const size_t n = x.size();
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mu) * (v - mu);
  var /= static_cast<double>(n);
  const double inv_std = 1.0 / std::sqrt(var + head.ln.eps);
  Vec64 normalized(n);
  for (size_t i = 0; i < n; ++i) normalized[i] = (x[i] - mu) * inv_std;
  Vec64 ln_out(n);
  for (size_t i = 0; i < n; ++i) ln_out[i] = head.ln.gain[i] * normalized[i] + head.ln.bias[i];
  pred = add(mat_vec(head.w, ln_out), head.b);
  if (tr) {
    tr->input = x;
    tr->normalized = std::move(normalized);
    tr->ln_out = std::move(ln_out);
    tr->mu = mu;
    tr->inv_std = inv_std;
    tr->prediction = pred;
  }
}

// Returns the gradient w.r.t. the head input.
Vec64 head_backward(const HeadParams& head, const HeadTrace& tr, const Vec64& g_pred,
                    HeadParams& grads) {
  for (size_t i = 0; i < g_pred.size(); ++i) grads.b[i] += g_pred[i];
  add_outer(grads.w, g_pred, tr.ln_out);
  const Vec64 g_ln_out = mat_tvec(head.w, g_pred);
  const size_t n = g_ln_out.size();
  Vec64 g_xhat(n);
  for (size_t i = 0; i < n; ++i) {
    grads.ln.gain[i] += g_ln_out[i] * tr.normalized[i];
    grads.ln.bias[i] += g_ln_out[i];
    g_xhat[i] = g_ln_out[i] * head.ln.gain[i];
  }
  double mean_g = 0.0, mean_gx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean_g += g_xhat[i];
    mean_gx += g_xhat[i] * tr.normalized[i];
  }
  mean_g /= static_cast<double>(n);
  mean_gx /= static_cast<double>(n);
  Vec64 g_x(n);
  for (size_t i = 0; i < n; ++i) {
    g_x[i] = tr.inv_std * (g_xhat[i] - mean_g - tr.normalized[i] * mean_gx);
  }
  return g_x;
}

Vec64 activation_grad(Activation f, const Vec64& out, const Vec64& upstream) {
  if (f == Activation::identity) return upstream;
  Vec64 g(out.size());
  for (size_t i = 0; i < out.size(); ++i) g[i] = upstream[i] * (1.0 - out[i] * out[i]);
  return g;
}

Vec64 sigmoid_grad(const Vec64& out, const Vec64& upstream) {
  Vec64 g(out.size());
  for (size_t i = 0; i < out.size(); ++i) g[i] = upstream[i] * out[i] * (1.0 - out[i]);
  return g;
}

Vec64 tanh_grad(const Vec64& out, const Vec64& upstream) {
  Vec64 g(out.size());
  for (size_t i = 0; i < out.size(); ++i) g[i] = upstream[i] * (1.0 - out[i] * out[i]);
  return g;
}

// Reverse pass over one Memory-DD step. Consumes the gradients flowing
// into h_t and c_t, emits the gradients flowing into h_{t-1} and c_{t-1}.
// The shared matrix accumulates contributions from BOTH neuron groups
// unless variant E unties them.
void memdd_step_backward(const ModelSpec& spec, const MemoryDDParams& p,
                         const MemddTrace& tr, Vec64& gh, Vec64& gc,
                         MemoryDDParams& grads) {
  const int d_h = spec.d_h;
  const Variant var = spec.variant;

  const Vec64 ge = activation_grad(spec.activation, tr.h, gh);

  // decision output: e = v (.) d + d  (A: v + 2d; C/D: v (.) d)
  Vec64 gv, gd;
  if (var == Variant::A) {
    gv = ge;
    gd = add(ge, ge);
  } else {
    gv = hadamard(ge, tr.d);
    gd = hadamard(ge, tr.v);
    if (var != Variant::C && var != Variant::D) gd = add(gd, ge);
  }
  Mat64& g2_grad = (var == Variant::E) ? *grads.w2 : grads.w;
  const Mat64& g2_mat = (var == Variant::E) ? *p.w2 : p.w;
  add_outer(g2_grad, gv, tr.c);
  Vec64 gc_total = add(mat_tvec(g2_mat, gv), gc);

  const Vec64 ga = activation_grad(spec.activation, tr.c, gc_total);

  // memory update: a = u (.) c_prev + d  (A: u + c_prev + d; B/D: u (.) c_prev)
  Vec64 gu, gc_prev;
  if (var == Variant::A) {
    gu = ga;
    gc_prev = ga;
    gd = add(gd, ga);
  } else {
    gu = hadamard(ga, tr.c_prev);
    gc_prev = hadamard(ga, tr.u);
    if (var != Variant::B && var != Variant::D) gd = add(gd, ga);
  }
  add_outer(grads.w, gu, tr.d);
  gd = add(gd, mat_tvec(p.w, gu));

  // fusion: d = W1 [h_prev, x] + b
  add_outer(grads.w1, gd, tr.z);
  for (int i = 0; i < d_h; ++i) grads.b[i] += gd[i];
  const Vec64 gz = mat_tvec(p.w1, gd);
  gh.assign(gz.begin(), gz.begin() + d_h);
  gc = std::move(gc_prev);
}

void lstm_step_backward(const LstmParams& p, const LstmTrace& tr, Vec64& gh, Vec64& gc,
                        LstmParams& grads) {
  const int d_h = static_cast<int>(tr.h.size());
  const Vec64 go = hadamard(gh, tr.tanh_c);
  const Vec64 gtc = hadamard(gh, tr.o);
  Vec64 gc_total = add(gc, tanh_grad(tr.tanh_c, gtc));

  const Vec64 gf = hadamard(gc_total, tr.c_prev);
  const Vec64 gi = hadamard(gc_total, tr.g);
  const Vec64 gg = hadamard(gc_total, tr.i);
  Vec64 gc_prev = hadamard(gc_total, tr.f);

  const Vec64 gi_pre = sigmoid_grad(tr.i, gi);
  const Vec64 gf_pre = sigmoid_grad(tr.f, gf);
  const Vec64 gg_pre = tanh_grad(tr.g, gg);
  const Vec64 go_pre = sigmoid_grad(tr.o, go);

  add_outer(grads.wi, gi_pre, tr.z);
  add_outer(grads.wf, gf_pre, tr.z);
  add_outer(grads.wg, gg_pre, tr.z);
  add_outer(grads.wo, go_pre, tr.z);
  for (int i = 0; i < d_h; ++i) {
    grads.bi[i] += gi_pre[i];
    grads.bf[i] += gf_pre[i];
    grads.bg[i] += gg_pre[i];
    grads.bo[i] += go_pre[i];
  }
  Vec64 gz = mat_tvec(p.wi, gi_pre);
  gz = add(gz, mat_tvec(p.wf, gf_pre));
  gz = add(gz, mat_tvec(p.wg, gg_pre));
  gz = add(gz, mat_tvec(p.wo, go_pre));
  gh.assign(gz.begin(), gz.begin() + d_h);
  gc = std::move(gc_prev);
}

void gru_step_backward(const GruParams& p, const GruTrace& tr, Vec64& gh,
                       GruParams& grads) {
  const int d_h = static_cast<int>(tr.h.size());
  // h = n + zg (.) (h_prev - n)
  const Vec64 gzg = hadamard(gh, tr.hmn);
  const Vec64 g_hmn = hadamard(gh, tr.zg);
  const Vec64 gn = sub(gh, g_hmn);
  Vec64 gh_prev = g_hmn;

  const Vec64 gn_pre = tanh_grad(tr.n, gn);
  add_outer(grads.wn, gn_pre, tr.nz);
  for (int i = 0; i < d_h; ++i) grads.bn[i] += gn_pre[i];
  const Vec64 g_nz = mat_tvec(p.wn, gn_pre);
  const Vec64 g_rh(g_nz.begin(), g_nz.begin() + d_h);

  const Vec64 gr = hadamard(g_rh, tr.h_prev);
  gh_prev = add(gh_prev, hadamard(g_rh, tr.r));

  const Vec64 gzg_pre = sigmoid_grad(tr.zg, gzg);
  const Vec64 gr_pre = sigmoid_grad(tr.r, gr);
  add_outer(grads.wz, gzg_pre, tr.z);
  add_outer(grads.wr, gr_pre, tr.z);
  for (int i = 0; i < d_h; ++i) {
    grads.bz[i] += gzg_pre[i];
    grads.br[i] += gr_pre[i];
  }
  Vec64 gz = mat_tvec(p.wz, gzg_pre);
  gz = add(gz, mat_tvec(p.wr, gr_pre));
  for (int i = 0; i < d_h; ++i) gh_prev[i] += gz[i];
  gh = std::move(gh_prev);
}

}  // namespace

Vec64 forward_sequence(const Model& m, const std::vector<Vec64>& xs, Tape* tape,
                       FlopCounter* fc) {
  if (xs.empty()) throw ArgumentError("forward_sequence: empty sequence");
  const ModelSpec& spec = m.spec;
  if (tape) tape->inputs = xs;

  Vec64 head_input;
  switch (spec.kind) {
    case CellKind::memdd: {
      const auto& p = std::get<MemoryDDParams>(m.params.cell);
      std::vector<MemddTrace>* traces = nullptr;
      if (tape) {
        tape->steps = std::vector<MemddTrace>(xs.size());
        traces = &std::get<std::vector<MemddTrace>>(tape->steps);
      }
      CellState s = zero_state(spec);
      for (size_t t = 0; t < xs.size(); ++t) {
        s = memdd_step(spec, p, xs[t], s, traces ? &(*traces)[t] : nullptr, fc).second;
      }
      head_input = s.h;
      break;
    }
    case CellKind::lstm: {
      const auto& p = std::get<LstmParams>(m.params.cell);
      std::vector<LstmTrace>* traces = nullptr;
      if (tape) {
        tape->steps = std::vector<LstmTrace>(xs.size());
        traces = &std::get<std::vector<LstmTrace>>(tape->steps);
      }
      CellState s = zero_state(spec);
      for (size_t t = 0; t < xs.size(); ++t) {
        s = lstm_step(p, xs[t], s, traces ? &(*traces)[t] : nullptr, fc).second;
      }
      head_input = s.h;
      break;
    }
    case CellKind::gru: {
      const auto& p = std::get<GruParams>(m.params.cell);
      std::vector<GruTrace>* traces = nullptr;
      if (tape) {
        tape->steps = std::vector<GruTrace>(xs.size());
        traces = &std::get<std::vector<GruTrace>>(tape->steps);
      }
      CellState s = zero_state(spec);
      for (size_t t = 0; t < xs.size(); ++t) {
        s = gru_step(p, xs[t], s, traces ? &(*traces)[t] : nullptr, fc).second;
      }
      head_input = s.h;
      break;
    }
    case CellKind::bilstm: {
      const auto& p = std::get<BiLstmParams>(m.params.cell);
      BiLstmTrace* tr = nullptr;
      if (tape) {
        tape->steps = BiLstmTrace{};
        tr = &std::get<BiLstmTrace>(tape->steps);
      }
      head_input = bilstm_forward(p, xs, tr, fc);
      break;
    }
  }

  Vec64 pred;
  head_forward(m.params.head, head_input, tape ? &tape->head : nullptr, pred);
  return pred;
}

double ce_loss(const Vec64& logits, int label, Vec64* dlogits) {
  if (label < 0 || static_cast<size_t>(label) >= logits.size()) {
    throw ArgumentError("ce_loss: label " + std::to_string(label) +
                        " out of range for " + std::to_string(logits.size()) +
                        " classes");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  if (dlogits) {
    dlogits->assign(logits.size(), 0.0);
    for (size_t i = 0; i < logits.size(); ++i) {
      (*dlogits)[i] = std::exp(logits[i] - mx) / sum;
    }
    (*dlogits)[label] -= 1.0;
  }
  return lse - logits[label];
}

double mse_loss(const Vec64& pred, const Vec64& target, Vec64* dpred) {
  if (pred.size() != target.size()) {
    throw ShapeError("mse_loss: length mismatch " + std::to_string(pred.size()) +
                     " vs " + std::to_string(target.size()));
  }
  const double n = static_cast<double>(pred.size());
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    acc += e * e;
  }
  if (dpred) {
    dpred->assign(pred.size(), 0.0);
    for (size_t i = 0; i < pred.size(); ++i) {
      (*dpred)[i] = 2.0 * (pred[i] - target[i]) / n;
    }
  }
  return acc / n;
}

void backward(const Tape& tape, const Model& m, const Vec64& loss_grad,
              Gradients& grads) {
  const ModelSpec& spec = m.spec;
  const size_t T = tape.inputs.size();
  if (T == 0) throw ConfigError("backward: tape is empty");

  Vec64 g_head_in = head_backward(m.params.head, tape.head, loss_grad, grads.head);

  switch (spec.kind) {
    case CellKind::memdd: {
      const auto* traces = std::get_if<std::vector<MemddTrace>>(&tape.steps);
      if (!traces || traces->size() != T) {
        throw ConfigError("backward: tape does not match a memdd model");
      }
      const auto& p = std::get<MemoryDDParams>(m.params.cell);
      auto& g = std::get<MemoryDDParams>(grads.cell);
      Vec64 gh = std::move(g_head_in);
      Vec64 gc(spec.d_h, 0.0);
      for (size_t t = T; t-- > 0;) {
        memdd_step_backward(spec, p, (*traces)[t], gh, gc, g);
      }
      break;
    }
    case CellKind::lstm: {
      const auto* traces = std::get_if<std::vector<LstmTrace>>(&tape.steps);
      if (!traces || traces->size() != T) {
        throw ConfigError("backward: tape does not match an lstm model");
      }
      const auto& p = std::get<LstmParams>(m.params.cell);
      auto& g = std::get<LstmParams>(grads.cell);
      Vec64 gh = std::move(g_head_in);
      Vec64 gc(spec.d_h, 0.0);
      for (size_t t = T; t-- > 0;) {
        lstm_step_backward(p, (*traces)[t], gh, gc, g);
      }
      break;
    }
    case CellKind::gru: {
      const auto* traces = std::get_if<std::vector<GruTrace>>(&tape.steps);
      if (!traces || traces->size() != T) {
        throw ConfigError("backward: tape does not match a gru model");
      }
      const auto& p = std::get<GruParams>(m.params.cell);
      auto& g = std::get<GruParams>(grads.cell);
      Vec64 gh = std::move(g_head_in);
      for (size_t t = T; t-- > 0;) {
        gru_step_backward(p, (*traces)[t], gh, g);
      }
      break;
    }
    case CellKind::bilstm: {
      const auto* tr = std::get_if<BiLstmTrace>(&tape.steps);
      if (!tr || tr->fwd.size() != T || tr->bwd.size() != T) {
        throw ConfigError("backward: tape does not match a bilstm model");
      }
      const auto& p = std::get<BiLstmParams>(m.params.cell);
      auto& g = std::get<BiLstmParams>(grads.cell);
      Vec64 ghf(g_head_in.begin(), g_head_in.begin() + spec.d_h);
      Vec64 ghb(g_head_in.begin() + spec.d_h, g_head_in.end());
      Vec64 gc(spec.d_h, 0.0);
      for (size_t t = T; t-- > 0;) {
        lstm_step_backward(p.fwd, tr->fwd[t], ghf, gc, g.fwd);
      }
      gc.assign(spec.d_h, 0.0);
      for (size_t k = T; k-- > 0;) {
        lstm_step_backward(p.bwd, tr->bwd[k], ghb, gc, g.bwd);
      }
      break;
    }
  }
}

namespace {

double sample_loss(const Model& m, const SequenceSample& s, LossKind loss,
                   Tape* tape, Vec64* dpred) {
  const Vec64 pred = tape ? forward_sequence(m, s.xs, tape) : forward_sequence(m, s.xs);
  if (loss == LossKind::softmax_cross_entropy) return ce_loss(pred, s.label, dpred);
  return mse_loss(pred, s.target, dpred);
}

void scale_gradients(Gradients& g, const ModelSpec& spec, double factor) {
  for (auto& v : param_views(g, spec)) {
    for (size_t i = 0; i < v.size(); ++i) v.data[i] *= factor;
  }
}

}  // namespace

double batch_loss(const Model& m, const SampleSet& set) {
  if (set.samples.empty()) throw ArgumentError("batch_loss: empty sample set");
  double acc = 0.0;
  for (const auto& s : set.samples) acc += sample_loss(m, s, set.loss, nullptr, nullptr);
  return acc / static_cast<double>(set.samples.size());
}

double batch_loss_and_gradients(const Model& m, const SampleSet& set, Gradients& grads) {
  if (set.samples.empty()) throw ArgumentError("batch_loss_and_gradients: empty sample set");
  for (auto& v : param_views(grads, m.spec)) {
    std::fill(v.data, v.data + v.size(), 0.0);
  }
  double acc = 0.0;
  Tape tape;
  Vec64 dpred;
  for (const auto& s : set.samples) {
    acc += sample_loss(m, s, set.loss, &tape, &dpred);
    backward(tape, m, dpred, grads);
  }
  const double inv = 1.0 / static_cast<double>(set.samples.size());
  scale_gradients(grads, m.spec, inv);
  return acc * inv;
}

double grad_check(Model& m, const SampleSet& set, double fd_step) {
  if (!(fd_step > 0.0)) throw ArgumentError("grad_check: fd_step must be positive");
  Gradients analytic = zero_gradients(m);
  batch_loss_and_gradients(m, set, analytic);

  auto views = param_views(m.params, m.spec);
  auto grad_views = param_views(analytic, m.spec);
  double max_rel = 0.0;
  for (size_t k = 0; k < views.size(); ++k) {
    for (size_t i = 0; i < views[k].size(); ++i) {
      double& theta = views[k].data[i];
      const double saved = theta;
      theta = saved + fd_step;
      const double lp = batch_loss(m, set);
      theta = saved - fd_step;
      const double lm = batch_loss(m, set);
      theta = saved;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        throw NumericError("grad_check: non-finite loss while perturbing " +
                           views[k].name + "[" + std::to_string(i) + "]");
      }
      const double numeric = (lp - lm) / (2.0 * fd_step);
      const double a = grad_views[k].data[i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::fabs(a - numeric) / denom);
    }
  }
  return max_rel;
}

Optimizer init_optimizer(const Model& m, double lr) {
  Optimizer opt;
  opt.lr = lr;
  ModelParams& p = const_cast<ModelParams&>(m.params);
  for (auto& v : param_views(p, m.spec)) {
    AdamState s;
    s.lr = lr;
    s.m.assign(v.size(), 0.0);
    s.v.assign(v.size(), 0.0);
    opt.slots.push_back(std::move(s));
  }
  return opt;
}

double train_epoch(Model& m, Optimizer& opt, const SampleSet& data, int batch_size,
                   PrngState& rng, std::optional<double> clip_norm) {
  if (data.samples.empty()) throw ArgumentError("train_epoch: empty dataset");
  if (batch_size < 1) throw ArgumentError("train_epoch: batch size must be >= 1");

  std::vector<size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i-- > 1;) {
    std::swap(order[i], order[prng_next_index(rng, i + 1)]);
  }

  Gradients grads = zero_gradients(m);
  auto grad_views = param_views(grads, m.spec);
  auto pviews = param_views(m.params, m.spec);

  double loss_acc = 0.0;
  Tape tape;
  Vec64 dpred;
  size_t pos = 0;
  while (pos < order.size()) {
    const size_t end = std::min(pos + static_cast<size_t>(batch_size), order.size());
    const size_t n = end - pos;
    for (auto& v : grad_views) std::fill(v.data, v.data + v.size(), 0.0);
    for (size_t k = pos; k < end; ++k) {
      const auto& s = data.samples[order[k]];
      const double l = sample_loss(m, s, data.loss, &tape, &dpred);
      if (!std::isfinite(l)) throw NumericError("train_epoch: non-finite loss");
      loss_acc += l;
      backward(tape, m, dpred, grads);
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& v : grad_views) {
      for (size_t i = 0; i < v.size(); ++i) v.data[i] *= inv;
    }
    if (clip_norm) {
      double sq = 0.0;
      for (auto& v : grad_views) {
        for (size_t i = 0; i < v.size(); ++i) sq += v.data[i] * v.data[i];
      }
      const double norm = std::sqrt(sq);
      if (norm > *clip_norm && norm > 0.0) {
        const double scale = *clip_norm / norm;
        for (auto& v : grad_views) {
          for (size_t i = 0; i < v.size(); ++i) v.data[i] *= scale;
        }
      }
    }
    for (size_t k = 0; k < pviews.size(); ++k) {
      adam_step(std::span<double>(pviews[k].data, pviews[k].size()),
                std::span<const double>(grad_views[k].data, grad_views[k].size()),
                opt.slots[k]);
    }
    pos = end;
  }
  return loss_acc / static_cast<double>(data.samples.size());
}

}  // namespace memdd
