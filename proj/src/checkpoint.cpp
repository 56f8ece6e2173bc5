#include "memdd/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "memdd/errors.hpp"
#include "memdd/format.hpp"

namespace memdd {

namespace {

constexpr const char* kTag = "memdd-ckpt v1";

void write_array(std::string& out, const std::string& name, const double* data,
                 int rows, int cols) {
  out += "array " + name + " " + std::to_string(rows) + " " + std::to_string(cols) + "\n";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (j) out += ' ';
      out += format_g17(data[static_cast<size_t>(i) * cols + j]);
    }
    out += '\n';
  }
}

struct LineReader {
  std::istringstream in;
  std::string origin;
  int line_no = 0;

  LineReader(const std::string& text, std::string orig)
      : in(text), origin(std::move(orig)) {}

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(origin + " line " + std::to_string(line_no) + ": " + msg);
  }
};

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

// Validates an already-read "array <name> <rows> <cols>" header line.
void check_array_header(LineReader& r, const std::string& header,
                        const std::string& expect_name, int expect_rows,
                        int expect_cols) {
  const auto toks = tokenize(header);
  if (toks.size() != 4 || toks[0] != "array") {
    r.fail("expected 'array " + expect_name + " <rows> <cols>', got '" + header + "'");
  }
  if (toks[1] != expect_name) {
    r.fail("expected array " + expect_name + ", got " + toks[1]);
  }
  long long rows = 0, cols = 0;
  if (!parse_int_strict(toks[2], rows) || !parse_int_strict(toks[3], cols)) {
    r.fail("array " + expect_name + ": bad dimension line '" + header + "'");
  }
  if (rows != expect_rows || cols != expect_cols) {
    r.fail("array " + expect_name + ": dimensions " + std::to_string(rows) + "x" +
           std::to_string(cols) + " do not match expected " +
           std::to_string(expect_rows) + "x" + std::to_string(expect_cols));
  }
}

void read_array_body(LineReader& r, const std::string& name, double* dst, int rows,
                     int cols) {
  std::string line;
  for (int i = 0; i < rows; ++i) {
    if (!r.next(line)) {
      throw ParseError(r.origin + ": array " + name + " truncated after " +
                       std::to_string(i) + " of " + std::to_string(rows) + " rows");
    }
    const auto vals = tokenize(line);
    if (vals.size() != static_cast<size_t>(cols)) {
      r.fail("array " + name + " row " + std::to_string(i) + ": expected " +
             std::to_string(cols) + " values, got " + std::to_string(vals.size()));
    }
    for (int j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!parse_double_strict(vals[j], v)) {
        r.fail("array " + name + ": bad value '" + vals[j] + "'");
      }
      dst[static_cast<size_t>(i) * cols + j] = v;
    }
  }
}

void read_array(LineReader& r, const std::string& name, double* dst, int rows, int cols) {
  std::string header;
  if (!r.next(header)) {
    throw ParseError(r.origin + ": file ended before array " + name);
  }
  check_array_header(r, header, name, rows, cols);
  read_array_body(r, name, dst, rows, cols);
}

// Width of an optional 1-row array whose header was already read.
int optional_array_width(LineReader& r, const std::string& header,
                         const std::string& name) {
  const auto toks = tokenize(header);
  long long rows = 0, cols = 0;
  if (toks.size() != 4 || !parse_int_strict(toks[2], rows) ||
      !parse_int_strict(toks[3], cols) || rows != 1 || cols < 1) {
    r.fail("array " + name + ": bad dimension line '" + header + "'");
  }
  return static_cast<int>(cols);
}

std::map<std::string, std::string> parse_kv(const std::vector<std::string>& toks,
                                            LineReader& r) {
  std::map<std::string, std::string> kv;
  for (size_t i = 1; i < toks.size(); ++i) {
    const size_t eq = toks[i].find('=');
    if (eq == std::string::npos) r.fail("expected key=value, got '" + toks[i] + "'");
    kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv,
                           const char* key, LineReader& r) {
  auto it = kv.find(key);
  if (it == kv.end()) r.fail(std::string("spec line is missing ") + key);
  return it->second;
}

long long require_int(const std::map<std::string, std::string>& kv, const char* key,
                      LineReader& r) {
  long long v = 0;
  if (!parse_int_strict(require(kv, key, r), v)) {
    r.fail(std::string("bad integer for ") + key);
  }
  return v;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  const ModelSpec& spec = c.model.spec;
  std::string out = std::string(kTag) + "\n";
  out += "spec kind=" + to_string(spec.kind) + " variant=" + to_string(spec.variant) +
         " task=" + to_string(spec.task) + " d_h=" + std::to_string(spec.d_h) +
         " d_x=" + std::to_string(spec.d_x) + " out=" + std::to_string(spec.out_dim) +
         " activation=" + to_string(spec.activation) +
         " ln_eps=" + format_g17(c.model.params.head.ln.eps) +
         " L=" + std::to_string(c.window_L) + " P=" + std::to_string(c.window_P) +
         " split=" + format_g17(c.eval_split) + "\n";
  const auto views = param_views(c.model.params, spec);
  for (const auto& v : views) write_array(out, v.name, v.data, v.rows, v.cols);
  if (c.normalizer) {
    const int d = static_cast<int>(c.normalizer->mn.size());
    write_array(out, "norm_min", c.normalizer->mn.data(), 1, d);
    write_array(out, "norm_max", c.normalizer->mx.data(), 1, d);
  }
  if (c.zscore) {
    const int d = static_cast<int>(c.zscore->first.size());
    write_array(out, "zscore_mean", c.zscore->first.data(), 1, d);
    write_array(out, "zscore_std", c.zscore->second.data(), 1, d);
  }
  if (c.optimizer) {
    const auto& opt = *c.optimizer;
    const long long t = opt.slots.empty() ? 0 : opt.slots.front().t;
    out += "adam t=" + std::to_string(t) + " lr=" + format_g17(opt.lr) + "\n";
    for (size_t k = 0; k < views.size(); ++k) {
      write_array(out, "adam_m_" + views[k].name, opt.slots[k].m.data(), views[k].rows,
                  views[k].cols);
      write_array(out, "adam_v_" + views[k].name, opt.slots[k].v.data(), views[k].rows,
                  views[k].cols);
    }
  }
  return out;
}

Checkpoint parse_checkpoint_text(const std::string& text, const std::string& origin) {
  LineReader r(text, origin);
  std::string line;
  if (!r.next(line) || line != kTag) {
    throw ParseError(origin + " line 1: expected format tag '" + kTag + "'");
  }
  if (!r.next(line)) throw ParseError(origin + ": missing spec line");
  const auto toks = tokenize(line);
  if (toks.empty() || toks[0] != "spec") r.fail("expected spec line");
  const auto kv = parse_kv(toks, r);

  ModelSpec spec;
  spec.kind = cell_kind_from_string(require(kv, "kind", r));
  spec.variant = variant_from_string(require(kv, "variant", r));
  spec.task = task_from_string(require(kv, "task", r));
  spec.d_h = static_cast<int>(require_int(kv, "d_h", r));
  spec.d_x = static_cast<int>(require_int(kv, "d_x", r));
  spec.out_dim = static_cast<int>(require_int(kv, "out", r));
  spec.activation = activation_from_string(require(kv, "activation", r));

  Checkpoint c;
  c.model = make_model(spec);
  double ln_eps = 0.0;
  if (!parse_double_strict(require(kv, "ln_eps", r), ln_eps)) r.fail("bad ln_eps");
  c.model.params.head.ln.eps = ln_eps;
  c.window_L = static_cast<int>(require_int(kv, "L", r));
  c.window_P = static_cast<int>(require_int(kv, "P", r));
  if (!parse_double_strict(require(kv, "split", r), c.eval_split)) r.fail("bad split");

  const auto views = param_views(c.model.params, spec);
  for (const auto& v : views) read_array(r, v.name, v.data, v.rows, v.cols);

  // optional trailing sections, in canonical order
  std::string pending;
  bool have_pending = r.next(pending);
  if (have_pending && pending.rfind("array norm_min ", 0) == 0) {
    const int d = optional_array_width(r, pending, "norm_min");
    Normalizer n;
    n.mn.assign(d, 0.0);
    n.mx.assign(d, 0.0);
    read_array_body(r, "norm_min", n.mn.data(), 1, d);
    read_array(r, "norm_max", n.mx.data(), 1, d);
    n.fitted = true;
    c.normalizer = std::move(n);
    have_pending = r.next(pending);
  }
  if (have_pending && pending.rfind("array zscore_mean ", 0) == 0) {
    const int d = optional_array_width(r, pending, "zscore_mean");
    Vec64 mean(d, 0.0), sd(d, 0.0);
    read_array_body(r, "zscore_mean", mean.data(), 1, d);
    read_array(r, "zscore_std", sd.data(), 1, d);
    c.zscore = std::make_pair(std::move(mean), std::move(sd));
    have_pending = r.next(pending);
  }
  if (have_pending && pending.rfind("adam ", 0) == 0) {
    const auto atoks = tokenize(pending);
    const auto akv = parse_kv(atoks, r);
    Optimizer opt;
    double lr = 0.0;
    if (!parse_double_strict(require(akv, "lr", r), lr)) r.fail("bad adam lr");
    opt.lr = lr;
    const long long t = require_int(akv, "t", r);
    for (const auto& v : views) {
      AdamState s;
      s.lr = lr;
      s.t = t;
      s.m.assign(v.size(), 0.0);
      s.v.assign(v.size(), 0.0);
      read_array(r, "adam_m_" + v.name, s.m.data(), v.rows, v.cols);
      read_array(r, "adam_v_" + v.name, s.v.data(), v.rows, v.cols);
      opt.slots.push_back(std::move(s));
    }
    c.optimizer = std::move(opt);
    have_pending = r.next(pending);
  }
  if (have_pending) {
    r.fail("unexpected trailing content '" + pending + "'");
  }
  return c;
}

void checkpoint_save(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << serialize_checkpoint(c);
  if (!out) throw ParseError(path + ": write failed");
}

Checkpoint checkpoint_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint_text(ss.str(), path);
}

}  // namespace memdd
