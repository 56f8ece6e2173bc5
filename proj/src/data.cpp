#include "memdd/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "memdd/errors.hpp"
#include "memdd/format.hpp"

namespace memdd {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool parse_double_strict(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int_strict(const std::string& tok, long long& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  // drop a trailing empty fragment produced by a final newline
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

std::vector<std::string> split_on(const std::string& s, char sep, bool skip_empty) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t end = s.find(sep, start);
    if (end == std::string::npos) end = s.size();
    if (end > start || !skip_empty) out.push_back(s.substr(start, end - start));
    if (end == s.size()) break;
    start = end + 1;
  }
  return out;
}

long long parse_header_field(const std::string& token, const char* key,
                             const std::string& origin) {
  const std::string prefix = std::string(key) + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw ParseError(origin + " line 1: expected " + prefix + "<int>, got '" + token + "'");
  }
  long long v = 0;
  if (!parse_int_strict(token.substr(prefix.size()), v) || v < 1) {
    throw ParseError(origin + " line 1: bad value in '" + token + "'");
  }
  return v;
}

}  // namespace

ClassificationDataset parse_classification_text(const std::string& text,
                                                const std::string& origin) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(origin + ": empty file");

  const auto head = split_on(lines[0], ' ', true);
  if (head.size() != 5 || head[0] != "ts-cls" || head[1] != "v1") {
    throw ParseError(origin + " line 1: expected header 'ts-cls v1 T=<int> D=<int> C=<int>'");
  }
  ClassificationDataset ds;
  ds.T = static_cast<int>(parse_header_field(head[2], "T", origin));
  ds.D = static_cast<int>(parse_header_field(head[3], "D", origin));
  ds.C = static_cast<int>(parse_header_field(head[4], "C", origin));
  const size_t want = static_cast<size_t>(ds.T) * ds.D;

  for (size_t li = 1; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    const std::string where = origin + " line " + std::to_string(li + 1);
    if (line.empty()) throw ParseError(where + ": empty sample line");
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(where + ": expected '<label>\\t<values>'");
    }
    long long label = 0;
    if (!parse_int_strict(line.substr(0, tab), label)) {
      throw ParseError(where + ": bad label '" + line.substr(0, tab) + "'");
    }
    if (label < 0 || label >= ds.C) {
      throw ParseError(where + ": label " + std::to_string(label) +
                       " out of range for C=" + std::to_string(ds.C));
    }
    const auto toks = split_on(line.substr(tab + 1), ' ', true);
    if (toks.size() != want) {
      throw ParseError(where + ": expected " + std::to_string(want) + " values, got " +
                       std::to_string(toks.size()));
    }
    ClassificationDataset::Sample s;
    s.label = static_cast<int>(label);
    s.series.reserve(want);
    for (const auto& t : toks) {
      double v = 0.0;
      if (!parse_double_strict(t, v) || !std::isfinite(v)) {
        throw ParseError(where + ": bad value '" + t + "'");
      }
      s.series.push_back(v);
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

ClassificationDataset parse_classification_file(const std::string& path) {
  return parse_classification_text(read_file(path), path);
}

std::string serialize_classification(const ClassificationDataset& ds) {
  std::string out = "ts-cls v1 T=" + std::to_string(ds.T) + " D=" + std::to_string(ds.D) +
                    " C=" + std::to_string(ds.C) + "\n";
  for (const auto& s : ds.samples) {
    out += std::to_string(s.label);
    out += '\t';
    for (size_t i = 0; i < s.series.size(); ++i) {
      if (i) out += ' ';
      out += format_g17(s.series[i]);
    }
    out += '\n';
  }
  return out;
}

void write_classification_file(const std::string& path, const ClassificationDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << serialize_classification(ds);
}

RegressionSeries parse_regression_csv_text(const std::string& text,
                                           const std::string& origin) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(origin + ": empty file");
  RegressionSeries s;
  s.variable_names = split_on(lines[0], ',', false);
  if (s.variable_names.empty() ||
      (s.variable_names.size() == 1 && s.variable_names[0].empty())) {
    throw ParseError(origin + " line 1: expected comma-separated variable names");
  }
  s.D = static_cast<int>(s.variable_names.size());
  for (size_t li = 1; li < lines.size(); ++li) {
    const std::string where = origin + " line " + std::to_string(li + 1);
    const auto toks = split_on(lines[li], ',', false);
    if (toks.size() != static_cast<size_t>(s.D)) {
      throw ParseError(where + ": expected " + std::to_string(s.D) + " values, got " +
                       std::to_string(toks.size()));
    }
    for (const auto& t : toks) {
      double v = 0.0;
      if (!parse_double_strict(t, v) || !std::isfinite(v)) {
        throw ParseError(where + ": bad value '" + t + "'");
      }
      s.values.push_back(v);
    }
  }
  return s;
}

RegressionSeries parse_regression_csv(const std::string& path) {
  return parse_regression_csv_text(read_file(path), path);
}

void write_regression_csv(const std::string& path, const RegressionSeries& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  for (int j = 0; j < s.D; ++j) {
    if (j) out << ',';
    out << s.variable_names[j];
  }
  out << '\n';
  for (int i = 0; i < s.N(); ++i) {
    for (int j = 0; j < s.D; ++j) {
      if (j) out << ',';
      out << format_g17(s.at(i, j));
    }
    out << '\n';
  }
}

std::pair<RegressionSeries, RegressionSeries> chronological_split(
    const RegressionSeries& s, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("chronological_split: train fraction must be in (0,1), got " +
                        format_g17(train_fraction));
  }
  const int n = s.N();
  if (n < 2) {
    throw ArgumentError("chronological_split: need at least 2 rows, got " +
                        std::to_string(n));
  }
  const int train_n = static_cast<int>(std::floor(static_cast<double>(n) * train_fraction));
  RegressionSeries train, test;
  train.D = test.D = s.D;
  train.variable_names = test.variable_names = s.variable_names;
  train.values.assign(s.values.begin(), s.values.begin() + static_cast<size_t>(train_n) * s.D);
  test.values.assign(s.values.begin() + static_cast<size_t>(train_n) * s.D, s.values.end());
  return {std::move(train), std::move(test)};
}

WindowedDataset make_windows(const RegressionSeries& segment, int L, int P) {
  if (L < 1 || P < 1) {
    throw ArgumentError("make_windows: L and P must be >= 1, got L=" + std::to_string(L) +
                        " P=" + std::to_string(P));
  }
  const int n = segment.N();
  if (n < L + P) {
    throw ArgumentError("make_windows: segment of length " + std::to_string(n) +
                        " is too short; need at least L+P=" + std::to_string(L + P) +
                        " rows");
  }
  WindowedDataset ds;
  ds.L = L;
  ds.P = P;
  ds.D = segment.D;
  const int count = n - L - P + 1;
  ds.samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    WindowedDataset::Sample w;
    const auto base = segment.values.begin() + static_cast<size_t>(i) * segment.D;
    w.input.assign(base, base + static_cast<size_t>(L) * segment.D);
    w.target.assign(base + static_cast<size_t>(L) * segment.D,
                    base + static_cast<size_t>(L + P) * segment.D);
    ds.samples.push_back(std::move(w));
  }
  return ds;
}

void Normalizer::fit(const RegressionSeries& train) {
  if (train.N() < 1) throw ArgumentError("Normalizer::fit: empty training segment");
  mn.assign(train.D, 0.0);
  mx.assign(train.D, 0.0);
  for (int j = 0; j < train.D; ++j) {
    double lo = train.at(0, j), hi = train.at(0, j);
    for (int i = 1; i < train.N(); ++i) {
      lo = std::min(lo, train.at(i, j));
      hi = std::max(hi, train.at(i, j));
    }
    mn[j] = lo;
    mx[j] = hi;
  }
  fitted = true;
}

double Normalizer::apply_value(int var, double v) const {
  if (!fitted) throw StateError("Normalizer: apply before fit");
  const double range = mx[var] - mn[var];
  if (range == 0.0) return 0.0;
  return (v - mn[var]) / range;
}

double Normalizer::invert_value(int var, double v) const {
  if (!fitted) throw StateError("Normalizer: invert before fit");
  const double range = mx[var] - mn[var];
  if (range == 0.0) return mn[var];
  return mn[var] + v * range;
}

RegressionSeries Normalizer::apply(const RegressionSeries& s) const {
  if (!fitted) throw StateError("Normalizer: apply before fit");
  if (s.D != static_cast<int>(mn.size())) {
    throw ShapeError("Normalizer: fitted on " + std::to_string(mn.size()) +
                     " variables, got series with " + std::to_string(s.D));
  }
  RegressionSeries out = s;
  for (int i = 0; i < s.N(); ++i) {
    for (int j = 0; j < s.D; ++j) {
      out.values[static_cast<size_t>(i) * s.D + j] = apply_value(j, s.at(i, j));
    }
  }
  return out;
}

}  // namespace memdd
