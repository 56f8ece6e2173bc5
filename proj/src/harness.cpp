#include "memdd/harness.hpp"

#include <chrono>
#include <thread>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "memdd/errors.hpp"
#include "memdd/format.hpp"

namespace memdd {

namespace {

// Keeps the minibatch shuffle stream distinct from the init stream.
constexpr std::uint64_t kShuffleSalt = 0xA3C59AC2ED1E4D4BULL;

ArchKind arch_of(CellKind k) {
  switch (k) {
    case CellKind::memdd: return ArchKind::memdd;
    case CellKind::lstm: return ArchKind::lstm;
    case CellKind::gru: return ArchKind::gru;
    case CellKind::bilstm: return ArchKind::bilstm;
  }
  throw ConfigError("arch_of: unhandled kind");
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

double wall_seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void TrainConfig::resolve_defaults() {
  const bool cls = task == TaskKind::classification;
  if (hidden < 0) hidden = cls ? 128 : 256;
  if (batch < 0) batch = cls ? 32 : 128;
  if (L < 0 && P < 0) L = P = 3;  // horizons pair up by default
  if (L < 0) L = P;
  if (P < 0) P = L;
}

Json TrainConfig::echo() const {
  Json j;
  j["task"] = to_string(task);
  j["model"] = to_string(model);
  j["variant"] = to_string(variant);
  j["hidden"] = hidden;
  j["batch"] = batch;
  j["lr"] = lr;
  j["epochs"] = epochs;
  j["seed"] = seed;
  j["L"] = L;
  j["P"] = P;
  j["activation"] = to_string(activation);
  if (clip_norm) j["clip"] = *clip_norm; else j["clip"] = nullptr;
  j["normalize"] = normalize_cls;
  j["data"] = data_path;
  j["test"] = test_path;
  j["ckpt"] = ckpt_path;
  j["report"] = report_path;
  return j;
}

std::pair<Vec64, Vec64> fit_zscore(const ClassificationDataset& train) {
  Vec64 mean(train.D, 0.0), sd(train.D, 0.0);
  long long n = 0;
  for (const auto& s : train.samples) {
    for (int t = 0; t < train.T; ++t) {
      for (int j = 0; j < train.D; ++j) {
        mean[j] += s.series[static_cast<size_t>(t) * train.D + j];
      }
    }
    n += train.T;
  }
  if (n == 0) throw ArgumentError("fit_zscore: empty dataset");
  for (int j = 0; j < train.D; ++j) mean[j] /= static_cast<double>(n);
  for (const auto& s : train.samples) {
    for (int t = 0; t < train.T; ++t) {
      for (int j = 0; j < train.D; ++j) {
        const double d = s.series[static_cast<size_t>(t) * train.D + j] - mean[j];
        sd[j] += d * d;
      }
    }
  }
  for (int j = 0; j < train.D; ++j) sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
  return {mean, sd};
}

SampleSet classification_samples(const ClassificationDataset& ds,
                                 const std::pair<Vec64, Vec64>* zscore) {
  SampleSet set;
  set.loss = LossKind::softmax_cross_entropy;
  set.samples.reserve(ds.samples.size());
  for (const auto& s : ds.samples) {
    SequenceSample q;
    q.label = s.label;
    q.xs.assign(ds.T, Vec64(ds.D, 0.0));
    for (int t = 0; t < ds.T; ++t) {
      for (int j = 0; j < ds.D; ++j) {
        double v = s.series[static_cast<size_t>(t) * ds.D + j];
        if (zscore) {
          const double sd = zscore->second[j];
          v = sd == 0.0 ? 0.0 : (v - zscore->first[j]) / sd;
        }
        q.xs[t][j] = v;
      }
    }
    set.samples.push_back(std::move(q));
  }
  return set;
}

SampleSet regression_samples(const WindowedDataset& ds) {
  SampleSet set;
  set.loss = LossKind::mean_squared_error;
  set.samples.reserve(ds.samples.size());
  for (const auto& s : ds.samples) {
    SequenceSample q;
    q.target = s.target;
    q.xs.assign(ds.L, Vec64(ds.D, 0.0));
    for (int t = 0; t < ds.L; ++t) {
      for (int j = 0; j < ds.D; ++j) {
        q.xs[t][j] = s.input[static_cast<size_t>(t) * ds.D + j];
      }
    }
    set.samples.push_back(std::move(q));
  }
  return set;
}

namespace {

int clamp_workers(int workers, size_t n) {
  if (workers < 1) workers = 1;
  if (static_cast<size_t>(workers) > n) workers = static_cast<int>(n);
  return workers == 0 ? 1 : workers;
}

}  // namespace

EvalReport evaluate_classification(const Model& m, const SampleSet& test,
                                   int num_classes, int workers) {
  const size_t n = test.samples.size();
  workers = clamp_workers(workers, n);
  std::vector<ConfusionMatrix> parts(workers, ConfusionMatrix(num_classes));
  auto run_shard = [&](int w) {
    for (size_t i = w; i < n; i += workers) {
      const auto& s = test.samples[i];
      parts[w].add(s.label, argmax_lowest(forward_sequence(m, s.xs)));
    }
  };
  if (workers == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_shard, w);
    for (auto& t : pool) t.join();
  }
  ConfusionMatrix cm = std::move(parts[0]);
  for (int w = 1; w < workers; ++w) cm.merge(parts[w]);

  EvalReport r;
  r.sample_count = cm.total();
  r.accuracy = accuracy(cm);
  double p_acc = 0.0, r_acc = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const auto [p, rec] = precision_recall(cm, c);
    p_acc += p;
    r_acc += rec;
  }
  r.macro_precision = p_acc / num_classes;
  r.macro_recall = r_acc / num_classes;
  r.macro_f1 = f1_macro(cm);
  return r;
}

EvalReport evaluate_regression(const Model& m, const SampleSet& test, int P, int D,
                               const Normalizer& norm, int workers) {
  const size_t n = test.samples.size();
  workers = clamp_workers(workers, n);
  struct Shard {
    Vec64 preds, targets, preds_raw, targets_raw;
    std::vector<Vec64> step_preds, step_targets;
  };
  std::vector<Shard> shards(workers);
  auto run_shard = [&](int w) {
    Shard& sh = shards[w];
    sh.step_preds.resize(P);
    sh.step_targets.resize(P);
    for (size_t i = w; i < n; i += workers) {
      const auto& s = test.samples[i];
      const Vec64 pred = forward_sequence(m, s.xs);
      for (size_t k = 0; k < pred.size(); ++k) {
        const int var = static_cast<int>(k) % D;
        const int step = static_cast<int>(k) / D;
        sh.preds.push_back(pred[k]);
        sh.targets.push_back(s.target[k]);
        sh.preds_raw.push_back(norm.invert_value(var, pred[k]));
        sh.targets_raw.push_back(norm.invert_value(var, s.target[k]));
        sh.step_preds[step].push_back(pred[k]);
        sh.step_targets[step].push_back(s.target[k]);
      }
    }
  };
  if (workers == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_shard, w);
    for (auto& t : pool) t.join();
  }
  // mse is a function of the error multiset, so shard order cannot matter
  Shard all = std::move(shards[0]);
  for (int w = 1; w < workers; ++w) {
    Shard& sh = shards[w];
    all.preds.insert(all.preds.end(), sh.preds.begin(), sh.preds.end());
    all.targets.insert(all.targets.end(), sh.targets.begin(), sh.targets.end());
    all.preds_raw.insert(all.preds_raw.end(), sh.preds_raw.begin(), sh.preds_raw.end());
    all.targets_raw.insert(all.targets_raw.end(), sh.targets_raw.begin(),
                           sh.targets_raw.end());
    for (int p = 0; p < P; ++p) {
      all.step_preds[p].insert(all.step_preds[p].end(), sh.step_preds[p].begin(),
                               sh.step_preds[p].end());
      all.step_targets[p].insert(all.step_targets[p].end(), sh.step_targets[p].begin(),
                                 sh.step_targets[p].end());
    }
  }
  EvalReport r;
  r.sample_count = static_cast<long long>(n);
  r.mse = mse(all.preds, all.targets);
  r.mse_raw = mse(all.preds_raw, all.targets_raw);
  r.mse_per_step.resize(P);
  for (int p = 0; p < P; ++p) {
    r.mse_per_step[p] = mse(all.step_preds[p], all.step_targets[p]);
  }
  return r;
}

Json eval_report_json(const EvalReport& r, TaskKind task) {
  Json j;
  j["sampleCount"] = r.sample_count;
  if (task == TaskKind::classification) {
    j["accuracy"] = r.accuracy;
    j["macroPrecision"] = r.macro_precision;
    j["macroRecall"] = r.macro_recall;
    j["macroF1"] = r.macro_f1;
  } else {
    j["mse"] = r.mse;
    j["mseRaw"] = r.mse_raw;
    j["msePerStep"] = r.mse_per_step;
  }
  return j;
}

namespace {

struct PreparedData {
  SampleSet train;
  SampleSet test;
  ModelSpec spec;
  int seq_len = 0;  // per-sequence length for the FLOP trace
  std::optional<Normalizer> normalizer;
  std::optional<std::pair<Vec64, Vec64>> zscore;
  int num_classes = 0;
  int D = 0;
};

PreparedData prepare(const TrainConfig& cfg) {
  PreparedData d;
  d.spec.kind = cfg.model;
  d.spec.variant = cfg.variant;
  d.spec.activation = cfg.activation;
  d.spec.task = cfg.task;
  d.spec.d_h = cfg.hidden;

  if (cfg.task == TaskKind::classification) {
    if (cfg.data_path.empty() || cfg.test_path.empty()) {
      throw ConfigError("classification training needs --data and --test files");
    }
    const ClassificationDataset train_ds = parse_classification_file(cfg.data_path);
    const ClassificationDataset test_ds = parse_classification_file(cfg.test_path);
    if (train_ds.D != test_ds.D || train_ds.C != test_ds.C) {
      throw ConfigError("train/test datasets disagree: D=" + std::to_string(train_ds.D) +
                        "/" + std::to_string(test_ds.D) + " C=" +
                        std::to_string(train_ds.C) + "/" + std::to_string(test_ds.C));
    }
    if (train_ds.samples.empty()) throw ConfigError("training dataset has no samples");
    std::pair<Vec64, Vec64> z;
    const std::pair<Vec64, Vec64>* zp = nullptr;
    if (cfg.normalize_cls) {
      z = fit_zscore(train_ds);
      d.zscore = z;
      zp = &z;
    }
    d.train = classification_samples(train_ds, zp);
    d.test = classification_samples(test_ds, zp);
    d.spec.d_x = train_ds.D;
    d.spec.out_dim = train_ds.C;
    d.seq_len = train_ds.T;
    d.num_classes = train_ds.C;
    d.D = train_ds.D;
  } else {
    if (cfg.data_path.empty()) throw ConfigError("regression training needs --data");
    const RegressionSeries series = parse_regression_csv(cfg.data_path);
    RegressionSeries train_seg, test_seg;
    if (cfg.test_path.empty()) {
      auto [a, b] = chronological_split(series, 0.7);
      train_seg = std::move(a);
      test_seg = std::move(b);
    } else {
      train_seg = series;
      test_seg = parse_regression_csv(cfg.test_path);
      if (test_seg.D != train_seg.D) {
        throw ConfigError("train/test series disagree on variable count: " +
                          std::to_string(train_seg.D) + " vs " +
                          std::to_string(test_seg.D));
      }
    }
    Normalizer norm;
    norm.fit(train_seg);
    d.normalizer = norm;
    d.train = regression_samples(make_windows(norm.apply(train_seg), cfg.L, cfg.P));
    d.test = regression_samples(make_windows(norm.apply(test_seg), cfg.L, cfg.P));
    d.spec.d_x = train_seg.D;
    d.spec.out_dim = cfg.P * train_seg.D;
    d.seq_len = cfg.L;
    d.D = train_seg.D;
  }
  d.spec.validate();
  return d;
}

Json complexity_json(const Model& m, int seq_len) {
  ComplexityQuery q;
  q.kind = arch_of(m.spec.kind);
  q.d_h = m.spec.d_h;
  q.d_x = m.spec.d_x;
  q.L = seq_len;
  Json j;
  j["coreParams"] = count_params_empirical(m, ParamScope::core);
  j["fullParams"] = count_params_empirical(m, ParamScope::full);
  j["flopsPerSequence"] = trace_flops_empirical(m, seq_len);
  j["closedCoreParams"] = closed_params(q);
  j["closedFlopsPerSequence"] = closed_flops(q);
  return j;
}

struct TrainOutcome {
  Model model;
  std::vector<double> epoch_loss;
  EvalReport metrics;
};

TrainOutcome run_training(const TrainConfig& cfg, const PreparedData& d, bool verbose) {
  TrainOutcome out{init_model(d.spec, cfg.seed), {}, {}};
  Optimizer opt = init_optimizer(out.model, cfg.lr);
  PrngState shuffle_rng{cfg.seed ^ kShuffleSalt};
  out.epoch_loss.reserve(cfg.epochs);
  for (int e = 0; e < cfg.epochs; ++e) {
    const double loss =
        train_epoch(out.model, opt, d.train, cfg.batch, shuffle_rng, cfg.clip_norm);
    out.epoch_loss.push_back(loss);
    if (verbose) {
      std::printf("epoch %d/%d loss=%.6g\n", e + 1, cfg.epochs, loss);
      std::fflush(stdout);
    }
  }
  if (cfg.task == TaskKind::classification) {
    out.metrics = evaluate_classification(out.model, d.test, d.num_classes,
                                          cfg.eval_workers);
  } else {
    out.metrics = evaluate_regression(out.model, d.test, cfg.P, d.D, *d.normalizer,
                                      cfg.eval_workers);
  }
  return out;
}

}  // namespace

Json cmd_train(TrainConfig cfg) {
  cfg.resolve_defaults();
  const auto t0 = std::chrono::steady_clock::now();
  const PreparedData d = prepare(cfg);
  TrainOutcome out = run_training(cfg, d, /*verbose=*/!cfg.quiet);

  if (!cfg.ckpt_path.empty()) {
    Checkpoint ck;
    ck.model = std::move(out.model);
    ck.window_L = cfg.task == TaskKind::regression ? cfg.L : 0;
    ck.window_P = cfg.task == TaskKind::regression ? cfg.P : 0;
    ck.eval_split =
        cfg.task == TaskKind::regression && cfg.test_path.empty() ? 0.7 : 0.0;
    ck.normalizer = d.normalizer;
    ck.zscore = d.zscore;
    checkpoint_save(cfg.ckpt_path, ck);
    out.model = std::move(ck.model);
  }

  Json report;
  report["command"] = "train";
  report["config"] = cfg.echo();
  report["seed"] = cfg.seed;
  report["epochLoss"] = out.epoch_loss;
  report["metrics"] = eval_report_json(out.metrics, cfg.task);
  report["complexity"] = complexity_json(out.model, d.seq_len);
  report["wallTimeSec"] = wall_seconds_since(t0);
  if (!cfg.report_path.empty()) write_json_file(cfg.report_path, report);

  if (cfg.task == TaskKind::classification) {
    std::printf("test accuracy=%.4f macroF1=%.4f (%lld samples)\n", out.metrics.accuracy,
                out.metrics.macro_f1, out.metrics.sample_count);
  } else {
    std::printf("test mse=%.6g (raw %.6g, %lld windows)\n", out.metrics.mse,
                out.metrics.mse_raw, out.metrics.sample_count);
  }
  return report;
}

Json cmd_eval(const EvalRequest& req) {
  if (req.ckpt_path.empty()) throw ConfigError("eval needs --ckpt");
  if (req.data_path.empty()) throw ConfigError("eval needs --data (or --test)");
  Checkpoint ck = checkpoint_load(req.ckpt_path);
  const ModelSpec& spec = ck.model.spec;

  EvalReport metrics;
  if (spec.task == TaskKind::classification) {
    const ClassificationDataset ds = parse_classification_file(req.data_path);
    if (ds.D != spec.d_x || ds.C != spec.out_dim) {
      throw ConfigError("checkpoint expects D=" + std::to_string(spec.d_x) + " C=" +
                        std::to_string(spec.out_dim) + ", dataset has D=" +
                        std::to_string(ds.D) + " C=" + std::to_string(ds.C));
    }
    const SampleSet test =
        classification_samples(ds, ck.zscore ? &*ck.zscore : nullptr);
    metrics = evaluate_classification(ck.model, test, spec.out_dim, req.eval_workers);
  } else {
    if (!ck.normalizer) throw ConfigError("regression checkpoint lacks scaling arrays");
    RegressionSeries series = parse_regression_csv(req.data_path);
    if (series.D != spec.d_x) {
      throw ConfigError("checkpoint expects D=" + std::to_string(spec.d_x) +
                        ", series has D=" + std::to_string(series.D));
    }
    if (ck.eval_split > 0.0) {
      series = chronological_split(series, ck.eval_split).second;
    }
    const SampleSet test = regression_samples(
        make_windows(ck.normalizer->apply(series), ck.window_L, ck.window_P));
    metrics = evaluate_regression(ck.model, test, ck.window_P, series.D, *ck.normalizer,
                                  req.eval_workers);
  }

  Json report;
  report["command"] = "eval";
  report["ckpt"] = req.ckpt_path;
  report["data"] = req.data_path;
  report["metrics"] = eval_report_json(metrics, spec.task);
  if (!req.report_path.empty()) write_json_file(req.report_path, report);

  if (spec.task == TaskKind::classification) {
    std::printf("accuracy=%.4f macroF1=%.4f (%lld samples)\n", metrics.accuracy,
                metrics.macro_f1, metrics.sample_count);
  } else {
    std::printf("mse=%.6g (raw %.6g, %lld windows)\n", metrics.mse, metrics.mse_raw,
                metrics.sample_count);
  }
  return report;
}

Json cmd_complexity(const ComplexityRequest& req) {
  if (req.kinds.empty()) throw ConfigError("complexity needs --model (a kind or 'all')");
  Json rows = Json::array();
  long long memdd_params = -1, memdd_flops = -1;
  for (ArchKind kind : req.kinds) {
    ComplexityQuery q;
    q.kind = kind;
    q.d_h = req.d_h;
    q.d_x = req.d_x;
    q.L = req.L;
    q.k = req.k;
    q.layers = req.layers;
    q.d_ff = req.d_ff;
    const ComplexityReport rep = complexity_report(q);
    Json row;
    row["kind"] = to_string(kind);
    row["d_h"] = req.d_h;
    row["d_x"] = req.d_x;
    row["L"] = req.L;
    row["params"] = rep.params;
    row["flops"] = rep.flops;
    row["paramsFormula"] = rep.params_formula;
    row["flopsFormula"] = rep.flops_formula;

    const bool instantiable = kind == ArchKind::memdd || kind == ArchKind::lstm ||
                              kind == ArchKind::gru || kind == ArchKind::bilstm;
    if (instantiable && req.d_h >= 1 && req.d_x >= 1) {
      ModelSpec spec;
      spec.kind = cell_kind_from_string(to_string(kind));
      spec.d_h = static_cast<int>(req.d_h);
      spec.d_x = static_cast<int>(req.d_x);
      spec.out_dim = 1;
      const Model m = init_model(spec, 1);
      const long long emp_params = count_params_empirical(m, ParamScope::core);
      row["empiricalParams"] = emp_params;
      bool match = emp_params == rep.params;
      if (req.L >= 1) {
        const long long emp_flops = trace_flops_empirical(m, static_cast<int>(req.L));
        row["empiricalFlops"] = emp_flops;
        match = match && emp_flops == rep.flops;
      }
      row["verdict"] = match ? "match" : "mismatch";
    }
    if (kind == ArchKind::memdd) {
      memdd_params = rep.params;
      memdd_flops = rep.flops;
    }
    rows.push_back(row);
  }

  Json report;
  report["command"] = "complexity";
  report["rows"] = rows;
  if (memdd_params > 0) {
    Json ratios = Json::array();
    for (const auto& row : rows) {
      if (row["kind"] == "memdd") continue;
      Json rr;
      rr["kind"] = row["kind"];
      rr["paramsVsMemdd"] = row["params"].get<double>() / memdd_params;
      if (memdd_flops > 0) rr["flopsVsMemdd"] = row["flops"].get<double>() / memdd_flops;
      ratios.push_back(rr);
    }
    report["ratios"] = ratios;
  }
  if (!req.report_path.empty()) write_json_file(req.report_path, report);

  std::printf("%-12s %14s %16s %10s\n", "kind", "params", "flops", "verdict");
  for (const auto& row : rows) {
    std::printf("%-12s %14lld %16lld %10s\n",
                row["kind"].get<std::string>().c_str(), row["params"].get<long long>(),
                row["flops"].get<long long>(),
                row.contains("verdict") ? row["verdict"].get<std::string>().c_str() : "-");
  }
  return report;
}

Json cmd_gradcheck(const GradCheckRequest& req) {
  ModelSpec spec;
  spec.kind = req.model;
  spec.variant = req.variant;
  spec.task = req.task;
  spec.d_h = req.hidden;
  spec.d_x = req.d_x;
  spec.out_dim = req.task == TaskKind::classification ? 3 : 2;
  spec.validate();

  Model m = init_model(spec, req.seed);
  const long long total = count_params_empirical(m, ParamScope::full);
  if (total > 10000) {
    throw ConfigError("gradcheck refused: model has " + std::to_string(total) +
                      " parameters; finite differences are only tractable up to 10000");
  }

  PrngState rng{req.seed ^ 0x5851F42D4C957F2DULL};
  SampleSet set;
  set.loss = req.task == TaskKind::classification ? LossKind::softmax_cross_entropy
                                                  : LossKind::mean_squared_error;
  for (int b = 0; b < req.batch; ++b) {
    SequenceSample s;
    s.xs.assign(req.T, Vec64(req.d_x, 0.0));
    for (auto& x : s.xs) {
      for (auto& v : x) v = prng_next_uniform(rng, -1.0, 1.0);
    }
    if (req.task == TaskKind::classification) {
      s.label = static_cast<int>(prng_next_index(rng, spec.out_dim));
    } else {
      s.target.assign(spec.out_dim, 0.0);
      for (auto& v : s.target) v = prng_next_uniform(rng, -1.0, 1.0);
    }
    set.samples.push_back(std::move(s));
  }

  const double err = grad_check(m, set, req.fd_step);
  const bool pass = err < 1e-4;
  Json report;
  report["command"] = "gradcheck";
  report["model"] = to_string(req.model);
  report["variant"] = to_string(req.variant);
  report["task"] = to_string(req.task);
  report["hidden"] = req.hidden;
  report["d_x"] = req.d_x;
  report["T"] = req.T;
  report["batch"] = req.batch;
  report["seed"] = req.seed;
  report["fdStep"] = req.fd_step;
  report["params"] = total;
  report["maxRelError"] = err;
  report["pass"] = pass;
  if (!req.report_path.empty()) write_json_file(req.report_path, report);
  std::printf("gradcheck %s/%s: max relative error %.3g -> %s\n",
              to_string(req.model).c_str(), to_string(req.variant).c_str(), err,
              pass ? "pass" : "FAIL");
  return report;
}

Json cmd_ablate(TrainConfig cfg) {
  cfg.resolve_defaults();
  if (cfg.task != TaskKind::classification) {
    throw ConfigError("ablate runs on classification tasks only");
  }
  if (cfg.model != CellKind::memdd) {
    throw ConfigError("ablate requires --model memdd");
  }
  const auto t0 = std::chrono::steady_clock::now();
  static const Variant kVariants[] = {Variant::baseline, Variant::A, Variant::B,
                                      Variant::C, Variant::D, Variant::E};
  Json rows = Json::array();
  for (Variant v : kVariants) {
    TrainConfig run = cfg;
    run.variant = v;
    run.ckpt_path.clear();
    run.report_path.clear();
    const PreparedData d = prepare(run);
    const TrainOutcome out = run_training(run, d, /*verbose=*/false);
    Json row;
    row["variant"] = to_string(v);
    row["accuracy"] = out.metrics.accuracy;
    row["macroF1"] = out.metrics.macro_f1;
    row["finalTrainLoss"] = out.epoch_loss.empty() ? 0.0 : out.epoch_loss.back();
    rows.push_back(row);
    std::printf("%-9s accuracy=%.4f macroF1=%.4f\n", to_string(v).c_str(),
                out.metrics.accuracy, out.metrics.macro_f1);
    std::fflush(stdout);
  }
  Json report;
  report["command"] = "ablate";
  report["config"] = cfg.echo();
  report["rows"] = rows;
  report["wallTimeSec"] = wall_seconds_since(t0);
  if (!cfg.report_path.empty()) write_json_file(cfg.report_path, report);
  return report;
}

}  // namespace memdd
