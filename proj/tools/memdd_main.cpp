// Command-line entry point: train | eval | complexity | gradcheck | ablate.
// Exit codes: 0 success, 1 usage/config error, 2 data format error,
// 3 numeric failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memdd/errors.hpp"
#include "memdd/harness.hpp"

namespace {

using namespace memdd;

struct RawTrainArgs {
  std::string task = "cls";
  std::string model = "memdd";
  std::string variant = "baseline";
  int hidden = -1;
  int batch = -1;
  double lr = 1e-3;
  int epochs = 100;
  std::uint64_t seed = 1;
  int L = -1;
  int P = -1;
  std::string activation = "tanh";
  double clip = 0.0;
  bool clip_set = false;
  bool normalize = false;
  int eval_workers = 1;
  std::string data, test, ckpt, report;
};

void add_train_flags(CLI::App* cmd, RawTrainArgs& a) {
  cmd->add_option("--task", a.task, "cls or reg");
  cmd->add_option("--model", a.model, "memdd|lstm|gru|bilstm");
  cmd->add_option("--variant", a.variant, "baseline|A|B|C|D|E (memdd only)");
  cmd->add_option("--hidden", a.hidden, "hidden dimension (default 128 cls / 256 reg)");
  cmd->add_option("--batch", a.batch, "minibatch size (default 32 cls / 128 reg)");
  cmd->add_option("--lr", a.lr, "Adam learning rate (default 0.001)");
  cmd->add_option("--epochs", a.epochs, "training epochs (default 100)");
  cmd->add_option("--seed", a.seed, "PRNG seed (default 1)");
  cmd->add_option("--L", a.L, "regression input length (default pairs with --P, else 3)");
  cmd->add_option("--P", a.P, "regression horizon (default pairs with --L, else 3)");
  cmd->add_option("--activation", a.activation, "tanh|identity (memdd neuron groups)");
  cmd->add_option("--clip", a.clip, "global-norm gradient clip (off unless given)")
      ->each([&a](const std::string&) { a.clip_set = true; });
  cmd->add_flag("--normalize", a.normalize, "z-score classification inputs (train stats)");
  cmd->add_option("--eval-workers", a.eval_workers,
                  "shard test evaluation across threads (results are identical)");
  cmd->add_option("--data", a.data, "training data file");
  cmd->add_option("--test", a.test, "test data file");
  cmd->add_option("--ckpt", a.ckpt, "checkpoint path to write");
  cmd->add_option("--report", a.report, "JSON report path to write");
}

TrainConfig to_config(const RawTrainArgs& a) {
  TrainConfig c;
  c.task = task_from_string(a.task);
  c.model = cell_kind_from_string(a.model);
  c.variant = variant_from_string(a.variant);
  c.hidden = a.hidden;
  c.batch = a.batch;
  c.lr = a.lr;
  c.epochs = a.epochs;
  c.seed = a.seed;
  c.L = a.L;
  c.P = a.P;
  c.activation = activation_from_string(a.activation);
  if (a.clip_set) c.clip_norm = a.clip;
  c.normalize_cls = a.normalize;
  c.eval_workers = a.eval_workers;
  c.data_path = a.data;
  c.test_path = a.test;
  c.ckpt_path = a.ckpt;
  c.report_path = a.report;
  return c;
}

std::vector<ArchKind> parse_kinds(const std::string& s) {
  if (s == "all") {
    return {ArchKind::lstm, ArchKind::gru, ArchKind::bilstm, ArchKind::tcn,
            ArchKind::transformer, ArchKind::memdd};
  }
  std::vector<ArchKind> kinds;
  size_t start = 0;
  while (start <= s.size()) {
    size_t end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) kinds.push_back(arch_kind_from_string(s.substr(start, end - start)));
    if (end == s.size()) break;
    start = end + 1;
  }
  if (kinds.empty()) throw ConfigError("no architecture kinds given");
  return kinds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-DD sequence modeling toolkit"};
  app.require_subcommand(1);

  RawTrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a model and write report/checkpoint");
  add_train_flags(train_cmd, train_args);

  RawTrainArgs ablate_args;
  auto* ablate_cmd =
      app.add_subcommand("ablate", "train the baseline and variants A-E, same seed/budget");
  add_train_flags(ablate_cmd, ablate_args);

  std::string eval_ckpt, eval_data, eval_test, eval_report;
  int eval_workers = 1;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--ckpt", eval_ckpt, "checkpoint path")->required();
  eval_cmd->add_option("--data", eval_data, "dataset to evaluate");
  eval_cmd->add_option("--test", eval_test, "alias for --data");
  eval_cmd->add_option("--report", eval_report, "JSON report path to write");
  eval_cmd->add_option("--eval-workers", eval_workers,
                       "shard evaluation across threads (results are identical)");

  std::string cx_model;
  ComplexityRequest cx;
  auto* cx_cmd = app.add_subcommand("complexity", "closed-form and empirical counts");
  cx_cmd->add_option("--model", cx_model, "kind, comma list, or 'all'")->required();
  cx_cmd->add_option("--hidden", cx.d_h, "hidden dimension d_h")->required();
  cx_cmd->add_option("--dx", cx.d_x, "input dimension d_x")->required();
  cx_cmd->add_option("--L", cx.L, "sequence length")->required();
  cx_cmd->add_option("--k", cx.k, "tcn kernel size");
  cx_cmd->add_option("--layers", cx.layers, "tcn layer count");
  cx_cmd->add_option("--dff", cx.d_ff, "transformer feedforward width");
  cx_cmd->add_option("--report", cx.report_path, "JSON report path to write");

  GradCheckRequest gc;
  std::string gc_model = "memdd", gc_variant = "baseline", gc_task = "cls";
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference gradient verification");
  gc_cmd->add_option("--model", gc_model, "memdd|lstm|gru|bilstm");
  gc_cmd->add_option("--variant", gc_variant, "baseline|A|B|C|D|E");
  gc_cmd->add_option("--task", gc_task, "cls or reg (loss kind)");
  gc_cmd->add_option("--hidden", gc.hidden, "hidden dimension (small)");
  gc_cmd->add_option("--dx", gc.d_x, "input dimension");
  gc_cmd->add_option("--L", gc.T, "sequence length");
  gc_cmd->add_option("--batch", gc.batch, "batch size");
  gc_cmd->add_option("--seed", gc.seed, "PRNG seed");
  gc_cmd->add_option("--report", gc.report_path, "JSON report path to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 1;
  }

  try {
    if (*train_cmd) {
      cmd_train(to_config(train_args));
    } else if (*ablate_cmd) {
      cmd_ablate(to_config(ablate_args));
    } else if (*eval_cmd) {
      EvalRequest req;
      req.ckpt_path = eval_ckpt;
      req.data_path = eval_data.empty() ? eval_test : eval_data;
      req.report_path = eval_report;
      req.eval_workers = eval_workers;
      cmd_eval(req);
    } else if (*cx_cmd) {
      cx.kinds = parse_kinds(cx_model);
      cmd_complexity(cx);
    } else if (*gc_cmd) {
      gc.model = cell_kind_from_string(gc_model);
      gc.variant = variant_from_string(gc_variant);
      gc.task = task_from_string(gc_task);
      const Json r = cmd_gradcheck(gc);
      if (!r["pass"].get<bool>()) return 3;
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: data-format: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: numeric: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 1;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
