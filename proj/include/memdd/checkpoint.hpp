#pragma once

#include <optional>
#include <string>

#include "memdd/bptt.hpp"
#include "memdd/data.hpp"

namespace memdd {

// Everything needed to resume or evaluate a trained model. Serialized as
// "memdd-ckpt v1": a tag line, a spec line, then per array a
// "array <name> <rows> <cols>" line followed by rows of decimals printed
// with 17 significant digits, so every 64-bit value survives a
// save -> load -> save byte-identically.
struct Checkpoint {
  Model model;
  int window_L = 0;  // regression window config; 0 when not applicable
  int window_P = 0;
  // Chronological train fraction the model was trained under; evaluation
  // re-applies it so eval on the training file scores the held-out tail.
  // 0 means the test data arrives as a separate file.
  double eval_split = 0.0;
  std::optional<Normalizer> normalizer;       // regression min-max scaling
  std::optional<std::pair<Vec64, Vec64>> zscore;  // classification mean/std
  std::optional<Optimizer> optimizer;
};

std::string serialize_checkpoint(const Checkpoint& c);
Checkpoint parse_checkpoint_text(const std::string& text,
                                 const std::string& origin = "<memory>");

void checkpoint_save(const std::string& path, const Checkpoint& c);
Checkpoint checkpoint_load(const std::string& path);

}  // namespace memdd
