#pragma once

#include <iosfwd>
#include <optional>

#include "mbe/attention.hpp"
#include "mbe/dataset.hpp"
#include "mbe/policy.hpp"
#include "mbe/rules.hpp"

namespace mbe {

struct TrainConfig {
  EncoderConfig encoder;
  std::size_t lstm_layers = 3;
  std::size_t max_steps = 3;
  std::size_t beam_size = 128;
  double action_dropout = 0.1;
  double lr = 1e-3;
  std::size_t epochs = 100;
  std::size_t rollouts_per_query = 8;
  std::size_t batch_queries = 32;  // gradient batch size
  double gamma1 = 0.8;             // rule confidence threshold
  std::uint64_t gamma2 = 3;        // rule support threshold
  double epsilon = 1000.0;         // attention reliability scale
  std::size_t max_new_per_pair = 50;
  std::size_t action_cap = 256;  // 0 = uncapped
  bool use_augmentation = true;
  // Moving-average reward baseline; off by default (plain terminal reward).
  bool use_baseline = false;
  std::uint64_t rng_seed = 0;
  // Pre-mined rule overlay: replaces the learned store for attention and
  // augmentation and is never updated during training.
  std::optional<RuleStore> rules_overlay;
};

struct EpochLog {
  std::size_t epoch;
  double loss;
  double success_rate;  // fraction of rewarded rollouts
  double valid_mrr;
  std::size_t rule_count;
  std::size_t augmented_facts;
};

struct TrainResult {
  ParamSet params;  // best-validation-MRR parameters
  RuleStore rules;
  std::vector<EpochLog> log;
  double best_valid_mrr = 0.0;
  std::size_t best_epoch = 0;
};

// REINFORCE training over the training split. Per epoch, in order:
// recompute trustworthy rules and augmented facts from the frozen store,
// recompute attention, roll out and update per query mini-batch, then fold
// the epoch's trajectories into the rule store. Validation MRR selects the
// returned parameters. When `events` is given, one JSON line is written
// per epoch.
TrainResult train(const MbeDataset& ds, const TrainConfig& cfg, std::ostream* events = nullptr);

}  // namespace mbe
