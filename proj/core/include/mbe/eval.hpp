#pragma once

#include <cstdint>
#include <unordered_set>

#include "mbe/beam.hpp"
#include "mbe/dataset.hpp"
#include "mbe/rules.hpp"

namespace mbe {

// Filtered rank of `gold` inside `scores` (the complete candidate list;
// gold must appear). Other known answers are removed before ranking.
// Ties are broken by expected rank: gold sits at the mean position among
// equal scores, so the result may be fractional.
double filtered_rank(const std::vector<std::pair<EntityId, double>>& scores, EntityId gold,
                     const std::unordered_set<EntityId>& known_answers);

struct Metrics {
  double hits1;
  double mrr;
};
// hits1 = fraction of exact rank-1 results; mrr = mean reciprocal rank.
Metrics metrics(const std::vector<double>& ranks);

enum class EvalSetting { All, Sample100 };

struct EvalConfig {
  EvalSetting setting = EvalSetting::All;
  std::uint64_t seed = 0;
  EncoderConfig encoder;
  std::size_t beam_size = 128;
  std::size_t max_steps = 3;
  std::size_t action_cap = 256;
  double epsilon = 1000.0;
  double gamma1 = 0.8;
  std::uint64_t gamma2 = 3;
  bool use_augmentation = true;
  std::size_t max_new_per_pair = 50;
  std::size_t workers = 1;
};

struct BatchEval {
  std::vector<double> ranks;  // one per query, query order
  Metrics summary;
};

struct EvalRun {
  EvalSetting setting;
  std::uint64_t seed;
  std::vector<BatchEval> batches;  // index 0 = first emerging batch
};

// Answers every batch-i query with a beam search over
// K_o ∪ S_1..S_i ∪ (augmented facts), ranking the gold tail against all
// entities of that snapshot (All) or 100 seeded negatives (Sample100).
// The filter set at batch i is every fact visible then: the original
// splits, supports 1..i and queries 1..i.
EvalRun evaluate(const MbeDataset& ds, const ParamSet& params, const RuleStore& rules,
                 const EvalConfig& cfg);

}  // namespace mbe
