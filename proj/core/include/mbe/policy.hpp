#pragma once

#include <optional>
#include <random>

#include "mbe/encoder.hpp"

namespace mbe {

// Tail-prediction query (e_s, r_q, ?); target present for training/eval.
struct Query {
  EntityId source;
  RelationId relation;
  std::optional<EntityId> target;
};

// Creates the stacked-LSTM history encoder ("policy.lstm.*", hidden 2d over
// inputs [u_r; u_e] of size 2d) and the two feed-forward policy matrices
// "policy.w_fc1" (4d -> 2d) and "policy.w_fc2" (2d -> 2d).
void policy_init(ParamSet& params, std::size_t dim, std::size_t lstm_layers,
                 std::mt19937_64& rng);

// History state h_0 from the start-relation embedding and the source
// entity. Layer count is read off the created parameters.
LstmState policy_initial_state(const ParamSet& params, const Embeddings& emb, EntityId source);
// Advance the history with the taken (relation, entity) step.
LstmState policy_advance(const ParamSet& params, const Embeddings& emb, const LstmState& state,
                         RelationId relation, EntityId entity);

// softmax( A * W_fc2 relu(W_fc1 [u_{e_t}; u_{r_q}; h_t]) ) where row i of A
// is [u_r; u_e'] for actions[i]. 1-D, same order as `actions`.
Tensor policy_forward(const ParamSet& params, const Embeddings& emb, RelationId query_relation,
                      const LstmState& state, EntityId current, const std::vector<Action>& actions);

struct Rollout {
  std::vector<RelationId> relations;  // length max_steps
  std::vector<EntityId> entities;     // visited after each step
  Tensor log_prob;                    // scalar, on-tape during training
  EntityId final_entity;
};

enum class RolloutMode { Sample, Greedy };

struct RolloutOptions {
  std::size_t max_steps = 3;
  RolloutMode mode = RolloutMode::Sample;
  // Remove the gold fact occurrence (both directions) from every step's
  // action space. Requires query.target.
  bool mask_gold = false;
  // Probability of hiding each non-self-loop action while sampling; never
  // applied in greedy mode. The self-loop always survives.
  double action_dropout = 0.0;
  // Keep at most this many non-self-loop actions per node, preferring the
  // highest fact ordinals; 0 = uncapped.
  std::size_t action_cap = 0;
};

// Walks exactly max_steps transitions from query.source.
Rollout rollout(const GraphSnapshot& snapshot, const ParamSet& params, const Embeddings& emb,
                const Query& query, const RolloutOptions& opts, std::mt19937_64& rng);

// 1 iff the walk ended on the gold target. Training-only: requires target.
int terminal_reward(const Rollout& r, const Query& query);

}  // namespace mbe
