#include "mbe/policy.hpp"

#include <algorithm>

#include "mbe/errors.hpp"

namespace mbe {

void policy_init(ParamSet& params, std::size_t dim, std::size_t lstm_layers,
                 std::mt19937_64& rng) {
  lstm_init(params, "policy.lstm", lstm_layers, 2 * dim, 2 * dim, rng);
  params.create("policy.w_fc1", xavier_init({2 * dim, 4 * dim}, rng));
  params.create("policy.w_fc2", xavier_init({2 * dim, 2 * dim}, rng));
}

namespace {

Tensor entity_row(const Embeddings& emb, EntityId e) {
  if (e >= emb.entities.rows())
    throw data_error("entity id " + std::to_string(e) + " outside encoded snapshot");
  return row(emb.entities, e);
}

Tensor relation_row(const Embeddings& emb, RelationId r) {
  if (r >= emb.relations.rows())
    throw data_error("relation id " + std::to_string(r) + " outside embedding table");
  return row(emb.relations, r);
}

}  // namespace

LstmState policy_initial_state(const ParamSet& params, const Embeddings& emb, EntityId source) {
  std::size_t layers = 0;
  while (params.has("policy.lstm.l" + std::to_string(layers) + ".w_ih")) ++layers;
  if (layers == 0) throw numeric_error("policy_initial_state: policy LSTM not initialized");
  std::size_t hidden = 2 * emb.entities.cols();
  LstmState zero = lstm_zero_state(layers, hidden);
  Tensor x = concat({relation_row(emb, static_cast<RelationId>(emb.relations.rows() - 1)),
                     entity_row(emb, source)});
  return lstm_step(params, "policy.lstm", zero, x);
}

LstmState policy_advance(const ParamSet& params, const Embeddings& emb, const LstmState& state,
                         RelationId relation, EntityId entity) {
  Tensor x = concat({relation_row(emb, relation), entity_row(emb, entity)});
  return lstm_step(params, "policy.lstm", state, x);
}

Tensor policy_forward(const ParamSet& params, const Embeddings& emb, RelationId query_relation,
                      const LstmState& state, EntityId current,
                      const std::vector<Action>& actions) {
  if (actions.empty()) throw numeric_error("policy_forward: empty action space");
  Tensor feat =
      concat({entity_row(emb, current), relation_row(emb, query_relation), state.h.back()});
  Tensor hidden = relu(matvec(params.get("policy.w_fc1"), feat));
  Tensor proj = matvec(params.get("policy.w_fc2"), hidden);
  std::vector<Tensor> rows;
  rows.reserve(actions.size());
  for (const Action& a : actions)
    rows.push_back(concat({relation_row(emb, a.relation), entity_row(emb, a.entity)}));
  Tensor logits = matvec(stack(rows), proj);
  return softmax(logits);
}

namespace {

// Keep the `cap` highest-ordinal non-self-loop actions; the self-loop
// (always last) survives unconditionally.
void apply_action_cap(std::vector<Action>& actions, std::size_t cap) {
  if (cap == 0 || actions.size() <= cap + 1) return;
  Action self = actions.back();
  actions.pop_back();
  actions.erase(actions.begin(), actions.end() - static_cast<std::ptrdiff_t>(cap));
  actions.push_back(self);
}

void apply_action_dropout(std::vector<Action>& actions, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Action> kept;
  kept.reserve(actions.size());
  for (std::size_t i = 0; i + 1 < actions.size(); ++i)
    if (unit(rng) >= rate) kept.push_back(actions[i]);
  kept.push_back(actions.back());  // self-loop
  actions = std::move(kept);
}

std::size_t sample_index(const Tensor& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  double acc = 0.0;
  const auto& p = probs.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;
}

std::size_t greedy_index(const Tensor& probs) {
  const auto& p = probs.data();
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

Rollout rollout(const GraphSnapshot& snapshot, const ParamSet& params, const Embeddings& emb,
                const Query& query, const RolloutOptions& opts, std::mt19937_64& rng) {
  std::optional<std::size_t> mask;
  if (opts.mask_gold) {
    if (!query.target) throw data_error("rollout: mask_gold requires a target");
    mask = snapshot.find_fact(query.source, query.relation, *query.target);
  }

  Rollout out;
  out.final_entity = query.source;
  LstmState state = policy_initial_state(params, emb, query.source);
  EntityId current = query.source;
  for (std::size_t t = 0; t < opts.max_steps; ++t) {
    std::vector<Action> actions = snapshot.action_space(current, mask);
    apply_action_cap(actions, opts.action_cap);
    if (opts.mode == RolloutMode::Sample)
      apply_action_dropout(actions, opts.action_dropout, rng);
    Tensor probs = policy_forward(params, emb, query.relation, state, current, actions);
    std::size_t pick_i =
        opts.mode == RolloutMode::Sample ? sample_index(probs, rng) : greedy_index(probs);
    const Action& a = actions[pick_i];
    Tensor lp = log_t(pick(probs, pick_i));
    out.log_prob = out.log_prob.defined() ? add(out.log_prob, lp) : lp;
    out.relations.push_back(a.relation);
    out.entities.push_back(a.entity);
    state = policy_advance(params, emb, state, a.relation, a.entity);
    current = a.entity;
  }
  out.final_entity = current;
  return out;
}

int terminal_reward(const Rollout& r, const Query& query) {
  if (!query.target) throw data_error("terminal_reward: query has no target");
  return r.final_entity == *query.target ? 1 : 0;
}

}  // namespace mbe
