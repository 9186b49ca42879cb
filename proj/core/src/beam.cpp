#include "mbe/beam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mbe/errors.hpp"

namespace mbe {

double BeamResult::score(EntityId e) const {
  auto it = scores.find(e);
  return it == scores.end() ? -std::numeric_limits<double>::infinity() : it->second;
}

namespace {

void apply_action_cap(std::vector<Action>& actions, std::size_t cap) {
  if (cap == 0 || actions.size() <= cap + 1) return;
  Action self = actions.back();
  actions.pop_back();
  actions.erase(actions.begin(), actions.end() - static_cast<std::ptrdiff_t>(cap));
  actions.push_back(self);
}

struct Prefix {
  EntityId entity;
  LstmState parent_state;  // history before the step that reached `entity`
  RelationId relation = 0;
  bool is_root = true;
  double log_prob = 0.0;
  std::vector<RelationId> relations;
  std::vector<EntityId> entities;
  std::uint64_t seq = 0;  // insertion order breaks ties deterministically
};

struct WorsePrefix {
  bool operator()(const Prefix& a, const Prefix& b) const {
    if (a.log_prob != b.log_prob) return a.log_prob < b.log_prob;
    return a.seq > b.seq;
  }
};

}  // namespace

// Trajectory log-probabilities only decrease as a walk extends, so
// expanding prefixes best-first pops completed walks in globally sorted
// order: the first beam_size completions are exactly the beam_size most
// probable trajectories. The first completion reaching an entity is that
// entity's best, hence enlarging the beam never changes the score of an
// entity already found -- it only appends new ones.
BeamResult beam_answer(const GraphSnapshot& snapshot, const ParamSet& params,
                       const Embeddings& emb, const Query& query, std::size_t beam_size,
                       std::size_t max_steps, std::size_t action_cap) {
  if (!snapshot.has_entity(query.source))
    throw data_error("beam_answer: source entity not in snapshot");
  if (beam_size == 0) throw data_error("beam_answer: beam size must be positive");
  NoGradGuard guard;

  std::priority_queue<Prefix, std::vector<Prefix>, WorsePrefix> frontier;
  std::uint64_t seq = 0;
  frontier.push({query.source, {}, 0, true, 0.0, {}, {}, seq++});

  BeamResult out;
  while (!frontier.empty() && out.trajectories.size() < beam_size) {
    Prefix p = frontier.top();
    frontier.pop();
    if (p.relations.size() == max_steps) {
      out.trajectories.push_back({p.relations, p.entities, p.log_prob});
      out.scores.emplace(p.entity, p.log_prob);  // first hit is the max
      continue;
    }
    LstmState state = p.is_root
                          ? policy_initial_state(params, emb, p.entity)
                          : policy_advance(params, emb, p.parent_state, p.relation, p.entity);
    std::vector<Action> actions = snapshot.action_space(p.entity);
    apply_action_cap(actions, action_cap);
    Tensor probs = policy_forward(params, emb, query.relation, state, p.entity, actions);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      Prefix next;
      next.entity = actions[i].entity;
      next.parent_state = state;
      next.relation = actions[i].relation;
      next.is_root = false;
      next.log_prob = p.log_prob + std::log(probs.at(i));
      next.relations = p.relations;
      next.relations.push_back(actions[i].relation);
      next.entities = p.entities;
      next.entities.push_back(actions[i].entity);
      next.seq = seq++;
      frontier.push(std::move(next));
    }
  }
  return out;
}

}  // namespace mbe
