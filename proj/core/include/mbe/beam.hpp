#pragma once

#include <unordered_map>

#include "mbe/policy.hpp"

namespace mbe {

struct ScoredTrajectory {
  std::vector<RelationId> relations;
  std::vector<EntityId> entities;
  double log_prob;
};

struct BeamResult {
  // Best trajectory log-probability per reached final entity. Entities
  // absent from the map are unreachable and score -infinity.
  std::unordered_map<EntityId, double> scores;
  // Final beam, best first.
  std::vector<ScoredTrajectory> trajectories;

  double score(EntityId e) const;
};

// Best-first search for the beam_size most probable max_steps-walks, run
// without gradient recording. Deterministic (ties break by expansion
// order) and monotone: enlarging the beam only adds entities and never
// changes the score of one already found.
BeamResult beam_answer(const GraphSnapshot& snapshot, const ParamSet& params,
                       const Embeddings& emb, const Query& query, std::size_t beam_size,
                       std::size_t max_steps, std::size_t action_cap = 0);

}  // namespace mbe
