#pragma once

#include <cstdint>

#include "mbe/dataset.hpp"

namespace mbe::testing {

// Synthetic expanding KG with a planted 2-hop rule.
//
// Original graph: per group g there are `group_size` chains
// a -r1-> b -r2-> c_g, with rq(a, c_g) as the exact r1∘r2 closure, plus
// r3 edges between all a-pairs of the same group. Every a has exactly one
// r1 edge and every b exactly one r2 edge, so the gold tail is unique and
// conf(rq <= r1, r2) = 1.
//
// One emerging batch: `new_c` fresh tail entities each attached by two
// support facts (b_i, r2, c') and (b_j, r2, c') with b_i, b_j in the same
// group, queried as (a_i, rq, c') and (a_j, rq, c'); plus `new_a` fresh
// head entities attached by (a', r1, b) and queried as (a', rq, c_g).
//
// support_keep < 1 thins the support facts (never dropping a new
// entity's last fact). With two-step walks, losing (b_i, r2, c') makes
// c' unreachable from a_i unless an augmented rq edge bridges the gap.
struct PlantedConfig {
  std::size_t groups = 21;
  std::size_t group_size = 4;
  std::size_t new_c = 16;
  std::size_t new_a = 4;
  double valid_fraction = 0.2;  // of the rq closure facts
  double support_keep = 1.0;
  std::uint64_t seed = 0;
};

MbeDataset make_planted(const PlantedConfig& cfg);

}  // namespace mbe::testing
