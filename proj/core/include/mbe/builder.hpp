#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mbe/dataset.hpp"

namespace mbe {

struct BuildConfig {
  std::size_t n_seeds = 5000;
  double keep_prob = 0.5;        // p in (0, 1]
  std::size_t num_batches = 5;
  std::uint64_t rng_seed = 0;
  // train:valid fact ratio, 4:1
  std::size_t split_train = 4;
  std::size_t split_valid = 1;

  void check() const;
};

struct BuildResult {
  MbeDataset dataset;
  std::size_t dropped_facts = 0;
};

// Seeding / growing / dividing / cleaning construction of an MBE dataset
// from a static triple list. Deterministic given (source, cfg).
BuildResult build_mbe(const std::vector<TripleLine>& source, const BuildConfig& cfg);

// Splits a batch's facts into (support, query) with a deterministic BFS
// spanning forest: roots are previously-known entities first, edges are
// taken in fact-ordinal order. Tree facts become support, the rest query.
// Every new entity with at least one fact ends up in support.
// `known` lists the entities that emerged before this batch.
std::pair<std::vector<Fact>, std::vector<Fact>> spanning_split(
    const std::vector<Fact>& batch_facts, const std::vector<EntityId>& known,
    const std::vector<EntityId>& new_entities);

}  // namespace mbe
