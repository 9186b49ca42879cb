#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mbe/graph.hpp"

namespace mbe {

// Original train/valid splits plus N ordered batches of
// (support facts, query facts), with the entity partition that says in
// which batch each entity first emerged.
struct MbeDataset {
  std::shared_ptr<Vocabulary> vocab;
  std::vector<Fact> train;
  std::vector<Fact> valid;
  struct Batch {
    std::vector<Fact> support;
    std::vector<Fact> query;
  };
  std::vector<Batch> batches;

  std::vector<EntityId> original_entities;           // E_o
  std::vector<std::vector<EntityId>> batch_entities;  // E_1..E_N

  std::size_t num_batches() const { return batches.size(); }

  // Snapshot over the training facts only (the agent's environment).
  GraphSnapshot train_snapshot() const;
  // K_o = T ∪ V.
  GraphSnapshot original_snapshot() const;
  // K_o ∪ S_1 ∪ ... ∪ S_i  (i in [1, N]); i == 0 gives K_o.
  GraphSnapshot snapshot_through_batch(std::size_t i) const;
};

// One fact per line: head<TAB>relation<TAB>tail. '#'-prefixed comment
// lines and blank lines are ignored.
struct TripleLine {
  std::string head, relation, tail;
};
std::vector<TripleLine> read_triple_file(const std::filesystem::path& path);
void write_triple_file(const std::filesystem::path& path, const MbeDataset& ds,
                       const std::vector<Fact>& facts);

// Loads train.txt, valid.txt, batch_<i>/support.txt, batch_<i>/test.txt.
// Relations are interned from train.txt only; an unknown relation in any
// other file is an error listing the offending lines. Entity partitions
// are reconstructed from first appearance.
MbeDataset load_dataset(const std::filesystem::path& dir);

// Writes the directory layout above plus meta.json. Deterministic:
// identical datasets produce byte-identical trees.
void save_dataset(const MbeDataset& ds, const std::filesystem::path& dir,
                  std::size_t dropped_facts = 0);

// Empty iff all dataset invariants hold:
//   1. relation set of every batch is a subset of the train relations
//   2. chronological correctness (no fact in batch i touches E_j, j > i)
//   3. E_V ⊆ E_T and entities(Q_i) ⊆ E_T ∪ E_S1 ∪ ... ∪ E_Si
//   4. every entity of E_i appears in at least one fact of S_i
std::vector<std::string> validate_mbe(const MbeDataset& ds);

}  // namespace mbe
