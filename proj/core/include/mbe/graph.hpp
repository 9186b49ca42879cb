#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_set>
#include <vector>

#include "mbe/vocab.hpp"

namespace mbe {

// Where a fact came from. Immutable after insertion.
enum class Provenance : std::uint8_t {
  OriginalTrain,
  OriginalValid,
  BatchSupport,
  BatchQuery,
  Augmented,
};

struct Fact {
  EntityId head;
  RelationId relation;  // base id only
  EntityId tail;
  Provenance provenance = Provenance::OriginalTrain;
  std::uint16_t batch = 0;  // meaningful for BatchSupport/BatchQuery

  bool same_triple(const Fact& o) const {
    return head == o.head && relation == o.relation && tail == o.tail;
  }
  friend bool operator==(const Fact& a, const Fact& b) {
    return a.head == b.head && a.relation == b.relation && a.tail == b.tail &&
           a.provenance == b.provenance && a.batch == b.batch;
  }
};

// One entry of an action space: traverse `relation` to land on `entity`.
struct Action {
  RelationId relation;
  EntityId entity;
  // Ordinal of the underlying stored fact; SIZE_MAX for the self-loop.
  std::size_t fact_ordinal;
};

// Immutable indexed fact set. Out/in adjacency over stored facts; inverse
// and self-loop edges are materialized only by action_space(). Safe for
// unlimited concurrent readers once constructed.
class GraphSnapshot {
 public:
  GraphSnapshot(std::shared_ptr<const Vocabulary> vocab, std::vector<Fact> facts);

  const Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }
  const std::vector<Fact>& facts() const { return facts_; }
  std::size_t num_entities() const { return out_.size(); }
  int active_batches() const { return active_batches_; }
  std::size_t num_augmented() const { return num_augmented_; }

  // Entities with at least one stored-fact incidence.
  std::vector<EntityId> entities() const;
  bool has_entity(EntityId e) const;

  // Out-edges as (r, e'), in-edges as (inverse(r), e'), self-loop last.
  // Deterministic: merged by fact ordinal. When `mask` names a fact
  // ordinal, both directions of exactly that occurrence are removed.
  std::vector<Action> action_space(EntityId at,
                                   std::optional<std::size_t> mask = std::nullopt) const;

  // First stored occurrence of (h, r, t) that is not augmented; falls back
  // to any occurrence. Empty when the triple is absent.
  std::optional<std::size_t> find_fact(EntityId h, RelationId r, EntityId t) const;

  // New snapshot with `support` appended; this snapshot is unchanged.
  // active_batches is incremented. Entities may be new; relations must be
  // interned already (facts carry ids, so that holds by construction).
  GraphSnapshot merge_batch(const std::vector<Fact>& support) const;

  // New snapshot with augmented facts appended (provenance must be
  // Augmented). Does not bump active_batches.
  GraphSnapshot with_augmented(const std::vector<Fact>& augmented) const;

  // Stored-fact incidences per entity (out-degree + in-degree over stored
  // facts; derived inverse edges are not double counted).
  std::size_t degree(EntityId e) const;
  // Average degree over a subset. Throws data_error on an empty subset or
  // an entity outside the snapshot.
  double degree_stats(const std::vector<EntityId>& subset) const;

  // Digest over all indexes; used to check snapshot immutability.
  std::uint64_t index_digest() const;

 private:
  struct Edge {
    RelationId relation;
    EntityId other;
    std::size_t ordinal;
  };

  GraphSnapshot() = default;
  GraphSnapshot extended(std::vector<Fact> extra, bool bump_batches) const;

  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<Fact> facts_;
  std::vector<std::vector<Edge>> out_;  // indexed by head
  std::vector<std::vector<Edge>> in_;   // indexed by tail
  int active_batches_ = 0;
  std::size_t num_augmented_ = 0;
};

}  // namespace mbe
