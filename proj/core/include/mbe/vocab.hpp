#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbe {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Bidirectional label<->id maps for entities and relations.
//
// Relation id layout (for B interned base relations):
//   [0, B)      base relations, in interning order
//   [B, 2B)     inverse relations, inverse(r) = r + B
//   2B          self-loop relation
//   2B + 1      start relation (policy history seed)
// Facts always store base ids; the derived ids exist only in indexes,
// embedding tables and rule bodies. Derived ids shift when a new base
// relation is interned, so interning must finish before any derived id
// is held across calls.
class Vocabulary {
 public:
  enum class Kind { Entity, Relation };

  // Idempotent. Interning a relation implicitly allocates its inverse id.
  // Throws data_error on empty labels or on a label already interned
  // under the other kind.
  std::uint32_t intern(const std::string& label, Kind kind);

  // Lookup without interning. Throws data_error when absent.
  EntityId entity_id(const std::string& label) const;
  // Accepts "label^-1" for inverse relations.
  RelationId relation_id(const std::string& label) const;

  bool has_entity(const std::string& label) const;
  bool has_relation(const std::string& label) const;

  const std::string& entity_label(EntityId id) const;
  // Renders any relation id, including "label^-1", "<self>" and "<start>".
  std::string relation_label(RelationId id) const;

  std::size_t num_entities() const { return entity_labels_.size(); }
  std::size_t num_base_relations() const { return relation_labels_.size(); }
  // base + inverse + self-loop + start
  std::size_t num_relation_ids() const { return 2 * relation_labels_.size() + 2; }

  RelationId self_loop() const { return static_cast<RelationId>(2 * relation_labels_.size()); }
  RelationId start_relation() const { return static_cast<RelationId>(2 * relation_labels_.size() + 1); }

  bool is_base(RelationId r) const { return r < relation_labels_.size(); }
  bool is_inverse(RelationId r) const {
    return r >= relation_labels_.size() && r < 2 * relation_labels_.size();
  }
  bool is_self_loop(RelationId r) const { return r == self_loop(); }

  // inverse(inverse(r)) == r; the self-loop is its own inverse.
  RelationId inverse(RelationId r) const;

 private:
  std::unordered_map<std::string, std::uint32_t> entity_ids_;
  std::vector<std::string> entity_labels_;
  std::unordered_map<std::string, std::uint32_t> relation_ids_;
  std::vector<std::string> relation_labels_;
};

}  // namespace mbe
