#include "mbe/vocab.hpp"

#include "mbe/errors.hpp"

namespace mbe {

std::uint32_t Vocabulary::intern(const std::string& label, Kind kind) {
  if (label.empty()) throw data_error("intern: empty label");
  if (kind == Kind::Entity) {
    if (relation_ids_.count(label))
      throw data_error("intern: '" + label + "' already interned as a relation");
    auto it = entity_ids_.find(label);
    if (it != entity_ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(entity_labels_.size());
    entity_ids_.emplace(label, id);
    entity_labels_.push_back(label);
    return id;
  }
  if (entity_ids_.count(label))
    throw data_error("intern: '" + label + "' already interned as an entity");
  auto it = relation_ids_.find(label);
  if (it != relation_ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(relation_labels_.size());
  relation_ids_.emplace(label, id);
  relation_labels_.push_back(label);
  return id;
}

EntityId Vocabulary::entity_id(const std::string& label) const {
  auto it = entity_ids_.find(label);
  if (it == entity_ids_.end()) throw data_error("unknown entity: " + label);
  return it->second;
}

RelationId Vocabulary::relation_id(const std::string& label) const {
  if (label.size() > 3 && label.ends_with("^-1")) {
    auto base = relation_id(label.substr(0, label.size() - 3));
    return inverse(base);
  }
  auto it = relation_ids_.find(label);
  if (it == relation_ids_.end()) throw data_error("unknown relation: " + label);
  return it->second;
}

bool Vocabulary::has_entity(const std::string& label) const {
  return entity_ids_.count(label) != 0;
}

bool Vocabulary::has_relation(const std::string& label) const {
  if (label.size() > 3 && label.ends_with("^-1"))
    return relation_ids_.count(label.substr(0, label.size() - 3)) != 0;
  return relation_ids_.count(label) != 0;
}

const std::string& Vocabulary::entity_label(EntityId id) const {
  if (id >= entity_labels_.size()) throw data_error("entity id out of range");
  return entity_labels_[id];
}

std::string Vocabulary::relation_label(RelationId id) const {
  const auto base = relation_labels_.size();
  if (id < base) return relation_labels_[id];
  if (id < 2 * base) return relation_labels_[id - base] + "^-1";
  if (id == self_loop()) return "<self>";
  if (id == start_relation()) return "<start>";
  throw data_error("relation id out of range");
}

RelationId Vocabulary::inverse(RelationId r) const {
  const auto base = static_cast<RelationId>(relation_labels_.size());
  if (r < base) return r + base;
  if (r < 2 * base) return r - base;
  if (r == self_loop()) return r;
  throw data_error("inverse: relation id " + std::to_string(r) + " has no inverse");
}

}  // namespace mbe
