#include "mbe/graph.hpp"

#include <algorithm>

#include "mbe/errors.hpp"

namespace mbe {

GraphSnapshot::GraphSnapshot(std::shared_ptr<const Vocabulary> vocab, std::vector<Fact> facts)
    : vocab_(std::move(vocab)), facts_(std::move(facts)) {
  std::size_t n = vocab_->num_entities();
  out_.resize(n);
  in_.resize(n);
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    const Fact& f = facts_[i];
    if (f.head >= n || f.tail >= n) throw data_error("fact references unknown entity id");
    if (!vocab_->is_base(f.relation)) throw data_error("stored facts must use base relation ids");
    out_[f.head].push_back({f.relation, f.tail, i});
    in_[f.tail].push_back({f.relation, f.head, i});
    if (f.provenance == Provenance::Augmented) ++num_augmented_;
  }
}

std::vector<EntityId> GraphSnapshot::entities() const {
  std::vector<EntityId> out;
  for (EntityId e = 0; e < out_.size(); ++e)
    if (!out_[e].empty() || !in_[e].empty()) out.push_back(e);
  return out;
}

bool GraphSnapshot::has_entity(EntityId e) const {
  return e < out_.size() && (!out_[e].empty() || !in_[e].empty());
}

std::vector<Action> GraphSnapshot::action_space(EntityId at,
                                                std::optional<std::size_t> mask) const {
  if (!has_entity(at))
    throw data_error("action_space: entity id " + std::to_string(at) + " not in snapshot");
  const auto& outs = out_[at];
  const auto& ins = in_[at];
  std::vector<Action> actions;
  actions.reserve(outs.size() + ins.size() + 1);
  // Adjacency lists are in insertion order, so a two-way merge yields the
  // global fact-ordinal order.
  std::size_t i = 0, j = 0;
  while (i < outs.size() || j < ins.size()) {
    bool take_out = j >= ins.size() || (i < outs.size() && outs[i].ordinal <= ins[j].ordinal);
    if (take_out) {
      const Edge& e = outs[i++];
      if (!mask || e.ordinal != *mask) actions.push_back({e.relation, e.other, e.ordinal});
    } else {
      const Edge& e = ins[j++];
      if (!mask || e.ordinal != *mask)
        actions.push_back({vocab_->inverse(e.relation), e.other, e.ordinal});
    }
  }
  actions.push_back({vocab_->self_loop(), at, SIZE_MAX});
  return actions;
}

std::optional<std::size_t> GraphSnapshot::find_fact(EntityId h, RelationId r, EntityId t) const {
  if (h >= out_.size()) return std::nullopt;
  std::optional<std::size_t> fallback;
  for (const Edge& e : out_[h]) {
    if (e.relation != r || e.other != t) continue;
    if (facts_[e.ordinal].provenance != Provenance::Augmented) return e.ordinal;
    if (!fallback) fallback = e.ordinal;
  }
  return fallback;
}

GraphSnapshot GraphSnapshot::extended(std::vector<Fact> extra, bool bump_batches) const {
  GraphSnapshot next;
  next.vocab_ = vocab_;
  next.facts_ = facts_;
  next.out_ = out_;
  next.in_ = in_;
  next.active_batches_ = active_batches_ + (bump_batches ? 1 : 0);
  next.num_augmented_ = num_augmented_;
  std::size_t n = vocab_->num_entities();
  if (next.out_.size() < n) {
    next.out_.resize(n);
    next.in_.resize(n);
  }
  for (Fact& f : extra) {
    if (f.head >= n || f.tail >= n) throw data_error("merge: fact references unknown entity id");
    if (!vocab_->is_base(f.relation)) throw data_error("merge: non-base relation id");
    std::size_t ord = next.facts_.size();
    next.facts_.push_back(f);
    next.out_[f.head].push_back({f.relation, f.tail, ord});
    next.in_[f.tail].push_back({f.relation, f.head, ord});
    if (f.provenance == Provenance::Augmented) ++next.num_augmented_;
  }
  return next;
}

GraphSnapshot GraphSnapshot::merge_batch(const std::vector<Fact>& support) const {
  return extended(support, /*bump_batches=*/true);
}

GraphSnapshot GraphSnapshot::with_augmented(const std::vector<Fact>& augmented) const {
  for (const Fact& f : augmented)
    if (f.provenance != Provenance::Augmented)
      throw data_error("with_augmented: fact is not tagged augmented");
  return extended(augmented, /*bump_batches=*/false);
}

std::size_t GraphSnapshot::degree(EntityId e) const {
  if (e >= out_.size()) throw data_error("degree: entity id out of range");
  return out_[e].size() + in_[e].size();
}

double GraphSnapshot::degree_stats(const std::vector<EntityId>& subset) const {
  if (subset.empty()) throw data_error("degree_stats: empty subset");
  std::size_t total = 0;
  for (EntityId e : subset) {
    if (!has_entity(e))
      throw data_error("degree_stats: entity id " + std::to_string(e) + " not in snapshot");
    total += degree(e);
  }
  return static_cast<double>(total) / static_cast<double>(subset.size());
}

std::uint64_t GraphSnapshot::index_digest() const {
  // FNV-1a over every index entry.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
      h ^= (v >> (8 * k)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& adj : {std::cref(out_), std::cref(in_)})
    for (const auto& edges : adj.get())
      for (const Edge& e : edges) {
        mix(e.relation);
        mix(e.other);
        mix(e.ordinal);
      }
  mix(facts_.size());
  return h;
}

}  // namespace mbe
