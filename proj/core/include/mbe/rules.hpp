#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mbe/graph.hpp"

namespace mbe {

// Relation chain extracted from a trajectory, keyed by query relation.
// Bodies never contain the self-loop relation (stripped on record).
struct RuleKey {
  RelationId query_relation;
  std::vector<RelationId> body;

  auto operator<=>(const RuleKey&) const = default;
};

struct RuleStats {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

double confidence(const RuleStats& stats);

// Trajectory-derived rules with positive/negative counts, indexed by
// query relation.
class RuleStore {
 public:
  // Strips self-loop steps; all-self-loop trajectories are not recorded.
  void record_trajectory(const Vocabulary& vocab, RelationId query_relation,
                         const std::vector<RelationId>& trajectory, bool success);

  // { p : conf(p) >= gamma1 and pos(p) >= gamma2 }
  std::vector<RuleKey> trustworthy_rules(double gamma1, std::uint64_t gamma2) const;

  const std::map<RuleKey, RuleStats>& rules() const { return rules_; }
  // All rules for one query relation (the M_{r_q} index).
  std::vector<const std::map<RuleKey, RuleStats>::value_type*> for_query(
      RelationId query_relation) const;

  std::uint64_t total_pos(RelationId query_relation) const;
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }

  // Folds per-worker counters into this store.
  void merge(const RuleStore& other);

  // Adds counts for an already-formed key (used by rule-file import).
  void add(const RuleKey& key, const RuleStats& stats);

 private:
  std::map<RuleKey, RuleStats> rules_;  // ordered: deterministic iteration
};

// Rule-file format, one rule per line:
//   head_rel <= body_rel_1, body_rel_2, ... | conf=<float> support=<int>
// Inverse relations are written as "label^-1".
// Imported stats are synthesized as pos = round(support*conf*100),
// neg = support*100 - pos. Duplicate keys: last wins, with a warning
// pushed to `warnings` when given.
RuleStore import_rules(const std::filesystem::path& path, const Vocabulary& vocab,
                       std::vector<std::string>* warnings = nullptr);
void export_rules(const std::filesystem::path& path, const RuleStore& store,
                  const Vocabulary& vocab);

// Link augmentation: for every (head, relation) pair occurring in a
// stored fact, follow each trustworthy rule body for that relation
// through action_space edges (inverse edges allowed, no masking) and emit
// (head, relation, reached) with augmented provenance. Duplicates of
// existing facts are still emitted; distinct triples only. A cap of 0
// means uncapped.
std::vector<Fact> augment(const GraphSnapshot& snapshot, const std::vector<RuleKey>& trustworthy,
                          std::size_t max_new_per_pair);

}  // namespace mbe
