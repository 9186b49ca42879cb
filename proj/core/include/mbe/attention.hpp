#pragma once

#include <unordered_map>
#include <vector>

#include "mbe/rules.hpp"

namespace mbe {

// Per-query-relation attention weights over neighbor relations:
//   alpha(r_q, r) = lambda(r_q) * corr(r_q, r) + (1 - lambda(r_q))
// where corr(r_q, r) is the best confidence among r_q's rules whose body
// contains r (0 when none do), and lambda(r_q) = tanh(total_pos(r_q)/eps)
// saturates towards pure correlation as evidence accumulates. With no
// rules for r_q every weight is 1, i.e. uniform attention.
class AttentionTable {
 public:
  AttentionTable() = default;
  AttentionTable(const RuleStore& store, double epsilon);

  double alpha(RelationId query_relation, RelationId neighbor_relation) const;

  // Dense row over all relation ids; used by the encoder.
  std::vector<double> alphas(RelationId query_relation, std::size_t num_relation_ids) const;

  double lambda(RelationId query_relation) const;

  // Bumped on construction from a store; lets caches detect staleness.
  std::uint64_t version() const { return version_; }

 private:
  struct Row {
    double lambda = 0.0;
    std::unordered_map<RelationId, double> corr;
  };
  std::unordered_map<RelationId, Row> rows_;
  std::uint64_t version_ = 0;
};

}  // namespace mbe
