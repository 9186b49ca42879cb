#include "mbe/attention.hpp"

#include <atomic>
#include <cmath>

namespace mbe {

namespace {
std::atomic<std::uint64_t> g_attention_version{0};
}

AttentionTable::AttentionTable(const RuleStore& store, double epsilon) {
  version_ = ++g_attention_version;
  for (const auto& [key, stats] : store.rules()) {
    Row& row = rows_[key.query_relation];
    double conf = confidence(stats);
    for (RelationId r : key.body) {
      auto [it, fresh] = row.corr.emplace(r, conf);
      if (!fresh && conf > it->second) it->second = conf;
    }
  }
  for (auto& [rq, row] : rows_)
    row.lambda = std::tanh(static_cast<double>(store.total_pos(rq)) / epsilon);
}

double AttentionTable::alpha(RelationId query_relation, RelationId neighbor_relation) const {
  auto it = rows_.find(query_relation);
  if (it == rows_.end()) return 1.0;
  const Row& row = it->second;
  auto cit = row.corr.find(neighbor_relation);
  double corr = cit == row.corr.end() ? 0.0 : cit->second;
  return row.lambda * corr + (1.0 - row.lambda);
}

std::vector<double> AttentionTable::alphas(RelationId query_relation,
                                           std::size_t num_relation_ids) const {
  std::vector<double> out(num_relation_ids, 1.0);
  auto it = rows_.find(query_relation);
  if (it == rows_.end()) return out;
  const Row& row = it->second;
  for (auto& a : out) a = 1.0 - row.lambda;
  for (const auto& [r, corr] : row.corr)
    if (r < num_relation_ids) out[r] = row.lambda * corr + (1.0 - row.lambda);
  return out;
}

double AttentionTable::lambda(RelationId query_relation) const {
  auto it = rows_.find(query_relation);
  return it == rows_.end() ? 0.0 : it->second.lambda;
}

}  // namespace mbe
