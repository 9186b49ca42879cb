#include "mbe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "mbe/attention.hpp"
#include "mbe/errors.hpp"

namespace mbe {

double filtered_rank(const std::vector<std::pair<EntityId, double>>& scores, EntityId gold,
                     const std::unordered_set<EntityId>& known_answers) {
  const double* gold_score = nullptr;
  for (const auto& [e, s] : scores)
    if (e == gold) {
      gold_score = &s;
      break;
    }
  if (!gold_score) throw data_error("filtered_rank: gold entity has no score");
  std::size_t better = 0, ties = 0;
  for (const auto& [e, s] : scores) {
    if (e == gold || known_answers.count(e)) continue;
    if (s > *gold_score)
      ++better;
    else if (s == *gold_score)
      ++ties;
  }
  return 1.0 + static_cast<double>(better) + static_cast<double>(ties) / 2.0;
}

Metrics metrics(const std::vector<double>& ranks) {
  if (ranks.empty()) throw data_error("metrics: empty rank list");
  double hits = 0.0, rr = 0.0;
  for (double r : ranks) {
    if (std::abs(r - 1.0) < 1e-12) hits += 1.0;
    rr += 1.0 / r;
  }
  return {hits / static_cast<double>(ranks.size()), rr / static_cast<double>(ranks.size())};
}

namespace {

using AnswerKey = std::pair<EntityId, RelationId>;
using AnswerMap = std::map<AnswerKey, std::unordered_set<EntityId>>;

void add_answers(AnswerMap& map, const std::vector<Fact>& facts) {
  for (const Fact& f : facts) map[{f.head, f.relation}].insert(f.tail);
}

std::mt19937_64 query_rng(std::uint64_t seed, std::size_t batch, std::size_t query_index) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(batch),
                    static_cast<std::uint64_t>(query_index)};
  return std::mt19937_64(seq);
}

}  // namespace

EvalRun evaluate(const MbeDataset& ds, const ParamSet& params, const RuleStore& rules,
                 const EvalConfig& cfg) {
  AttentionTable attn(rules, cfg.epsilon);
  std::vector<RuleKey> trustworthy = rules.trustworthy_rules(cfg.gamma1, cfg.gamma2);

  AnswerMap answers;
  add_answers(answers, ds.train);
  add_answers(answers, ds.valid);

  EvalRun run{cfg.setting, cfg.seed, {}};
  for (std::size_t i = 1; i <= ds.num_batches(); ++i) {
    const auto& batch = ds.batches[i - 1];
    add_answers(answers, batch.support);
    add_answers(answers, batch.query);

    GraphSnapshot snap = ds.snapshot_through_batch(i);
    if (cfg.use_augmentation) {
      std::vector<Fact> extra = augment(snap, trustworthy, cfg.max_new_per_pair);
      if (!extra.empty()) snap = snap.with_augmented(extra);
    }
    std::vector<EntityId> candidates = snap.entities();

    // One encoder pass per distinct query relation.
    std::map<RelationId, Embeddings> embeddings;
    {
      EncoderCache cache;
      for (const Fact& q : batch.query)
        if (!embeddings.count(q.relation))
          embeddings.emplace(q.relation,
                             cache.get(snap, params, cfg.encoder, attn, q.relation));
    }

    std::vector<double> ranks(batch.query.size(), 0.0);
    auto eval_query = [&](std::size_t qi) {
      const Fact& q = batch.query[qi];
      Query query{q.head, q.relation, q.tail};
      BeamResult br = beam_answer(snap, params, embeddings.at(q.relation), query, cfg.beam_size,
                                  cfg.max_steps, cfg.action_cap);
      const auto& known = answers.at({q.head, q.relation});

      std::vector<std::pair<EntityId, double>> scored;
      if (cfg.setting == EvalSetting::All) {
        scored.reserve(candidates.size());
        for (EntityId e : candidates) scored.emplace_back(e, br.score(e));
      } else {
        std::vector<EntityId> pool;
        pool.reserve(candidates.size());
        for (EntityId e : candidates)
          if (e != q.tail && !known.count(e)) pool.push_back(e);
        std::vector<EntityId> negatives;
        auto rng = query_rng(cfg.seed, i, qi);
        std::sample(pool.begin(), pool.end(), std::back_inserter(negatives), std::size_t{100},
                    rng);
        scored.emplace_back(q.tail, br.score(q.tail));
        for (EntityId e : negatives) scored.emplace_back(e, br.score(e));
      }
      ranks[qi] = filtered_rank(scored, q.tail, known);
    };

    std::size_t workers = std::max<std::size_t>(1, cfg.workers);
    if (workers == 1 || batch.query.size() < 2) {
      for (std::size_t qi = 0; qi < batch.query.size(); ++qi) eval_query(qi);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < workers; ++w)
        threads.emplace_back([&, w] {
          for (std::size_t qi = w; qi < batch.query.size(); qi += workers) eval_query(qi);
        });
      for (auto& t : threads) t.join();
    }

    run.batches.push_back({std::move(ranks), {}});
    run.batches.back().summary = metrics(run.batches.back().ranks);
  }
  return run;
}

}  // namespace mbe
