#include "mbe/train.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <unordered_set>

#include "mbe/beam.hpp"
#include "mbe/errors.hpp"
#include "mbe/eval.hpp"

namespace mbe {

namespace {

using AnswerKey = std::pair<EntityId, RelationId>;
using AnswerMap = std::map<AnswerKey, std::unordered_set<EntityId>>;

std::map<std::string, std::vector<double>> snapshot_values(const ParamSet& params) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [name, p] : params.all()) out[name] = p.data();
  return out;
}

void restore_values(ParamSet& params, const std::map<std::string, std::vector<double>>& values) {
  for (const auto& [name, data] : values) params.get(name).mutable_data() = data;
}

double validation_mrr(const GraphSnapshot& working, const ParamSet& params,
                      const TrainConfig& cfg, const AttentionTable& attn,
                      const std::vector<Fact>& valid, const AnswerMap& answers) {
  NoGradGuard guard;
  EncoderCache cache;
  std::vector<EntityId> candidates = working.entities();
  std::vector<double> ranks;
  ranks.reserve(valid.size());
  for (const Fact& f : valid) {
    if (!working.has_entity(f.head)) continue;
    const Embeddings& emb = cache.get(working, params, cfg.encoder, attn, f.relation);
    Query query{f.head, f.relation, f.tail};
    BeamResult br =
        beam_answer(working, params, emb, query, cfg.beam_size, cfg.max_steps, cfg.action_cap);
    std::vector<std::pair<EntityId, double>> scored;
    scored.reserve(candidates.size());
    bool gold_present = false;
    for (EntityId e : candidates) {
      scored.emplace_back(e, br.score(e));
      gold_present |= e == f.tail;
    }
    if (!gold_present) scored.emplace_back(f.tail, br.score(f.tail));
    ranks.push_back(filtered_rank(scored, f.tail, answers.at({f.head, f.relation})));
  }
  if (ranks.empty()) return 0.0;
  return metrics(ranks).mrr;
}

}  // namespace

TrainResult train(const MbeDataset& ds, const TrainConfig& cfg, std::ostream* events) {
  std::mt19937_64 rng(cfg.rng_seed);
  const Vocabulary& vocab = *ds.vocab;

  TrainResult result;
  encoder_init(result.params, cfg.encoder, vocab.num_relation_ids(), rng);
  policy_init(result.params, cfg.encoder.dim, cfg.lstm_layers, rng);
  ParamSet& params = result.params;

  GraphSnapshot base = ds.train_snapshot();

  std::map<RelationId, std::vector<Query>> by_relation;
  for (const Fact& f : ds.train) by_relation[f.relation].push_back({f.head, f.relation, f.tail});

  AnswerMap answers;
  for (const Fact& f : ds.train) answers[{f.head, f.relation}].insert(f.tail);
  for (const Fact& f : ds.valid) answers[{f.head, f.relation}].insert(f.tail);

  auto best_values = snapshot_values(params);
  result.best_valid_mrr = -1.0;
  double baseline = 0.0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const RuleStore& active = cfg.rules_overlay ? *cfg.rules_overlay : result.rules;
    std::vector<RuleKey> trustworthy = active.trustworthy_rules(cfg.gamma1, cfg.gamma2);
    std::vector<Fact> extra;
    if (cfg.use_augmentation) extra = augment(base, trustworthy, cfg.max_new_per_pair);
    GraphSnapshot working = extra.empty() ? base : base.with_augmented(extra);
    AttentionTable attn(active, cfg.epsilon);

    RuleStore epoch_store;
    double loss_sum = 0.0;
    std::size_t num_batches = 0, num_rollouts = 0, num_successes = 0;

    RolloutOptions opts;
    opts.max_steps = cfg.max_steps;
    opts.mode = RolloutMode::Sample;
    opts.mask_gold = true;
    opts.action_dropout = cfg.action_dropout;
    opts.action_cap = cfg.action_cap;

    for (auto& [rq, queries] : by_relation) {
      std::shuffle(queries.begin(), queries.end(), rng);
      for (std::size_t start = 0; start < queries.size(); start += cfg.batch_queries) {
        std::size_t end = std::min(queries.size(), start + cfg.batch_queries);
        Tape tape;
        Embeddings emb = encode(working, params, cfg.encoder, attn, rq);
        std::vector<Tensor> terms;
        for (std::size_t qi = start; qi < end; ++qi) {
          for (std::size_t k = 0; k < cfg.rollouts_per_query; ++k) {
            Rollout r = rollout(working, params, emb, queries[qi], opts, rng);
            int reward = terminal_reward(r, queries[qi]);
            if (!cfg.rules_overlay)
              epoch_store.record_trajectory(vocab, rq, r.relations, reward != 0);
            ++num_rollouts;
            num_successes += reward;
            double advantage = static_cast<double>(reward) - (cfg.use_baseline ? baseline : 0.0);
            if (cfg.use_baseline) baseline = 0.95 * baseline + 0.05 * reward;
            if (advantage != 0.0) terms.push_back(scale(r.log_prob, advantage));
          }
        }
        if (!terms.empty()) {
          Tensor total = terms[0];
          for (std::size_t i = 1; i < terms.size(); ++i) total = add(total, terms[i]);
          double denom = static_cast<double>((end - start) * cfg.rollouts_per_query);
          Tensor loss = scale(total, -1.0 / denom);
          tape.backward(loss);
          params.adam_step(cfg.lr);
          params.zero_grad();
          loss_sum += loss.item();
          ++num_batches;
        }
      }
    }

    if (!cfg.rules_overlay) result.rules.merge(epoch_store);

    double mrr = validation_mrr(working, params, cfg, attn, ds.valid, answers);
    // Ties go to the later epoch: equal validation MRR, more training.
    if (ds.valid.empty() || mrr >= result.best_valid_mrr) {
      result.best_valid_mrr = mrr;
      result.best_epoch = epoch;
      best_values = snapshot_values(params);
    }

    EpochLog log{epoch,
                 num_batches ? loss_sum / static_cast<double>(num_batches) : 0.0,
                 num_rollouts ? static_cast<double>(num_successes) /
                                    static_cast<double>(num_rollouts)
                              : 0.0,
                 mrr,
                 result.rules.size(),
                 extra.size()};
    result.log.push_back(log);
    if (events)
      *events << "{\"epoch\":" << log.epoch << ",\"loss\":" << log.loss
              << ",\"success_rate\":" << log.success_rate << ",\"valid_mrr\":" << log.valid_mrr
              << ",\"rules\":" << log.rule_count << ",\"augmented\":" << log.augmented_facts
              << "}\n";
  }

  restore_values(params, best_values);
  if (result.best_valid_mrr < 0.0) result.best_valid_mrr = 0.0;
  return result;
}

}  // namespace mbe
