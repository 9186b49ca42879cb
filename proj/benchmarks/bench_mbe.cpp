// Microbenchmarks for the hot paths: adjacency expansion, the encoder
// forward pass, sampled rollouts and beam search. All run on the planted
// synthetic graph so the numbers are comparable across machines.
#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "mbe/beam.hpp"
#include "mbe/eval.hpp"
#include "support/planted.hpp"

using namespace mbe;

namespace {

struct Fixture {
  MbeDataset ds;
  GraphSnapshot graph;
  ParamSet params;
  EncoderConfig cfg;
  Embeddings emb;

  explicit Fixture(std::size_t dim) : ds(testing::make_planted({})), graph(make_graph()) {
    cfg = EncoderConfig{.dim = dim, .layers = 2};
    std::mt19937_64 rng(1);
    encoder_init(params, cfg, ds.vocab->num_relation_ids(), rng);
    policy_init(params, dim, 1, rng);
    NoGradGuard guard;
    emb = encode(graph, params, cfg, AttentionTable(), 0);
  }

 private:
  GraphSnapshot make_graph() { return ds.snapshot_through_batch(ds.num_batches()); }
};

Fixture& fixture(std::size_t dim) {
  static std::map<std::size_t, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[dim];
  if (!slot) slot = std::make_unique<Fixture>(dim);
  return *slot;
}

void BM_ActionSpace(benchmark::State& state) {
  Fixture& f = fixture(16);
  std::vector<EntityId> ents = f.graph.entities();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.graph.action_space(ents[i]));
    i = (i + 1) % ents.size();
  }
}
BENCHMARK(BM_ActionSpace);

void BM_EncoderForward(benchmark::State& state) {
  Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  NoGradGuard guard;
  AttentionTable attn;
  for (auto _ : state)
    benchmark::DoNotOptimize(encode(f.graph, f.params, f.cfg, attn, 0));
}
BENCHMARK(BM_EncoderForward)->Arg(16)->Arg(64);

void BM_Rollout(benchmark::State& state) {
  Fixture& f = fixture(16);
  NoGradGuard guard;
  std::mt19937_64 rng(7);
  Query q{f.ds.train.front().head, f.ds.train.front().relation, f.ds.train.front().tail};
  RolloutOptions opts{.max_steps = 3, .mask_gold = true, .action_dropout = 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(rollout(f.graph, f.params, f.emb, q, opts, rng));
}
BENCHMARK(BM_Rollout);

void BM_BeamSearch(benchmark::State& state) {
  Fixture& f = fixture(16);
  NoGradGuard guard;
  Query q{f.ds.train.front().head, f.ds.train.front().relation, std::nullopt};
  std::size_t width = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(beam_answer(f.graph, f.params, f.emb, q, width, 3));
}
BENCHMARK(BM_BeamSearch)->Arg(8)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
