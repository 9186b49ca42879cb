#include "mbe/encoder.hpp"

#include <string>

#include "mbe/errors.hpp"

namespace mbe {

void encoder_init(ParamSet& params, const EncoderConfig& cfg, std::size_t num_relation_ids,
                  std::mt19937_64& rng) {
  if (cfg.dim == 0) throw numeric_error("encoder_init: dim must be positive");
  if (cfg.layers == 0) throw numeric_error("encoder_init: at least one conv layer");
  params.create("enc.z", xavier_init({num_relation_ids, cfg.dim}, rng));
  params.create("enc.base.w_in", xavier_init({cfg.dim, cfg.dim}, rng));
  params.create("enc.base.w_out", xavier_init({cfg.dim, cfg.dim}, rng));
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    std::string base = "enc.conv" + std::to_string(l) + ".";
    params.create(base + "w_in", xavier_init({cfg.dim, cfg.dim}, rng));
    params.create(base + "w_out", xavier_init({cfg.dim, cfg.dim}, rng));
    params.create(base + "w_self", xavier_init({cfg.dim, cfg.dim}, rng));
    params.create(base + "w_rel", xavier_init({cfg.dim, cfg.dim}, rng));
  }
}

namespace {

struct FactIndex {
  std::vector<std::size_t> heads, tails, relations;
};

FactIndex index_facts(const GraphSnapshot& snapshot) {
  FactIndex ix;
  ix.heads.reserve(snapshot.facts().size());
  ix.tails.reserve(snapshot.facts().size());
  ix.relations.reserve(snapshot.facts().size());
  for (const Fact& f : snapshot.facts()) {
    ix.heads.push_back(f.head);
    ix.tails.push_back(f.tail);
    ix.relations.push_back(f.relation);
  }
  return ix;
}

std::vector<double> fact_alphas(const FactIndex& ix, const AttentionTable& attn,
                                RelationId query_relation, std::size_t num_relation_ids) {
  std::vector<double> table = attn.alphas(query_relation, num_relation_ids);
  std::vector<double> out(ix.relations.size());
  for (std::size_t i = 0; i < ix.relations.size(); ++i)
    out[i] = table[ix.relations[i]];
  return out;
}

std::vector<double> inverse_degrees(const GraphSnapshot& snapshot) {
  std::vector<double> inv(snapshot.num_entities(), 1.0);
  for (std::size_t e = 0; e < inv.size(); ++e) {
    std::size_t d = snapshot.degree(static_cast<EntityId>(e));
    if (d > 1) inv[e] = 1.0 / static_cast<double>(d);
  }
  return inv;
}

void check_query_relation(const GraphSnapshot& snapshot, RelationId query_relation) {
  if (query_relation >= snapshot.vocab().num_relation_ids())
    throw data_error("unknown query relation id " + std::to_string(query_relation));
}

}  // namespace

Tensor base_embeddings(const GraphSnapshot& snapshot, const ParamSet& params,
                       const EncoderConfig& cfg, const AttentionTable& attn,
                       RelationId query_relation) {
  check_query_relation(snapshot, query_relation);
  const Tensor& z = params.get("enc.z");
  const Tensor& w_in = params.get("enc.base.w_in");
  const Tensor& w_out = params.get("enc.base.w_out");
  std::size_t num_entities = snapshot.num_entities();
  if (snapshot.facts().empty()) return Tensor::zeros({num_entities, cfg.dim});

  FactIndex ix = index_facts(snapshot);
  std::vector<double> alphas =
      fact_alphas(ix, attn, query_relation, snapshot.vocab().num_relation_ids());

  // [F, d] rows of alpha * z_r, shared by both directions.
  Tensor zf = scale_rows(gather_rows(z, ix.relations), alphas);
  Tensor in_sum = scatter_sum_rows(matmul(zf, transpose(w_in)), ix.tails, num_entities);
  Tensor out_sum = scatter_sum_rows(matmul(zf, transpose(w_out)), ix.heads, num_entities);
  Tensor agg = add(in_sum, out_sum);
  if (cfg.degree_normalize) agg = scale_rows(agg, inverse_degrees(snapshot));
  return tanh_t(agg);
}

Embeddings encode(const GraphSnapshot& snapshot, const ParamSet& params, const EncoderConfig& cfg,
                  const AttentionTable& attn, RelationId query_relation) {
  check_query_relation(snapshot, query_relation);
  Tensor u = base_embeddings(snapshot, params, cfg, attn, query_relation);
  Tensor rel = params.get("enc.z");
  std::size_t num_entities = snapshot.num_entities();

  FactIndex ix;
  std::vector<double> alphas;
  std::vector<double> inv_deg;
  if (!snapshot.facts().empty()) {
    ix = index_facts(snapshot);
    alphas = fact_alphas(ix, attn, query_relation, snapshot.vocab().num_relation_ids());
  }
  if (cfg.degree_normalize) inv_deg = inverse_degrees(snapshot);

  for (std::size_t l = 0; l < cfg.layers; ++l) {
    std::string base = "enc.conv" + std::to_string(l) + ".";
    const Tensor& w_in = params.get(base + "w_in");
    const Tensor& w_out = params.get(base + "w_out");
    const Tensor& w_self = params.get(base + "w_self");
    const Tensor& w_rel = params.get(base + "w_rel");

    Tensor agg = matmul(u, transpose(w_self));
    if (!snapshot.facts().empty()) {
      Tensor ur = gather_rows(rel, ix.relations);  // [F, d]
      // Message into the tail comes from the head, and vice versa.
      Tensor in_msg = scale_rows(elementwise_mul(gather_rows(u, ix.heads), ur), alphas);
      Tensor out_msg = scale_rows(elementwise_mul(gather_rows(u, ix.tails), ur), alphas);
      Tensor in_sum = scatter_sum_rows(matmul(in_msg, transpose(w_in)), ix.tails, num_entities);
      Tensor out_sum = scatter_sum_rows(matmul(out_msg, transpose(w_out)), ix.heads, num_entities);
      Tensor neigh = add(in_sum, out_sum);
      if (cfg.degree_normalize) neigh = scale_rows(neigh, inv_deg);
      agg = add(agg, neigh);
    }
    u = tanh_t(agg);
    rel = matmul(rel, transpose(w_rel));
  }
  return {u, rel};
}

const Embeddings& EncoderCache::get(const GraphSnapshot& snapshot, const ParamSet& params,
                                    const EncoderConfig& cfg, const AttentionTable& attn,
                                    RelationId query_relation) {
  std::uint64_t digest = snapshot.index_digest();
  auto it = entries_.find(query_relation);
  if (it != entries_.end() && it->second.snapshot_digest == digest &&
      it->second.params_version == params.version() && it->second.attn_version == attn.version())
    return it->second.value;
  NoGradGuard guard;
  Embeddings value = encode(snapshot, params, cfg, attn, query_relation);
  ++passes_;
  Entry entry{digest, params.version(), attn.version(), std::move(value)};
  auto [pos, ok] = entries_.insert_or_assign(query_relation, std::move(entry));
  return pos->second.value;
}

}  // namespace mbe
