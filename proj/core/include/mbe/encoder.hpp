#pragma once

#include <cstdint>
#include <map>
#include <random>

#include "mbe/attention.hpp"
#include "mbe/graph.hpp"
#include "mbe/nn.hpp"

namespace mbe {

// Relational graph convolution settings. Entity embeddings are derived
// solely from linked relation embeddings, so the encoder has no
// per-entity parameters and handles unseen entities by construction.
struct EncoderConfig {
  std::size_t dim = 100;
  std::size_t layers = 3;
  // Optional 1/degree averaging of the aggregation sums. The update
  // equations have no normalization, so this is off by default.
  bool degree_normalize = false;
};

// Creates "enc.z" (one row per relation id, including inverses, the
// self-loop and the start relation) plus the base-layer and per-layer
// convolution matrices.
void encoder_init(ParamSet& params, const EncoderConfig& cfg, std::size_t num_relation_ids,
                  std::mt19937_64& rng);

struct Embeddings {
  Tensor entities;   // [num_entities, d], row = entity id
  Tensor relations;  // [num_relation_ids, d], final-layer relation table
};

// Base layer: u_e = tanh( sum_in alpha * W_in z_r + sum_out alpha * W_out z_r )
// over stored-fact incidences (duplicates counted; derived self-loop and
// inverse edges contribute nothing). Rows for entities without any
// incidence are tanh(0) = 0.
Tensor base_embeddings(const GraphSnapshot& snapshot, const ParamSet& params,
                       const EncoderConfig& cfg, const AttentionTable& attn,
                       RelationId query_relation);

// Full pass: base layer, then `layers` convolutions
//   u_e' = tanh( W_self u_e + sum_in alpha * W_in (u_head o u_r)
//                           + sum_out alpha * W_out (u_tail o u_r) )
//   u_r' = W_rel u_r        (whole relation table)
// returning the last layer's entity and relation embeddings.
Embeddings encode(const GraphSnapshot& snapshot, const ParamSet& params, const EncoderConfig& cfg,
                  const AttentionTable& attn, RelationId query_relation);

// Per-query-relation embedding cache. Entries are keyed by query relation
// and invalidated when the snapshot, the parameters, or the attention
// table change. Encoded under NoGradGuard; training re-encodes on tape.
class EncoderCache {
 public:
  const Embeddings& get(const GraphSnapshot& snapshot, const ParamSet& params,
                        const EncoderConfig& cfg, const AttentionTable& attn,
                        RelationId query_relation);

  std::size_t passes() const { return passes_; }
  void clear() { entries_.clear(); }

 private:
  struct Entry {
    std::uint64_t snapshot_digest;
    std::uint64_t params_version;
    std::uint64_t attn_version;
    Embeddings value;
  };
  std::map<RelationId, Entry> entries_;
  std::size_t passes_ = 0;
};

}  // namespace mbe
