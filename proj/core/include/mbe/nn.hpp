#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mbe/tensor.hpp"

namespace mbe {

// normal(0, 2/(fan_in+fan_out)); seeded and reproducible.
Tensor xavier_init(const std::vector<std::size_t>& shape, std::mt19937_64& rng);

// Named parameter tensors with per-parameter Adam state. Shapes are fixed
// after creation; names are unique.
class ParamSet {
 public:
  Tensor& create(const std::string& name, Tensor init);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const { return params_.count(name) != 0; }

  const std::map<std::string, Tensor>& all() const { return params_; }
  void zero_grad();

  // Adam with beta1=0.9, beta2=0.999, eps=1e-8, applied to accumulated
  // gradients. Bumps the version counter.
  void adam_step(double lr);

  // Bumped by every adam_step; lets caches detect stale embeddings.
  std::uint64_t version() const { return version_; }

  std::size_t total_size() const;

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  std::map<std::string, Tensor> params_;  // ordered: deterministic iteration
  std::map<std::string, Moments> moments_;
  std::uint64_t step_ = 0;
  std::uint64_t version_ = 0;
};

// Hidden state of the stacked LSTM history encoder.
struct LstmState {
  std::vector<Tensor> h, c;  // one per layer
};

// Creates parameters "<prefix>.l<i>.w_ih|w_hh|bias" for `layers` stacked
// cells of hidden size `hidden` over inputs of size `input`.
void lstm_init(ParamSet& params, const std::string& prefix, std::size_t layers,
               std::size_t input, std::size_t hidden, std::mt19937_64& rng);
LstmState lstm_zero_state(std::size_t layers, std::size_t hidden);
// One step through the stack; returns the new state. The output is the
// last layer's h.
LstmState lstm_step(const ParamSet& params, const std::string& prefix, const LstmState& prev,
                    const Tensor& x);

// Single-file binary checkpoint: magic, version, metadata string (JSON),
// name table with shapes, raw little-endian doubles, FNV checksum.
void save_checkpoint(const std::filesystem::path& path, const ParamSet& params,
                     const std::string& metadata);
struct Checkpoint {
  ParamSet params;
  std::string metadata;
  std::uint64_t content_hash = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mbe
