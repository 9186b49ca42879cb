#include "mbe/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mbe/errors.hpp"

namespace mbe {

Tensor xavier_init(const std::vector<std::size_t>& shape, std::mt19937_64& rng) {
  if (shape.empty() || shape.size() > 2) throw numeric_error("xavier_init: 1-D or 2-D only");
  for (std::size_t d : shape)
    if (d == 0) throw numeric_error("xavier_init: zero dimension");
  std::size_t fan_in = shape.size() == 2 ? shape[1] : shape[0];
  std::size_t fan_out = shape[0];
  double stddev = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
  std::normal_distribution<double> dist(0.0, stddev);
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  std::vector<double> data(n);
  for (double& x : data) x = dist(rng);
  return Tensor::from(shape, std::move(data));
}

Tensor& ParamSet::create(const std::string& name, Tensor init) {
  if (params_.count(name)) throw numeric_error("parameter '" + name + "' already exists");
  Tensor p = Tensor::param(init.shape(), init.data());
  auto [it, ok] = params_.emplace(name, std::move(p));
  moments_[name] = {std::vector<double>(it->second.size(), 0.0),
                    std::vector<double>(it->second.size(), 0.0)};
  return it->second;
}

Tensor& ParamSet::get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw numeric_error("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamSet::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw numeric_error("unknown parameter '" + name + "'");
  return it->second;
}

void ParamSet::zero_grad() {
  for (auto& [name, p] : params_) p.zero_grad();
}

void ParamSet::adam_step(double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++step_;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
  for (auto& [name, p] : params_) {
    auto& mom = moments_[name];
    const auto& g = p.grad();
    if (g.size() != p.size()) throw numeric_error("adam_step: gradient missing for " + name);
    auto& value = p.mutable_data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (!std::isfinite(g[i])) throw numeric_error("adam_step: non-finite gradient in " + name);
      mom.m[i] = beta1 * mom.m[i] + (1.0 - beta1) * g[i];
      mom.v[i] = beta2 * mom.v[i] + (1.0 - beta2) * g[i] * g[i];
      double mhat = mom.m[i] / bc1;
      double vhat = mom.v[i] / bc2;
      value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
  ++version_;
}

std::size_t ParamSet::total_size() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.size();
  return n;
}

void lstm_init(ParamSet& params, const std::string& prefix, std::size_t layers,
               std::size_t input, std::size_t hidden, std::mt19937_64& rng) {
  for (std::size_t l = 0; l < layers; ++l) {
    std::size_t in_dim = l == 0 ? input : hidden;
    std::string base = prefix + ".l" + std::to_string(l) + ".";
    params.create(base + "w_ih", xavier_init({4 * hidden, in_dim}, rng));
    params.create(base + "w_hh", xavier_init({4 * hidden, hidden}, rng));
    params.create(base + "bias", Tensor::zeros({4 * hidden}));
  }
}

LstmState lstm_zero_state(std::size_t layers, std::size_t hidden) {
  LstmState s;
  for (std::size_t l = 0; l < layers; ++l) {
    s.h.push_back(Tensor::zeros({hidden}));
    s.c.push_back(Tensor::zeros({hidden}));
  }
  return s;
}

LstmState lstm_step(const ParamSet& params, const std::string& prefix, const LstmState& prev,
                    const Tensor& x) {
  if (prev.h.empty()) throw numeric_error("lstm_step: empty state");
  LstmState next;
  Tensor input = x;
  std::size_t hidden = prev.h[0].size();
  for (std::size_t l = 0; l < prev.h.size(); ++l) {
    std::string base = prefix + ".l" + std::to_string(l) + ".";
    const Tensor& w_ih = params.get(base + "w_ih");
    const Tensor& w_hh = params.get(base + "w_hh");
    const Tensor& bias = params.get(base + "bias");
    if (w_ih.cols() != input.size())
      throw numeric_error("lstm_step: input dimension mismatch at layer " + std::to_string(l));
    Tensor gates = add(add(matvec(w_ih, input), matvec(w_hh, prev.h[l])), bias);
    auto slice = [&](std::size_t k) {
      std::vector<std::size_t> idx;  // rows of the [4H,1] view
      Tensor g2 = reshape(gates, {4 * hidden, 1});
      idx.reserve(hidden);
      for (std::size_t i = 0; i < hidden; ++i) idx.push_back(k * hidden + i);
      return reshape(gather_rows(g2, idx), {hidden});
    };
    Tensor i_g = sigmoid(slice(0));
    Tensor f_g = sigmoid(slice(1));
    Tensor g_g = tanh_t(slice(2));
    Tensor o_g = sigmoid(slice(3));
    Tensor c = add(elementwise_mul(f_g, prev.c[l]), elementwise_mul(i_g, g_g));
    Tensor h = elementwise_mul(o_g, tanh_t(c));
    next.c.push_back(c);
    next.h.push_back(h);
    input = h;
  }
  return next;
}

namespace {

constexpr char kMagic[8] = {'M', 'B', 'E', 'C', 'K', 'P', 'T', '1'};

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw data_error("checkpoint: truncated file");
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  auto n = read_pod<std::uint64_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw data_error("checkpoint: truncated file");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params,
                     const std::string& metadata) {
  // Payload first, so the header can carry its checksum.
  std::ostringstream payload(std::ios::binary);
  write_string(payload, metadata);
  write_pod<std::uint64_t>(payload, params.all().size());
  for (const auto& [name, p] : params.all()) {
    write_string(payload, name);
    write_pod<std::uint32_t>(payload, static_cast<std::uint32_t>(p.shape().size()));
    for (std::size_t d : p.shape()) write_pod<std::uint64_t>(payload, d);
    payload.write(reinterpret_cast<const char*>(p.data().data()),
                  static_cast<std::streamsize>(p.size() * sizeof(double)));
  }
  std::string body = payload.str();
  std::uint64_t checksum = fnv1a(body.data(), body.size());

  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint64_t>(out, checksum);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw data_error("checkpoint: bad magic in " + path.string());
  auto checksum = read_pod<std::uint64_t>(in);
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (fnv1a(body.data(), body.size()) != checksum)
    throw data_error("checkpoint: checksum mismatch in " + path.string());

  std::istringstream ps(body, std::ios::binary);
  Checkpoint ckpt;
  ckpt.content_hash = checksum;
  ckpt.metadata = read_string(ps);
  auto count = read_pod<std::uint64_t>(ps);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = read_string(ps);
    auto ndims = read_pod<std::uint32_t>(ps);
    std::vector<std::size_t> shape;
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < ndims; ++d) {
      shape.push_back(static_cast<std::size_t>(read_pod<std::uint64_t>(ps)));
      n *= shape.back();
    }
    std::vector<double> data(n);
    ps.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!ps) throw data_error("checkpoint: truncated tensor data");
    ckpt.params.create(name, Tensor::from(shape, std::move(data)));
  }
  return ckpt;
}

}  // namespace mbe
