#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mbe {

class Tape;

namespace detail {
struct Node {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily on the backward pass
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;  // accumulates into parents' grads
  bool requires_grad = false;

  std::size_t size() const { return value.size(); }
  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};
}  // namespace detail

// Dense row-major 64-bit real tensor (1-D or 2-D). Value-like handle;
// copies share the underlying node. Every op checks its result for
// NaN/Inf and throws numeric_error.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double v);
  static Tensor from(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor scalar(double v) { return from({1}, {v}); }

  // Leaf with persistent gradient buffer (a parameter).
  static Tensor param(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const { return node_->shape; }
  std::size_t size() const { return node_->size(); }
  std::size_t rows() const { return node_->shape[0]; }
  std::size_t cols() const { return node_->shape.size() > 1 ? node_->shape[1] : 1; }
  bool defined() const { return node_ != nullptr; }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<double>& data() const { return node_->value; }
  std::vector<double>& mutable_data() { return node_->value; }
  const std::vector<double>& grad() const { return node_->grad; }
  double item() const;
  double at(std::size_t i) const { return node_->value[i]; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * cols() + c]; }

  void zero_grad() { node_->grad.assign(node_->size(), 0.0); }

  std::shared_ptr<detail::Node> node() const { return node_; }

 private:
  friend class Tape;
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;

  friend Tensor make_op(std::vector<std::size_t> shape, std::vector<double> value,
                        std::vector<Tensor> parents,
                        std::function<void(detail::Node&)> backward, const char* op_name);
};

// Reverse-mode tape. Ops created while a tape is active are recorded in
// creation order (a topological order); backward() replays them once in
// reverse. At most one tape is active per thread.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
  // recorded node (and parameter leaves). `loss` must be scalar.
  void backward(const Tensor& loss);

  std::size_t num_nodes() const { return nodes_.size(); }

  static Tape* active();

 private:
  friend Tensor make_op(std::vector<std::size_t>, std::vector<double>, std::vector<Tensor>,
                        std::function<void(detail::Node&)>, const char*);
  std::vector<std::shared_ptr<detail::Node>> nodes_;
  Tape* previous_ = nullptr;
};

// Disables recording within a scope (inference mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();

 private:
  bool prev_;
};

// ---- primitive ops ----
Tensor matmul(const Tensor& a, const Tensor& b);          // [m,k] x [k,n]
Tensor transpose(const Tensor& a);                        // [m,n] -> [n,m]
Tensor add(const Tensor& a, const Tensor& b);             // same shape
Tensor add_rowwise(const Tensor& m, const Tensor& bias);  // [r,c] + [c]
Tensor sub(const Tensor& a, const Tensor& b);
Tensor elementwise_mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor scale_rows(const Tensor& m, const std::vector<double>& w);  // constant row weights
Tensor tanh_t(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log_t(const Tensor& a);
Tensor softmax(const Tensor& v);  // 1-D
Tensor concat(const std::vector<Tensor>& vs);  // 1-D pieces
Tensor stack(const std::vector<Tensor>& rows);  // 1-D rows -> [n, d]
Tensor gather_rows(const Tensor& m, const std::vector<std::size_t>& idx);
// Sums rows of src[k,d] into out[num_rows,d] grouped by idx.
Tensor scatter_sum_rows(const Tensor& src, const std::vector<std::size_t>& idx,
                        std::size_t num_rows);
Tensor sum_rows(const Tensor& m);  // [r,c] -> [c]
Tensor sum_all(const Tensor& a);   // -> scalar
Tensor pick(const Tensor& v, std::size_t i);  // 1-D element -> scalar
Tensor row(const Tensor& m, std::size_t r);   // [r,c] -> [c]
Tensor reshape(const Tensor& a, std::vector<std::size_t> shape);
// W[m,n] * v[n] -> [m]
Tensor matvec(const Tensor& w, const Tensor& v);

}  // namespace mbe
