#include "mbe/tensor.hpp"

#include <cmath>
#include <numeric>

#include "mbe/errors.hpp"

namespace mbe {

namespace {
thread_local Tape* g_active_tape = nullptr;
thread_local bool g_grad_enabled = true;

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

void check_finite(const std::vector<double>& v, const char* op) {
  for (double x : v)
    if (!std::isfinite(x))
      throw numeric_error(std::string("non-finite value produced by op '") + op + "'");
}

std::string shape_str(const Tensor& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.shape().size(); ++i)
    s += (i ? "," : "") + std::to_string(t.shape()[i]);
  return s + "]";
}

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw numeric_error(std::string("shape mismatch in op '") + op + "': " + shape_str(a) + " vs " +
                      shape_str(b));
}

}  // namespace

Tensor make_op(std::vector<std::size_t> shape, std::vector<double> value,
               std::vector<Tensor> parents, std::function<void(detail::Node&)> backward,
               const char* op_name) {
  check_finite(value, op_name);
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs = false;
  for (const Tensor& p : parents)
    if (p.node()->requires_grad) needs = true;
  needs = needs && g_grad_enabled && g_active_tape != nullptr;
  node->requires_grad = needs;
  if (needs) {
    node->parents.reserve(parents.size());
    for (const Tensor& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(backward);
    g_active_tape->nodes_.push_back(node);
  }
  return Tensor(node);
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::vector<double> v(shape_size(shape), 0.0);
  return from(std::move(shape), std::move(v));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double x) {
  std::vector<double> v(shape_size(shape), x);
  return from(std::move(shape), std::move(v));
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> data) {
  if (shape.empty() || shape.size() > 2) throw numeric_error("tensors are 1-D or 2-D");
  if (shape_size(shape) != data.size()) throw numeric_error("data length != product of shape");
  check_finite(data, "from");
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  return Tensor(std::move(node));
}

Tensor Tensor::param(std::vector<std::size_t> shape, std::vector<double> data) {
  Tensor t = from(std::move(shape), std::move(data));
  t.node_->requires_grad = true;
  t.node_->ensure_grad();
  return t;
}

double Tensor::item() const {
  if (size() != 1) throw numeric_error("item() on non-scalar tensor");
  return node_->value[0];
}

Tape::Tape() {
  previous_ = g_active_tape;
  g_active_tape = this;
}

Tape::~Tape() { g_active_tape = previous_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1) throw numeric_error("backward: loss must be scalar");
  if (!loss.node()->requires_grad) return;  // nothing recorded depends on parameters
  loss.node()->ensure_grad();
  loss.node()->grad[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    detail::Node& n = **it;
    if (n.grad.empty()) continue;  // not on any path to the loss
    for (auto& p : n.parents) p->ensure_grad();
    if (n.backward) n.backward(n);
  }
}

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

// ---- ops ----

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.cols() != b.rows())
    shape_fail("matmul", a, b);
  std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const auto& av = a.data();
  const auto& bv = b.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      double x = av[i * k + p];
      if (x == 0.0) continue;
      const double* brow = &bv[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += x * brow[j];
    }
  return make_op({m, n}, std::move(out), {a, b},
                 [m, k, n](detail::Node& node) {
                   auto& A = *node.parents[0];
                   auto& B = *node.parents[1];
                   // dA = dC * B^T ; dB = A^T * dC
                   for (std::size_t i = 0; i < m; ++i)
                     for (std::size_t p = 0; p < k; ++p) {
                       double acc = 0.0;
                       for (std::size_t j = 0; j < n; ++j)
                         acc += node.grad[i * n + j] * B.value[p * n + j];
                       A.grad[i * k + p] += acc;
                     }
                   for (std::size_t p = 0; p < k; ++p)
                     for (std::size_t j = 0; j < n; ++j) {
                       double acc = 0.0;
                       for (std::size_t i = 0; i < m; ++i)
                         acc += A.value[i * k + p] * node.grad[i * n + j];
                       B.grad[p * n + j] += acc;
                     }
                 },
                 "matmul");
}

Tensor transpose(const Tensor& a) {
  if (a.shape().size() != 2) throw numeric_error("transpose: 2-D only");
  std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.data()[i * n + j];
  return make_op({n, m}, std::move(out), {a},
                 [m, n](detail::Node& node) {
                   auto& A = *node.parents[0];
                   for (std::size_t i = 0; i < m; ++i)
                     for (std::size_t j = 0; j < n; ++j)
                       A.grad[i * n + j] += node.grad[j * m + i];
                 },
                 "transpose");
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_fail("add", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_op(a.shape(), std::move(out), {a, b},
                 [](detail::Node& node) {
                   for (std::size_t i = 0; i < node.grad.size(); ++i) {
                     node.parents[0]->grad[i] += node.grad[i];
                     node.parents[1]->grad[i] += node.grad[i];
                   }
                 },
                 "add");
}

Tensor add_rowwise(const Tensor& m, const Tensor& bias) {
  if (m.shape().size() != 2 || bias.shape().size() != 1 || m.cols() != bias.size())
    shape_fail("add_rowwise", m, bias);
  std::size_t r = m.rows(), c = m.cols();
  std::vector<double> out(m.data());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] += bias.data()[j];
  return make_op({r, c}, std::move(out), {m, bias},
                 [r, c](detail::Node& node) {
                   for (std::size_t i = 0; i < r; ++i)
                     for (std::size_t j = 0; j < c; ++j) {
                       node.parents[0]->grad[i * c + j] += node.grad[i * c + j];
                       node.parents[1]->grad[j] += node.grad[i * c + j];
                     }
                 },
                 "add_rowwise");
}

Tensor sub(const Tensor& a, const Tensor& b) { return add(a, scale(b, -1.0)); }

Tensor elementwise_mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_fail("elementwise_mul", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_op(a.shape(), std::move(out), {a, b},
                 [](detail::Node& node) {
                   auto& A = *node.parents[0];
                   auto& B = *node.parents[1];
                   for (std::size_t i = 0; i < node.grad.size(); ++i) {
                     A.grad[i] += node.grad[i] * B.value[i];
                     B.grad[i] += node.grad[i] * A.value[i];
                   }
                 },
                 "elementwise_mul");
}

Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * s;
  return make_op(a.shape(), std::move(out), {a},
                 [s](detail::Node& node) {
                   for (std::size_t i = 0; i < node.grad.size(); ++i)
                     node.parents[0]->grad[i] += node.grad[i] * s;
                 },
                 "scale");
}

Tensor scale_rows(const Tensor& m, const std::vector<double>& w) {
  if (m.shape().size() != 2 || m.rows() != w.size())
    throw numeric_error("scale_rows: weight count != row count");
  std::size_t r = m.rows(), c = m.cols();
  std::vector<double> out(m.data());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] *= w[i];
  return make_op({r, c}, std::move(out), {m},
                 [w, r, c](detail::Node& node) {
                   for (std::size_t i = 0; i < r; ++i)
                     for (std::size_t j = 0; j < c; ++j)
                       node.parents[0]->grad[i * c + j] += node.grad[i * c + j] * w[i];
                 },
                 "scale_rows");
}

namespace {
template <typename F, typename DF>
Tensor unary(const Tensor& a, F f, DF df, const char* name) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a.data()[i]);
  return make_op(a.shape(), std::move(out), {a},
                 [df](detail::Node& node) {
                   auto& A = *node.parents[0];
                   for (std::size_t i = 0; i < node.grad.size(); ++i)
                     A.grad[i] += node.grad[i] * df(A.value[i], node.value[i]);
                 },
                 name);
}
}  // namespace

Tensor tanh_t(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; }, "tanh");
}

Tensor relu(const Tensor& a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; }, "relu");
}

Tensor sigmoid(const Tensor& a) {
  return unary(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
               [](double, double y) { return y * (1.0 - y); }, "sigmoid");
}

Tensor log_t(const Tensor& a) {
  return unary(a, [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; }, "log");
}

Tensor softmax(const Tensor& v) {
  if (v.shape().size() != 1) throw numeric_error("softmax: 1-D only");
  double mx = v.data()[0];
  for (double x : v.data()) mx = std::max(mx, x);
  std::vector<double> out(v.size());
  double z = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(v.data()[i] - mx);
    z += out[i];
  }
  for (double& x : out) x /= z;
  return make_op(v.shape(), std::move(out), {v},
                 [](detail::Node& node) {
                   double dot = 0.0;
                   for (std::size_t i = 0; i < node.grad.size(); ++i)
                     dot += node.grad[i] * node.value[i];
                   for (std::size_t i = 0; i < node.grad.size(); ++i)
                     node.parents[0]->grad[i] += node.value[i] * (node.grad[i] - dot);
                 },
                 "softmax");
}

Tensor concat(const std::vector<Tensor>& vs) {
  std::size_t total = 0;
  for (const Tensor& v : vs) {
    if (v.shape().size() != 1) throw numeric_error("concat: 1-D pieces only");
    total += v.size();
  }
  std::vector<double> out;
  out.reserve(total);
  for (const Tensor& v : vs) out.insert(out.end(), v.data().begin(), v.data().end());
  return make_op({total}, std::move(out), vs,
                 [](detail::Node& node) {
                   std::size_t off = 0;
                   for (auto& p : node.parents) {
                     for (std::size_t i = 0; i < p->value.size(); ++i)
                       p->grad[i] += node.grad[off + i];
                     off += p->value.size();
                   }
                 },
                 "concat");
}

Tensor stack(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw numeric_error("stack: no rows");
  std::size_t c = rows[0].size();
  std::vector<double> out;
  out.reserve(rows.size() * c);
  for (const Tensor& r : rows) {
    if (r.shape().size() != 1 || r.size() != c) throw numeric_error("stack: ragged rows");
    out.insert(out.end(), r.data().begin(), r.data().end());
  }
  return make_op({rows.size(), c}, std::move(out), rows,
                 [c](detail::Node& node) {
                   for (std::size_t i = 0; i < node.parents.size(); ++i)
                     for (std::size_t j = 0; j < c; ++j)
                       node.parents[i]->grad[j] += node.grad[i * c + j];
                 },
                 "stack");
}

Tensor gather_rows(const Tensor& m, const std::vector<std::size_t>& idx) {
  if (m.shape().size() != 2) throw numeric_error("gather_rows: 2-D only");
  std::size_t c = m.cols();
  std::vector<double> out(idx.size() * c);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= m.rows()) throw numeric_error("gather_rows: index out of range");
    std::copy_n(&m.data()[idx[i] * c], c, &out[i * c]);
  }
  return make_op({idx.size(), c}, std::move(out), {m},
                 [idx, c](detail::Node& node) {
                   for (std::size_t i = 0; i < idx.size(); ++i)
                     for (std::size_t j = 0; j < c; ++j)
                       node.parents[0]->grad[idx[i] * c + j] += node.grad[i * c + j];
                 },
                 "gather_rows");
}

Tensor scatter_sum_rows(const Tensor& src, const std::vector<std::size_t>& idx,
                        std::size_t num_rows) {
  if (src.shape().size() != 2 || src.rows() != idx.size())
    throw numeric_error("scatter_sum_rows: index count != row count");
  std::size_t c = src.cols();
  std::vector<double> out(num_rows * c, 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= num_rows) throw numeric_error("scatter_sum_rows: index out of range");
    for (std::size_t j = 0; j < c; ++j) out[idx[i] * c + j] += src.data()[i * c + j];
  }
  return make_op({num_rows, c}, std::move(out), {src},
                 [idx, c](detail::Node& node) {
                   for (std::size_t i = 0; i < idx.size(); ++i)
                     for (std::size_t j = 0; j < c; ++j)
                       node.parents[0]->grad[i * c + j] += node.grad[idx[i] * c + j];
                 },
                 "scatter_sum_rows");
}

Tensor sum_rows(const Tensor& m) {
  if (m.shape().size() != 2) throw numeric_error("sum_rows: 2-D only");
  std::size_t r = m.rows(), c = m.cols();
  std::vector<double> out(c, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += m.data()[i * c + j];
  return make_op({c}, std::move(out), {m},
                 [r, c](detail::Node& node) {
                   for (std::size_t i = 0; i < r; ++i)
                     for (std::size_t j = 0; j < c; ++j)
                       node.parents[0]->grad[i * c + j] += node.grad[j];
                 },
                 "sum_rows");
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  return make_op({1}, {s}, {a},
                 [](detail::Node& node) {
                   for (double& g : node.parents[0]->grad) g += node.grad[0];
                 },
                 "sum_all");
}

Tensor pick(const Tensor& v, std::size_t i) {
  if (v.shape().size() != 1 || i >= v.size()) throw numeric_error("pick: index out of range");
  return make_op({1}, {v.data()[i]}, {v},
                 [i](detail::Node& node) { node.parents[0]->grad[i] += node.grad[0]; },
                 "pick");
}

Tensor row(const Tensor& m, std::size_t r) {
  if (m.shape().size() != 2 || r >= m.rows()) throw numeric_error("row: index out of range");
  std::size_t c = m.cols();
  std::vector<double> out(m.data().begin() + r * c, m.data().begin() + (r + 1) * c);
  return make_op({c}, std::move(out), {m},
                 [r, c](detail::Node& node) {
                   for (std::size_t j = 0; j < c; ++j)
                     node.parents[0]->grad[r * c + j] += node.grad[j];
                 },
                 "row");
}

Tensor reshape(const Tensor& a, std::vector<std::size_t> shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  if (n != a.size() || shape.empty() || shape.size() > 2)
    throw numeric_error("reshape: incompatible shape");
  return make_op(std::move(shape), a.data(), {a},
                 [](detail::Node& node) {
                   for (std::size_t i = 0; i < node.grad.size(); ++i)
                     node.parents[0]->grad[i] += node.grad[i];
                 },
                 "reshape");
}

Tensor matvec(const Tensor& w, const Tensor& v) {
  if (v.shape().size() != 1) throw numeric_error("matvec: vector must be 1-D");
  return reshape(matmul(w, reshape(v, {v.size(), 1})), {w.rows()});
}

}  // namespace mbe
