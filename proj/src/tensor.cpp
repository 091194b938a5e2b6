#include "matsf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "matsf/error.hpp"
#include "matsf/kernels.hpp"

namespace matsf {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty means "absent"
  bool requires_grad = false;
  std::string name;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  std::vector<double>& grad_buffer() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

struct TensorAccess {
  static const NodePtr& node(const Tensor& t) {
    if (!t.node_) throw ContractError("operation on an empty tensor handle");
    return t.node_;
  }
  static Tensor wrap(NodePtr n) { return Tensor(std::move(n)); }
};

namespace {

thread_local bool g_grad_enabled = true;

constexpr std::int64_t kElementwiseParallel = 1 << 16;

NodePtr new_node(Shape shape, std::vector<double> values, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  n->requires_grad = requires_grad;
  return n;
}

/// Builds an op result; records history only when some input needs it.
Tensor make_result(Shape shape, std::vector<double> values, std::vector<NodePtr> parents,
                   std::function<void(Node&)> backward_fn) {
  bool needs = false;
  if (g_grad_enabled) {
    for (const auto& p : parents) needs = needs || p->requires_grad;
  }
  auto n = new_node(std::move(shape), std::move(values), needs);
  if (needs) {
    n->parents = std::move(parents);
    n->backward_fn = std::move(backward_fn);
  }
  return TensorAccess::wrap(std::move(n));
}

const NodePtr& node_of(const Tensor& t) { return TensorAccess::node(t); }

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got shape " +
                         to_string(t.shape()));
  }
}

enum class Broadcast { Same, Rows };

Broadcast broadcast_mode(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::Same;
  if (a.rank() == 2 && b.rank() == 1 && b.dim(0) == a.dim(1)) return Broadcast::Rows;
  throw DimensionError(std::string(op) + ": incompatible shapes " + to_string(a.shape()) +
                       " and " + to_string(b.shape()));
}

template <typename F>
std::vector<double> map_values(std::span<const double> x, F f) {
  std::vector<double> out(x.size());
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (n > kElementwiseParallel)
  for (std::int64_t i = 0; i < n; ++i) out[i] = f(x[i]);
  return out;
}

double stable_sigmoid(double x) {
  double y;
  if (x >= 0.0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  // Keep the result strictly inside (0, 1) even where it rounds to an endpoint.
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(y, lo, hi);
}

/// Unary op whose derivative is a function of (input, output).
template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& a, Fwd fwd, Deriv deriv) {
  const NodePtr& pa = node_of(a);
  auto out = map_values(pa->value, fwd);
  return make_result(pa->shape, std::move(out), {pa}, [deriv](Node& self) {
    Node& in = *self.parents[0];
    if (!in.requires_grad) return;
    auto& g = in.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] += self.grad[i] * deriv(in.value[i], self.value[i]);
  });
}

/// Binary elementwise op with optional row broadcast of b. `da`/`db` give the
/// partial derivatives as functions of (a_i, b_j).
template <typename Fwd, typename Da, typename Db>
Tensor binary(const Tensor& a, const Tensor& b, const char* op, Fwd fwd, Da da, Db db) {
  const auto mode = broadcast_mode(a, b, op);
  const NodePtr& pa = node_of(a);
  const NodePtr& pb = node_of(b);
  const std::size_t n = pa->value.size();
  const std::size_t cols = mode == Broadcast::Rows ? pb->value.size() : n;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(pa->value[i], pb->value[i % cols]);
  return make_result(pa->shape, std::move(out), {pa, pb}, [da, db, cols](Node& self) {
    Node& na = *self.parents[0];
    Node& nb = *self.parents[1];
    const std::size_t n = self.grad.size();
    if (na.requires_grad) {
      auto& g = na.grad_buffer();
      for (std::size_t i = 0; i < n; ++i)
        g[i] += self.grad[i] * da(na.value[i], nb.value[i % cols]);
    }
    if (nb.requires_grad) {
      auto& g = nb.grad_buffer();
      for (std::size_t i = 0; i < n; ++i)
        g[i % cols] += self.grad[i] * db(na.value[i], nb.value[i % cols]);
    }
  });
}

}  // namespace

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

// ---- Tensor -----------------------------------------------------------------

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = element_count(shape);
  return Tensor(new_node(std::move(shape), std::vector<double>(n, value), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (element_count(shape) != values.size()) {
    throw DimensionError("shape " + to_string(shape) + " needs " +
                         std::to_string(element_count(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  return Tensor(new_node(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(new_node({}, {value}, requires_grad));
}

const Shape& Tensor::shape() const { return node_of(*this)->shape; }
std::size_t Tensor::size() const { return node_of(*this)->value.size(); }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         to_string(s));
  }
  return s[axis];
}

std::span<const double> Tensor::values() const { return node_of(*this)->value; }

std::span<double> Tensor::mutable_values() {
  if (!is_leaf()) throw ContractError("mutable_values() on a non-leaf tensor");
  return node_of(*this)->value;
}

double Tensor::item() const {
  if (size() != 1) {
    throw ContractError("item() on a tensor of shape " + to_string(shape()));
  }
  return values()[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  require_rank2(*this, "at");
  return values()[r * dim(1) + c];
}

bool Tensor::has_grad() const { return !node_of(*this)->grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!has_grad()) {
    throw ContractError("tensor '" + name() + "' has no gradient");
  }
  return node_of(*this)->grad;
}

std::span<double> Tensor::mutable_grad() { return node_of(*this)->grad_buffer(); }

void Tensor::zero_grad() {
  auto& n = *node_of(*this);
  n.grad.assign(n.value.size(), 0.0);
}

void Tensor::clear_grad() { node_of(*this)->grad.clear(); }

bool Tensor::requires_grad() const { return node_of(*this)->requires_grad; }
void Tensor::set_requires_grad(bool on) { node_of(*this)->requires_grad = on; }
bool Tensor::is_leaf() const { return !node_of(*this)->backward_fn; }

const std::string& Tensor::name() const { return node_of(*this)->name; }

Tensor& Tensor::set_name(std::string name) {
  node_of(*this)->name = std::move(name);
  return *this;
}

Tensor Tensor::detach() const {
  const auto& n = node_of(*this);
  return Tensor(new_node(n->shape, n->value, false));
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

// ---- linear algebra ---------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner extents differ, " + to_string(a.shape()) + " · " +
                         to_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  kernels::gemm_nn(m, n, k, a.values(), b.values(), out);
  return make_result({m, n}, std::move(out), {node_of(a), node_of(b)},
                     [m, n, k](Node& self) {
                       Node& na = *self.parents[0];
                       Node& nb = *self.parents[1];
                       if (na.requires_grad)
                         kernels::gemm_nt(m, k, n, self.grad, nb.value, na.grad_buffer());
                       if (nb.requires_grad)
                         kernels::gemm_tn(k, n, m, na.value, self.grad, nb.grad_buffer());
                     });
}

Tensor matmul_transposed(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_transposed");
  require_rank2(b, "matmul_transposed");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k) {
    throw DimensionError("matmul_transposed: inner extents differ, " + to_string(a.shape()) +
                         " · " + to_string(b.shape()) + "ᵀ");
  }
  std::vector<double> out(m * n, 0.0);
  kernels::gemm_nt(m, n, k, a.values(), b.values(), out);
  return make_result({m, n}, std::move(out), {node_of(a), node_of(b)},
                     [m, n, k](Node& self) {
                       Node& na = *self.parents[0];
                       Node& nb = *self.parents[1];
                       if (na.requires_grad)
                         kernels::gemm_nn(m, k, n, self.grad, nb.value, na.grad_buffer());
                       if (nb.requires_grad)
                         kernels::gemm_tn(n, k, m, self.grad, na.value, nb.grad_buffer());
                     });
}

// ---- elementwise ------------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor neg(const Tensor& a) {
  return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return unary(a, [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Tensor square(const Tensor& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor log(const Tensor& a) {
  for (double x : a.values()) {
    if (!(x > 0.0)) {
      throw DomainError("log: non-positive input " + std::to_string(x));
    }
  }
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor clamped_log(const Tensor& a, double floor) {
  return unary(
      a, [floor](double x) { return std::log(std::max(x, floor)); },
      [floor](double x, double) { return x > floor ? 1.0 / x : 0.0; });
}

// ---- reductions -------------------------------------------------------------

Tensor sum(const Tensor& a) {
  const NodePtr& pa = node_of(a);
  double s = 0.0;
  for (double x : pa->value) s += x;
  return make_result({}, {s}, {pa}, [](Node& self) {
    Node& in = *self.parents[0];
    if (!in.requires_grad) return;
    for (double& g : in.grad_buffer()) g += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw ContractError("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

// ---- structural -------------------------------------------------------------

namespace {

struct AxisLayout {
  std::size_t outer = 1;
  std::size_t inner = 1;
};

AxisLayout layout_around(const Shape& shape, std::size_t axis) {
  AxisLayout l;
  for (std::size_t i = 0; i < axis; ++i) l.outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) l.inner *= shape[i];
  return l;
}

}  // namespace

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ContractError("concat of zero tensors");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) {
    throw DimensionError("concat: axis " + std::to_string(axis) + " out of range for " +
                         to_string(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> extents;
  std::vector<NodePtr> nodes;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) ok = i == axis || s[i] == first[i];
    if (!ok) {
      throw DimensionError("concat: " + to_string(s) + " disagrees with " + to_string(first) +
                           " off axis " + std::to_string(axis));
    }
    extents.push_back(s[axis]);
    out_shape[axis] += s[axis];
    nodes.push_back(node_of(p));
  }
  const auto lay = layout_around(first, axis);
  const std::size_t row = out_shape[axis] * lay.inner;
  std::vector<double> out(element_count(out_shape));
  std::size_t offset = 0;
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    const std::size_t block = extents[p] * lay.inner;
    for (std::size_t o = 0; o < lay.outer; ++o) {
      std::copy_n(nodes[p]->value.begin() + o * block, block, out.begin() + o * row + offset);
    }
    offset += block;
  }
  return make_result(std::move(out_shape), std::move(out), std::move(nodes),
                     [extents, lay, row](Node& self) {
                       std::size_t offset = 0;
                       for (std::size_t p = 0; p < self.parents.size(); ++p) {
                         Node& in = *self.parents[p];
                         const std::size_t block = extents[p] * lay.inner;
                         if (in.requires_grad) {
                           auto& g = in.grad_buffer();
                           for (std::size_t o = 0; o < lay.outer; ++o)
                             for (std::size_t i = 0; i < block; ++i)
                               g[o * block + i] += self.grad[o * row + offset + i];
                         }
                         offset += block;
                       }
                     });
}

Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Shape& s = a.shape();
  if (axis >= s.size() || begin > end || end > s[axis]) {
    throw DimensionError("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") on axis " + std::to_string(axis) + " of " + to_string(s));
  }
  const auto lay = layout_around(s, axis);
  const std::size_t row = s[axis] * lay.inner;
  const std::size_t block = (end - begin) * lay.inner;
  const std::size_t offset = begin * lay.inner;
  Shape out_shape = s;
  out_shape[axis] = end - begin;
  const NodePtr& pa = node_of(a);
  std::vector<double> out(lay.outer * block);
  for (std::size_t o = 0; o < lay.outer; ++o)
    std::copy_n(pa->value.begin() + o * row + offset, block, out.begin() + o * block);
  return make_result(std::move(out_shape), std::move(out), {pa},
                     [lay, row, block, offset](Node& self) {
                       Node& in = *self.parents[0];
                       if (!in.requires_grad) return;
                       auto& g = in.grad_buffer();
                       for (std::size_t o = 0; o < lay.outer; ++o)
                         for (std::size_t i = 0; i < block; ++i)
                           g[o * row + offset + i] += self.grad[o * block + i];
                     });
}

std::vector<Tensor> split(const Tensor& a, std::size_t axis,
                          std::span<const std::size_t> extents) {
  std::size_t total = 0;
  for (auto e : extents) total += e;
  if (total != a.dim(axis)) {
    throw DimensionError("split: extents sum to " + std::to_string(total) + " but axis " +
                         std::to_string(axis) + " of " + to_string(a.shape()) + " has " +
                         std::to_string(a.dim(axis)));
  }
  std::vector<Tensor> out;
  std::size_t begin = 0;
  for (auto e : extents) {
    out.push_back(slice(a, axis, begin, begin + e));
    begin += e;
  }
  return out;
}

// ---- backward ---------------------------------------------------------------

void backward(const Tensor& root) {
  const NodePtr& r = node_of(root);
  if (r->value.size() != 1) {
    throw ContractError("backward: root must be a scalar, got shape " + to_string(r->shape));
  }
  if (!r->requires_grad) return;

  // Iterative post-order DFS over nodes that take part in differentiation.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{r.get(), 0}};
  seen.insert(r.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (n->backward_fn) n->grad.assign(n->value.size(), 0.0);
  }
  r->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
  }
}

}  // namespace matsf
