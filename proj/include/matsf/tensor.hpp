#pragma once

// Dense row-major tensors with reverse-mode differentiation.
//
// A Tensor is a shared handle to a graph node. Ops applied to tensors that
// require gradients record their inputs and a backward rule; calling
// backward() on a scalar result walks the graph once in reverse topological
// order. Graphs are rebuilt on every forward pass and released with the last
// handle to their root.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace matsf {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t element_count(const Shape& shape);

namespace detail {
struct Node;
}

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  explicit operator bool() const noexcept { return node_ != nullptr; }

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::size_t dim(std::size_t axis) const;

  std::span<const double> values() const;
  /// Direct write access; only for leaves (parameters, inputs).
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t i) const { return values()[i]; }
  double at(std::size_t r, std::size_t c) const;

  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();
  void clear_grad();

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool is_leaf() const;

  const std::string& name() const;
  Tensor& set_name(std::string name);

  /// Deep copy of values into a new leaf with no history.
  Tensor detach() const;

  bool same_node(const Tensor& other) const noexcept { return node_ == other.node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  friend struct TensorAccess;

  std::shared_ptr<detail::Node> node_;
};

/// Disables graph recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Linear algebra. Both operands must be rank 2.
Tensor matmul(const Tensor& a, const Tensor& b);             // a · b
Tensor matmul_transposed(const Tensor& a, const Tensor& b);  // a · bᵀ

// Elementwise. Binary ops take identical shapes, or a rank-1 `b` of length n
// broadcast over the rows of a rank-2 `a` [m×n]. Nothing else broadcasts.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);
Tensor square(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
/// Throws DomainError on any non-positive input.
Tensor log(const Tensor& a);
/// log(max(a, floor)); the gradient is zero where the floor is active.
Tensor clamped_log(const Tensor& a, double floor = 1e-12);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Joins tensors along `axis`; every other extent must agree.
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis);
/// Elements [begin, end) along `axis`.
Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);
/// Inverse of concat: cuts `a` into consecutive pieces with the given extents.
std::vector<Tensor> split(const Tensor& a, std::size_t axis, std::span<const std::size_t> extents);

/// Accumulates d(root)/d(leaf) into every reachable leaf that requires grad.
/// Leaf gradients accumulate across calls; interior gradients are recomputed.
void backward(const Tensor& root);

}  // namespace matsf
