#include <gtest/gtest.h>

#include <cmath>

#include "matsf/error.hpp"
#include "matsf/tensor.hpp"
#include "gradient_suite.hpp"
#include "oracles.hpp"

using namespace matsf;

namespace {

// Weighted sum so upstream gradients are not all ones.
Tensor weighted(const Tensor& t, const Tensor& w) { return sum(mul(t, w)); }

}  // namespace

TEST(Tensor, ConstructionAndShape) {
  auto t = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.at(1, 2), 6.0);
  EXPECT_THROW(Tensor::from({2, 2}, {1, 2, 3}), DimensionError);
  EXPECT_EQ(Tensor::scalar(4.0).item(), 4.0);
  EXPECT_THROW(t.item(), ContractError);
}

TEST(Tensor, SquareGradient) {
  auto x = Tensor::scalar(3.0, true);
  backward(square(x));
  EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
}

TEST(Tensor, BackwardAccumulatesAcrossCalls) {
  auto x = Tensor::scalar(3.0, true);
  auto y = square(x);
  backward(y);
  backward(y);
  EXPECT_DOUBLE_EQ(x.grad()[0], 12.0);
}

TEST(Tensor, BackwardRejectsNonScalarRoot) {
  auto x = Tensor::from({2}, {1, 2}, true);
  EXPECT_THROW(backward(square(x)), ContractError);
}

TEST(Tensor, SharedNodeSumsBothPaths) {
  CounterRng rng(11);
  auto a = oracle::random_tensor({3, 3}, rng);
  auto f = [&] {
    auto b = tanh(a);
    return sum(mul(b, add(b, a)));
  };
  EXPECT_LT(oracle::gradient_check(f, {a}).relative_error, 1e-7);
}

TEST(Tensor, MatmulSumGradientMatchesFiniteDifferences) {
  CounterRng rng(5);
  auto a = oracle::random_tensor({3, 3}, rng);
  auto b = oracle::random_tensor({3, 3}, rng);
  auto r = oracle::gradient_check([&] { return sum(matmul(a, b)); }, {a, b});
  EXPECT_LT(r.relative_error, 1e-6);
}

TEST(Tensor, MatmulMatchesTripleLoopExactly) {
  CounterRng rng(7);
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t k = 1; k <= 8; ++k)
      for (std::size_t n = 1; n <= 8; ++n) {
        auto a = oracle::random_tensor({m, k}, rng, -1, 1, false);
        auto b = oracle::random_tensor({k, n}, rng, -1, 1, false);
        auto c = matmul(a, b);
        auto expect = oracle::matmul(a.values(), b.values(), m, k, n);
        for (std::size_t i = 0; i < expect.size(); ++i) ASSERT_EQ(c.values()[i], expect[i]);
        auto bt = Tensor::from({n, k}, std::vector<double>(n * k));
        for (std::size_t p = 0; p < k; ++p)
          for (std::size_t j = 0; j < n; ++j) bt.mutable_values()[j * k + p] = b.values()[p * n + j];
        auto ct = matmul_transposed(a, bt);
        for (std::size_t i = 0; i < expect.size(); ++i) ASSERT_EQ(ct.values()[i], expect[i]);
      }
}

TEST(Tensor, ShapeErrors) {
  auto a = Tensor::zeros({2, 3});
  EXPECT_THROW(matmul(a, Tensor::zeros({2, 3})), DimensionError);
  EXPECT_THROW(add(a, Tensor::zeros({3, 2})), DimensionError);
  EXPECT_THROW(add(a, Tensor::zeros({2})), DimensionError);
  EXPECT_NO_THROW(add(a, Tensor::zeros({3})));
  EXPECT_THROW(concat({a, Tensor::zeros({2, 2})}, 0), DimensionError);
}

TEST(Tensor, LogDomain) {
  EXPECT_THROW(log(Tensor::from({2}, {1.0, 0.0})), DomainError);
  EXPECT_THROW(log(Tensor::from({1}, {-1.0})), DomainError);
  auto c = clamped_log(Tensor::from({2}, {0.0, 1.0}));
  EXPECT_DOUBLE_EQ(c.at(0), std::log(1e-12));
  EXPECT_DOUBLE_EQ(c.at(1), 0.0);
}

TEST(Tensor, SigmoidStaysInsideOpenInterval) {
  auto s = sigmoid(Tensor::from({4}, {-800.0, -40.0, 40.0, 800.0}));
  for (double v : s.values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Tensor, ConcatExamples) {
  auto c = concat({Tensor::from({1}, {1}), Tensor::from({1}, {2}), Tensor::from({1}, {3})}, 0);
  EXPECT_EQ(c.shape(), Shape{3});
  EXPECT_EQ(c.at(2), 3.0);
  auto single = Tensor::from({2, 2}, {1, 2, 3, 4});
  auto same = concat({single}, 1);
  EXPECT_EQ(same.shape(), single.shape());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(same.at(i), single.at(i));

  auto a = Tensor::from({2, 1}, {1, 2}, true), b = Tensor::from({2, 2}, {1, 2, 3, 4}, true);
  backward(sum(concat({a, b}, 1)));
  for (double g : a.grad()) EXPECT_EQ(g, 1.0);
  for (double g : b.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Tensor, ConcatSplitRoundTripOnValuesAndGradients) {
  CounterRng rng(9);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    auto a = oracle::random_tensor({3, 4}, rng);
    auto b = oracle::random_tensor(axis == 0 ? Shape{2, 4} : Shape{3, 2}, rng);
    auto w = oracle::random_tensor(a.shape(), rng, -1, 1, false);
    auto wb = oracle::random_tensor(b.shape(), rng, -1, 1, false);
    auto joined = concat({a, b}, axis);
    const std::size_t extents[] = {a.dim(axis), b.dim(axis)};
    auto parts = split(joined, axis, extents);
    ASSERT_EQ(parts.size(), 2u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(parts[0].at(i), a.at(i));
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(parts[1].at(i), b.at(i));
    backward(add(weighted(parts[0], w), weighted(parts[1], wb)));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.grad()[i], w.at(i));
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b.grad()[i], wb.at(i));
  }
}

TEST(Tensor, NoGradGuardRecordsNothing) {
  auto x = Tensor::scalar(2.0, true);
  Tensor y;
  {
    NoGradGuard g;
    y = square(x);
  }
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(grad_enabled());
}

TEST(Tensor, DetachCopiesValues) {
  auto x = Tensor::from({2}, {1, 2}, true);
  auto d = mul(x, x).detach();
  EXPECT_TRUE(d.is_leaf());
  EXPECT_FALSE(d.requires_grad());
  EXPECT_EQ(d.at(1), 4.0);
}

class OpGradient : public ::testing::TestWithParam<std::size_t> {};

TEST_P(OpGradient, MatchesCentralDifferences) {
  for (std::uint64_t inst = 0; inst < 100; ++inst)
    ASSERT_LE(gradient_suite::op_error(GetParam(), inst), 1e-4)
        << gradient_suite::op_names()[GetParam()] << " instance " << inst;
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradient,
                         ::testing::Range<std::size_t>(0, gradient_suite::op_names().size()),
                         [](const auto& info) { return gradient_suite::op_names()[info.param]; });
