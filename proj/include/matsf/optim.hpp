#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "matsf/tensor.hpp"

namespace matsf {

enum class OptimizerKind { Sgd, Adam };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Sgd;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws ConfigError unless 0 < lr and 0 <= beta1, beta2 < 1.
  void validate() const;
};

/// First-order update over a fixed parameter list. Adam keeps one pair of
/// moment buffers per parameter, shaped like it.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::vector<Tensor> params);

  /// Applies one update from the current gradients, then zeroes them.
  /// Throws ContractError naming the first parameter without a gradient.
  void step();

  void zero_grad();

  const OptimizerConfig& config() const noexcept { return config_; }
  std::size_t steps_taken() const noexcept { return steps_; }
  const std::vector<Tensor>& params() const noexcept { return params_; }

 private:
  OptimizerConfig config_;
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
  std::size_t steps_ = 0;
};

}  // namespace matsf
