#pragma once

// Network families used by the forecasting systems:
//   * ForecasterModel: stacked LSTM over a lookback window plus a linear head.
//     With out = 1 it forecasts one variable; with out = d it is the shared
//     multi-output network.
//   * DiscriminatorModel: MLP mapping a d-vector to a probability of "real".
//
// LSTM gates are packed along the 4·hidden axis in the order
// (input, forget, cell, output).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matsf/tensor.hpp"

namespace matsf {

struct LstmLayerParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor w_gates;  // [4H × input]
  Tensor u_gates;  // [4H × H]
  Tensor b_gates;  // [4H]
};

struct LstmState {
  Tensor h;  // [B × H]
  Tensor c;  // [B × H]
};

LstmState zero_state(std::size_t batch, std::size_t hidden);

/// One LSTM step on a batch of inputs x [B × input].
LstmState lstm_cell_forward(const Tensor& x, const LstmState& state,
                            const LstmLayerParams& params);

struct ForecasterSpec {
  std::size_t input_size = 0;
  std::vector<std::size_t> hidden_sizes;
  std::size_t out = 1;
  /// Variable this model predicts; empty for the multi-output network.
  std::optional<std::size_t> target_index;

  void validate() const;
  bool operator==(const ForecasterSpec&) const = default;
};

struct ForecasterModel {
  ForecasterSpec spec;
  std::vector<LstmLayerParams> layers;
  Tensor head_w;  // [out × H_last]
  Tensor head_b;  // [out]

  std::vector<Tensor> parameters() const;
};

/// Splits a window tensor [B × L × F] into L per-step inputs [B × F].
std::vector<Tensor> timestep_inputs(const Tensor& window);

/// Unrolls every layer over the lookback from zero state and applies the head
/// to the last hidden state. Returns [B × out].
Tensor forecaster_forward(const ForecasterModel& model, std::span<const Tensor> steps);
Tensor forecaster_forward(const ForecasterModel& model, const Tensor& window);

enum class Activation { Relu, Sigmoid };

struct DenseLayer {
  Tensor w;  // [out × in]
  Tensor b;  // [out]
  Activation activation = Activation::Relu;
};

struct DiscriminatorSpec {
  std::size_t input_size = 0;
  std::vector<std::size_t> hidden_sizes;

  /// Two relu layers of width 4·d.
  static DiscriminatorSpec defaults_for(std::size_t d);
  void validate() const;
  bool operator==(const DiscriminatorSpec&) const = default;
};

struct DiscriminatorModel {
  DiscriminatorSpec spec;
  std::vector<DenseLayer> layers;  // last layer: one unit, sigmoid

  std::vector<Tensor> parameters() const;
};

/// Scores rows of v [B × d]; returns [B × 1] strictly inside (0, 1).
Tensor discriminator_forward(const DiscriminatorModel& model, const Tensor& v);

/// Weights ~ U(−1/√fan_in, 1/√fan_in) from a counter-based stream keyed by
/// `seed`; LSTM forget-gate biases start at 1.
ForecasterModel init_forecaster(const ForecasterSpec& spec, std::uint64_t seed);
DiscriminatorModel init_discriminator(const DiscriminatorSpec& spec, std::uint64_t seed);

/// Turns off requires_grad on a parameter set for the guard's lifetime.
class FreezeGuard {
 public:
  explicit FreezeGuard(std::vector<Tensor> params);
  ~FreezeGuard();
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  std::vector<Tensor> params_;
  std::vector<bool> previous_;
};

}  // namespace matsf
