#include "matsf/models.hpp"

#include <cmath>

#include "matsf/error.hpp"
#include "matsf/rng.hpp"

namespace matsf {

LstmState zero_state(std::size_t batch, std::size_t hidden) {
  return {Tensor::zeros({batch, hidden}), Tensor::zeros({batch, hidden})};
}

namespace {

LstmState lstm_step(const Tensor& x, const LstmState& state, const LstmLayerParams& p) {
  const std::size_t h = p.hidden_size;
  Tensor z = add(add(matmul_transposed(x, p.w_gates), matmul_transposed(state.h, p.u_gates)),
                 p.b_gates);
  Tensor in_gate = sigmoid(slice(z, 1, 0, h));
  Tensor forget_gate = sigmoid(slice(z, 1, h, 2 * h));
  Tensor cell_gate = tanh(slice(z, 1, 2 * h, 3 * h));
  Tensor out_gate = sigmoid(slice(z, 1, 3 * h, 4 * h));
  Tensor c_next = add(mul(forget_gate, state.c), mul(in_gate, cell_gate));
  Tensor h_next = mul(out_gate, tanh(c_next));
  return {std::move(h_next), std::move(c_next)};
}

void check_state(const Tensor& x, const LstmState& s, const LstmLayerParams& p) {
  if (x.rank() != 2 || x.dim(1) != p.input_size) {
    throw DimensionError("lstm: input " + to_string(x.shape()) + " does not match input size " +
                         std::to_string(p.input_size));
  }
  const Shape want{x.dim(0), p.hidden_size};
  if (s.h.shape() != want || s.c.shape() != want) {
    throw DimensionError("lstm: state " + to_string(s.h.shape()) + "/" + to_string(s.c.shape()) +
                         " does not match " + to_string(want));
  }
}

Tensor uniform_tensor(Shape shape, std::size_t fan_in, std::uint64_t key, std::string name) {
  CounterRng rng(key);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(element_count(shape));
  for (double& x : v) x = rng.uniform(-bound, bound);
  Tensor t = Tensor::from(std::move(shape), std::move(v), true);
  t.set_name(std::move(name));
  return t;
}

}  // namespace

LstmState lstm_cell_forward(const Tensor& x, const LstmState& state,
                            const LstmLayerParams& params) {
  check_state(x, state, params);
  return lstm_step(x, state, params);
}

void ForecasterSpec::validate() const {
  if (input_size == 0) throw ConfigError("forecaster input size must be positive");
  if (hidden_sizes.empty()) throw ConfigError("forecaster needs at least one LSTM layer");
  for (auto h : hidden_sizes)
    if (h == 0) throw ConfigError("LSTM hidden size must be positive");
  if (out == 0) throw ConfigError("forecaster output size must be positive");
  if (target_index && out != 1)
    throw ConfigError("a single-variable forecaster must have exactly one output");
}

std::vector<Tensor> ForecasterModel::parameters() const {
  std::vector<Tensor> out;
  for (const auto& l : layers) {
    out.push_back(l.w_gates);
    out.push_back(l.u_gates);
    out.push_back(l.b_gates);
  }
  out.push_back(head_w);
  out.push_back(head_b);
  return out;
}

std::vector<Tensor> timestep_inputs(const Tensor& window) {
  if (window.rank() != 3) {
    throw DimensionError("window must be [batch × lookback × features], got " +
                         to_string(window.shape()));
  }
  const std::size_t b = window.dim(0), l = window.dim(1), f = window.dim(2);
  auto v = window.values();
  std::vector<Tensor> steps;
  steps.reserve(l);
  for (std::size_t t = 0; t < l; ++t) {
    std::vector<double> step(b * f);
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t j = 0; j < f; ++j) step[r * f + j] = v[(r * l + t) * f + j];
    steps.push_back(Tensor::from({b, f}, std::move(step)));
  }
  return steps;
}

Tensor forecaster_forward(const ForecasterModel& model, std::span<const Tensor> steps) {
  if (steps.empty()) throw ContractError("forecaster_forward: empty window");
  const std::size_t batch = steps[0].dim(0);
  if (batch == 0) throw ContractError("forecaster_forward: empty batch");
  std::vector<Tensor> seq(steps.begin(), steps.end());
  for (const auto& layer : model.layers) {
    LstmState s = zero_state(batch, layer.hidden_size);
    check_state(seq[0], s, layer);
    for (auto& x : seq) {
      s = lstm_step(x, s, layer);
      x = s.h;
    }
  }
  return add(matmul_transposed(seq.back(), model.head_w), model.head_b);
}

Tensor forecaster_forward(const ForecasterModel& model, const Tensor& window) {
  if (window.rank() == 3 && (window.dim(0) == 0 || window.dim(1) == 0))
    throw ContractError("forecaster_forward: empty window");
  auto steps = timestep_inputs(window);
  return forecaster_forward(model, steps);
}

DiscriminatorSpec DiscriminatorSpec::defaults_for(std::size_t d) {
  return {d, {4 * d, 4 * d}};
}

void DiscriminatorSpec::validate() const {
  if (input_size == 0) throw ConfigError("discriminator input size must be positive");
  for (auto h : hidden_sizes)
    if (h == 0) throw ConfigError("discriminator layer width must be positive");
}

std::vector<Tensor> DiscriminatorModel::parameters() const {
  std::vector<Tensor> out;
  for (const auto& l : layers) {
    out.push_back(l.w);
    out.push_back(l.b);
  }
  return out;
}

Tensor discriminator_forward(const DiscriminatorModel& model, const Tensor& v) {
  if (v.rank() != 2 || v.dim(1) != model.spec.input_size) {
    throw DimensionError("discriminator: input " + to_string(v.shape()) +
                         " does not match input size " + std::to_string(model.spec.input_size));
  }
  Tensor x = v;
  for (const auto& l : model.layers) {
    Tensor z = add(matmul_transposed(x, l.w), l.b);
    x = l.activation == Activation::Relu ? relu(z) : sigmoid(z);
  }
  return x;
}

ForecasterModel init_forecaster(const ForecasterSpec& spec, std::uint64_t seed) {
  spec.validate();
  ForecasterModel m;
  m.spec = spec;
  std::size_t in = spec.input_size;
  for (std::size_t i = 0; i < spec.hidden_sizes.size(); ++i) {
    const std::size_t h = spec.hidden_sizes[i];
    const std::string prefix = "lstm" + std::to_string(i) + ".";
    LstmLayerParams l;
    l.input_size = in;
    l.hidden_size = h;
    l.w_gates = uniform_tensor({4 * h, in}, in, derive_seed(seed, "lstm.w", i), prefix + "w_gates");
    l.u_gates = uniform_tensor({4 * h, h}, h, derive_seed(seed, "lstm.u", i), prefix + "u_gates");
    l.b_gates = uniform_tensor({4 * h}, h, derive_seed(seed, "lstm.b", i), prefix + "b_gates");
    auto b = l.b_gates.mutable_values();
    for (std::size_t j = h; j < 2 * h; ++j) b[j] = 1.0;
    m.layers.push_back(std::move(l));
    in = h;
  }
  m.head_w = uniform_tensor({spec.out, in}, in, derive_seed(seed, "head.w"), "head.w");
  m.head_b = uniform_tensor({spec.out}, in, derive_seed(seed, "head.b"), "head.b");
  return m;
}

DiscriminatorModel init_discriminator(const DiscriminatorSpec& spec, std::uint64_t seed) {
  spec.validate();
  DiscriminatorModel m;
  m.spec = spec;
  std::vector<std::size_t> widths = spec.hidden_sizes;
  widths.push_back(1);
  std::size_t in = spec.input_size;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const std::string prefix = "dense" + std::to_string(i) + ".";
    DenseLayer l;
    l.w = uniform_tensor({widths[i], in}, in, derive_seed(seed, "dense.w", i), prefix + "w");
    l.b = uniform_tensor({widths[i]}, in, derive_seed(seed, "dense.b", i), prefix + "b");
    l.activation = i + 1 == widths.size() ? Activation::Sigmoid : Activation::Relu;
    m.layers.push_back(std::move(l));
    in = widths[i];
  }
  return m;
}

FreezeGuard::FreezeGuard(std::vector<Tensor> params) : params_(std::move(params)) {
  for (auto& p : params_) {
    previous_.push_back(p.requires_grad());
    p.set_requires_grad(false);
  }
}

FreezeGuard::~FreezeGuard() {
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i].set_requires_grad(previous_[i]);
}

}  // namespace matsf
