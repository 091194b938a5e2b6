#include "matsf/optim.hpp"

#include <cmath>

#include "matsf/error.hpp"

namespace matsf {

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer_kind(const std::string& text) {
  if (text == "sgd" || text == "SGD") return OptimizerKind::Sgd;
  if (text == "adam" || text == "Adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + text + "' (expected sgd or adam)");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning rate must be positive, got " + std::to_string(learning_rate));
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
}

Optimizer::Optimizer(OptimizerConfig config, std::vector<Tensor> params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  if (config_.kind == OptimizerKind::Adam) {
    for (const auto& p : params_) {
      first_moment_.emplace_back(p.size(), 0.0);
      second_moment_.emplace_back(p.size(), 0.0);
    }
  }
}

void Optimizer::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].has_grad()) {
      const auto& name = params_[i].name();
      throw ContractError("optimizer step: parameter '" +
                          (name.empty() ? "#" + std::to_string(i) : name) +
                          "' has no gradient");
    }
  }
  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::Sgd) {
    for (auto& p : params_) {
      auto v = p.mutable_values();
      auto g = p.grad();
      for (std::size_t j = 0; j < v.size(); ++j) v[j] -= lr * g[j];
    }
  } else {
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(b1, t);
    const double c2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto v = params_[i].mutable_values();
      auto g = params_[i].grad();
      auto& m = first_moment_[i];
      auto& s = second_moment_[i];
      for (std::size_t j = 0; j < v.size(); ++j) {
        m[j] = b1 * m[j] + (1.0 - b1) * g[j];
        s[j] = b2 * s[j] + (1.0 - b2) * g[j] * g[j];
        const double m_hat = m[j] / c1;
        const double s_hat = s[j] / c2;
        v[j] -= lr * m_hat / (std::sqrt(s_hat) + config_.epsilon);
      }
    }
  }
  zero_grad();
}

void Optimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace matsf
