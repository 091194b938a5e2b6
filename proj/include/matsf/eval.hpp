#pragma once

// Metrics shared by every system so that comparisons differ only by model.
// Errors are reported in original units (targets and predictions are
// inverse-scaled first) and also in the scaled [0, 1] space.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "matsf/data.hpp"
#include "matsf/models.hpp"
#include "matsf/stats.hpp"
#include "matsf/tensor.hpp"

namespace matsf {

/// Column-wise MSE of [N × d] tensors, inverse-scaled through `scaler`
/// (one entry per column, target order) when given.
std::vector<double> mse_per_variable(const Tensor& pred, const Tensor& truth,
                                     const Scaler* scaler = nullptr);
std::vector<double> mae_per_variable(const Tensor& pred, const Tensor& truth,
                                     const Scaler* scaler = nullptr);

struct JointConsistency {
  CorrelationMatrix predicted;
  CorrelationMatrix truth;
  double gap = 0.0;  // Frobenius norm of the difference
};

/// Pearson structure of forecasts vs. targets. Needs N ≥ 3.
JointConsistency joint_consistency(const Tensor& pred, const Tensor& truth);

/// Fraction of 2n rows a discriminator labels correctly: real rows need
/// D > 0.5, forecast rows need D ≤ 0.5 (a score of exactly 0.5 means "fake").
double discriminator_accuracy(std::span<const double> real_scores,
                              std::span<const double> fake_scores);

/// Scaled forecasts [N × d] for every window. `models` is either d
/// single-variable forecasters or one multi-output forecaster.
Tensor predict(std::span<const ForecasterModel> models, const WindowedDataset& dataset,
               std::size_t batch_size = 256);

struct EvalResult {
  std::vector<std::string> variables;
  std::vector<double> mse;         // original units
  std::vector<double> mae;         // original units
  std::vector<double> mse_scaled;
  std::optional<double> disc_accuracy;
  CorrelationMatrix corr_pred;
  CorrelationMatrix corr_true;
  double gap = 0.0;
};

EvalResult evaluate(const Tensor& pred_scaled, const WindowedDataset& dataset,
                    const DiscriminatorModel* disc = nullptr);

nlohmann::json to_json(const EvalResult& r);
EvalResult eval_result_from_json(const nlohmann::json& j);

struct ComparisonTable {
  std::vector<std::string> variables;
  std::vector<std::string> systems;
  std::vector<std::vector<double>> mse;             // [system][variable]
  std::vector<std::optional<std::size_t>> winner;   // per variable; empty on ties
  std::vector<double> gaps;                         // per system
  std::optional<std::size_t> gap_winner;

  std::string to_text() const;
  /// variable,<system>... in original units.
  std::string mse_csv() const;
  std::string gap_csv() const;
};

/// Throws ContractError when systems report different variables.
ComparisonTable compare_systems(std::span<const std::pair<std::string, EvalResult>> results);

}  // namespace matsf
