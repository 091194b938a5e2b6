#pragma once

// Joint two-phase training of d single-variable forecasters against one
// discriminator. Every mini-batch runs
//
//   1. forecast phase: each forecaster M_i takes one optimizer step on its
//      own MSE against target variable i;
//   2. regularization phase: the discriminator learns to separate real
//      target vectors from concat_i M_i(window) (forecasters frozen), then
//      the forecasters take a step to fool it (discriminator frozen), with
//      the adversarial loss weighted by lambda_adv.
//
// With lambda_adv = 0 the generator step is a no-op and training reduces to
// the parallel single-output baseline.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "matsf/data.hpp"
#include "matsf/error.hpp"
#include "matsf/models.hpp"
#include "matsf/optim.hpp"

namespace matsf {

enum class GeneratorLoss {
  NonSaturating,  // minimize −log D(G)
  Saturating,     // minimize log(1 − D(G)), the literal minimax term
};

std::string to_string(GeneratorLoss kind);
GeneratorLoss parse_generator_loss(const std::string& text);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double lr_forecast = 1e-3;
  double lr_disc = 1e-3;
  double lr_gen = 1e-4;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::size_t disc_steps_per_batch = 1;
  std::size_t gen_steps_per_batch = 1;
  double lambda_adv = 0.1;
  GeneratorLoss generator_loss = GeneratorLoss::NonSaturating;
  std::uint64_t seed = 0;

  void validate() const;
  OptimizerConfig optimizer_config(double lr) const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochRecord {
  std::size_t epoch = 0;
  std::vector<double> forecast_loss;  // mean batch MSE per variable (scaled units)
  std::optional<double> disc_loss;
  std::optional<double> disc_accuracy;
  std::optional<double> gen_loss;
};

struct TrainReport {
  std::string system;
  std::vector<std::string> variables;
  std::vector<EpochRecord> epochs;
  std::vector<double> test_mse;         // original units
  std::vector<double> test_mse_scaled;
  TrainConfig config;
  double wall_seconds = 0.0;

  /// One JSON record per epoch, newline-terminated.
  std::string epochs_jsonl() const;
  /// Everything but wall-clock time, so reruns compare byte-for-byte.
  nlohmann::json summary() const;
};

/// A loss left the finite range; carries what was recorded before it.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch, std::size_t batch,
                  TrainReport partial);
  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }
  const TrainReport& partial_report() const noexcept { return partial_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
  TrainReport partial_;
};

/// Largest loss magnitude accepted before training is declared divergent.
inline constexpr double kDivergenceLimit = 1e6;

/// [B × d] concatenation of every forecaster's output on one batch.
Tensor concat_forecasts(std::span<const ForecasterModel> models, std::span<const Tensor> steps);

/// −[mean log D(real) + mean log(1 − D(fake))]
Tensor discriminator_loss(const DiscriminatorModel& disc, const Tensor& real, const Tensor& fake);

Tensor generator_adversarial_loss(const DiscriminatorModel& disc, const Tensor& forecast_concat,
                                  GeneratorLoss kind = GeneratorLoss::NonSaturating);

/// One optimizer step per forecaster on its own MSE. Returns the per-variable
/// pre-step batch losses.
std::vector<double> forecast_phase_step(std::span<ForecasterModel> models, const Batch& batch,
                                        std::span<Optimizer> optimizers);

struct RegularizationStats {
  double disc_loss = 0.0;      // mean over discriminator steps, pre-update
  double disc_accuracy = 0.0;  // mean over discriminator steps, pre-update
  double gen_loss = 0.0;       // unweighted adversarial loss, mean over generator steps
};

RegularizationStats regularization_phase_step(std::span<ForecasterModel> models,
                                              DiscriminatorModel& disc, const Batch& batch,
                                              Optimizer& disc_optimizer,
                                              std::span<Optimizer> gen_optimizers,
                                              const TrainConfig& config);

struct BatchMetrics {
  std::vector<double> forecast_loss;
  std::optional<RegularizationStats> regularization;
};

using BatchStep = std::function<BatchMetrics(const Batch&)>;

/// Shared epoch loop: seed-determined shuffles, per-batch callback,
/// divergence guard, per-epoch averaging. Test metrics are not filled in.
TrainReport run_epochs(const std::string& system, const WindowedDataset& train,
                       const TrainConfig& config, const BatchStep& step);

/// Fills test_mse / test_mse_scaled through the shared evaluation routine.
void fill_test_metrics(TrainReport& report, std::span<const ForecasterModel> models,
                       const WindowedDataset& test);

/// Trains `models` (one per target, in target order) with the two-phase
/// procedure. A null `disc` skips the regularization phase entirely.
TrainReport train(std::vector<ForecasterModel>& models, DiscriminatorModel* disc,
                  const WindowedDataset& train_set, const WindowedDataset& test_set,
                  const TrainConfig& config);

}  // namespace matsf
