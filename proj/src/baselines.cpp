#include "matsf/baselines.hpp"

#include "matsf/error.hpp"

namespace matsf {

std::string to_string(BaselineKind kind) {
  return kind == BaselineKind::MultiOutput ? "multi_output" : "parallel";
}

std::vector<double> multi_output_step(ForecasterModel& model, const Batch& batch,
                                      Optimizer& optimizer) {
  const std::size_t d = batch.targets.dim(1);
  if (model.spec.out != d)
    throw ContractError("multi-output model emits " + std::to_string(model.spec.out) +
                        " values for " + std::to_string(d) + " targets");
  const Tensor diff = sub(forecaster_forward(model, batch.steps), batch.targets);
  std::vector<Tensor> per_var;
  std::vector<double> losses;
  for (std::size_t k = 0; k < d; ++k) {
    per_var.push_back(mean(square(slice(diff, 1, k, k + 1))));
    losses.push_back(per_var.back().item());
  }
  Tensor total = per_var[0];
  for (std::size_t k = 1; k < d; ++k) total = add(total, per_var[k]);
  backward(total);
  optimizer.step();
  return losses;
}

TrainReport train_multi_output(ForecasterModel& model, const WindowedDataset& train_set,
                               const WindowedDataset& test_set, const TrainConfig& config) {
  config.validate();
  Optimizer opt(config.optimizer_config(config.lr_forecast), model.parameters());
  const BatchStep step = [&](const Batch& batch) {
    return BatchMetrics{multi_output_step(model, batch, opt), std::nullopt};
  };
  TrainReport report = run_epochs(to_string(BaselineKind::MultiOutput), train_set, config, step);
  fill_test_metrics(report, std::span<const ForecasterModel>(&model, 1), test_set);
  return report;
}

TrainReport train_parallel_single(std::vector<ForecasterModel>& models,
                                  const WindowedDataset& train_set,
                                  const WindowedDataset& test_set, const TrainConfig& config) {
  for (const auto& m : models)
    if (m.spec.out != 1) throw ContractError("parallel baseline needs single-output forecasters");
  return train(models, nullptr, train_set, test_set, config);
}

}  // namespace matsf
