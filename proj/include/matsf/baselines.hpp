#pragma once

// Comparison architectures, trained through the same epoch loop and
// evaluation routine as the adversarial system:
//   MultiOutput           one forecaster emitting all d variables, trained on
//                         the summed per-variable MSE;
//   ParallelSingleOutput  d independent single-output forecasters.

#include <span>
#include <string>
#include <vector>

#include "matsf/data.hpp"
#include "matsf/models.hpp"
#include "matsf/trainer.hpp"

namespace matsf {

enum class BaselineKind { MultiOutput, ParallelSingleOutput };

std::string to_string(BaselineKind kind);

/// One step on Σ_i MSE_i. Returns the per-variable pre-step losses.
std::vector<double> multi_output_step(ForecasterModel& model, const Batch& batch,
                                      Optimizer& optimizer);

TrainReport train_multi_output(ForecasterModel& model, const WindowedDataset& train_set,
                               const WindowedDataset& test_set, const TrainConfig& config);

TrainReport train_parallel_single(std::vector<ForecasterModel>& models,
                                  const WindowedDataset& train_set,
                                  const WindowedDataset& test_set, const TrainConfig& config);

}  // namespace matsf
