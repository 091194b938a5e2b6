#pragma once
// Small prepared datasets for trainer, baseline and CLI tests.

#include <string>

#include "matsf/data.hpp"
#include "matsf/models.hpp"
#include "matsf/synth.hpp"

namespace fixture {

inline matsf::Schema synthetic_schema(std::size_t d) {
  matsf::Schema s;
  s.timestamp = {{"t"}, 1};
  for (std::size_t i = 0; i < d; ++i)
    s.columns.push_back({"x" + std::to_string(i), matsf::ColumnKind::Continuous});
  return s;
}

inline matsf::PreparedData synthetic(const std::string& spec_text, std::size_t lookback,
                                     double train_fraction = 0.8) {
  const auto spec = matsf::parse_synth_spec(spec_text);
  matsf::PipelineConfig cfg;
  cfg.targets = spec.variable_names();
  cfg.lookback = lookback;
  cfg.train_fraction = train_fraction;
  return matsf::prepare(matsf::generate(spec).frame, synthetic_schema(spec.d), cfg);
}

inline std::vector<matsf::ForecasterModel> forecasters(std::size_t d, std::size_t features,
                                                       std::vector<std::size_t> hidden,
                                                       std::uint64_t seed) {
  std::vector<matsf::ForecasterModel> out;
  for (std::size_t i = 0; i < d; ++i) {
    matsf::ForecasterSpec s;
    s.input_size = features;
    s.hidden_sizes = hidden;
    s.target_index = i;
    out.push_back(matsf::init_forecaster(s, seed + i));
  }
  return out;
}

inline std::vector<double> flatten(const std::vector<matsf::Tensor>& params) {
  std::vector<double> out;
  for (const auto& p : params) out.insert(out.end(), p.values().begin(), p.values().end());
  return out;
}

inline std::vector<double> flatten(const std::vector<matsf::ForecasterModel>& models) {
  std::vector<double> out;
  for (const auto& m : models) {
    auto v = flatten(m.parameters());
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace fixture
