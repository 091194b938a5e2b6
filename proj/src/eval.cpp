#include "matsf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "matsf/error.hpp"
#include "matsf/format.hpp"

namespace matsf {

namespace {

void check_pair(const Tensor& pred, const Tensor& truth, const Scaler* scaler) {
  if (pred.rank() != 2 || pred.shape() != truth.shape()) {
    throw DimensionError("prediction " + to_string(pred.shape()) + " and truth " +
                         to_string(truth.shape()) + " must be equal-shaped matrices");
  }
  if (scaler && scaler->size() != pred.dim(1))
    throw DimensionError("scaler covers " + std::to_string(scaler->size()) + " columns, data has " +
                         std::to_string(pred.dim(1)));
}

template <typename Loss>
std::vector<double> columnwise(const Tensor& pred, const Tensor& truth, const Scaler* scaler,
                               Loss loss) {
  check_pair(pred, truth, scaler);
  const std::size_t n = pred.dim(0), d = pred.dim(1);
  std::vector<double> out(d, 0.0);
  if (n == 0) return out;
  auto p = pred.values();
  auto t = truth.values();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) {
      double a = p[r * d + j], b = t[r * d + j];
      if (scaler) {
        a = scaler->columns()[j].inverse(a);
        b = scaler->columns()[j].inverse(b);
      }
      out[j] += loss(a - b);
    }
  for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

nlohmann::json corr_json(const CorrelationMatrix& c) {
  return {{"d", c.d}, {"values", c.values}, {"zero_variance", c.zero_variance}};
}

CorrelationMatrix corr_from_json(const nlohmann::json& j) {
  CorrelationMatrix c;
  c.d = j.at("d").get<std::size_t>();
  c.values = j.at("values").get<std::vector<double>>();
  c.zero_variance = j.at("zero_variance").get<std::vector<bool>>();
  return c;
}

}  // namespace

std::vector<double> mse_per_variable(const Tensor& pred, const Tensor& truth,
                                     const Scaler* scaler) {
  return columnwise(pred, truth, scaler, [](double e) { return e * e; });
}

std::vector<double> mae_per_variable(const Tensor& pred, const Tensor& truth,
                                     const Scaler* scaler) {
  return columnwise(pred, truth, scaler, [](double e) { return std::abs(e); });
}

JointConsistency joint_consistency(const Tensor& pred, const Tensor& truth) {
  check_pair(pred, truth, nullptr);
  const std::size_t n = pred.dim(0), d = pred.dim(1);
  if (n < 3) throw ContractError("joint_consistency needs at least 3 rows");
  JointConsistency jc;
  jc.predicted = pearson_matrix(pred.values(), n, d);
  jc.truth = pearson_matrix(truth.values(), n, d);
  double s = 0.0;
  for (std::size_t i = 0; i < d * d; ++i) {
    const double diff = jc.predicted.values[i] - jc.truth.values[i];
    s += diff * diff;
  }
  jc.gap = std::sqrt(s);
  return jc;
}

double discriminator_accuracy(std::span<const double> real_scores,
                              std::span<const double> fake_scores) {
  const std::size_t total = real_scores.size() + fake_scores.size();
  if (total == 0) return 0.0;
  std::size_t correct = 0;
  for (double s : real_scores) correct += s > 0.5 ? 1 : 0;
  for (double s : fake_scores) correct += s <= 0.5 ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(total);
}

Tensor predict(std::span<const ForecasterModel> models, const WindowedDataset& dataset,
               std::size_t batch_size) {
  if (models.empty()) throw ContractError("predict: no models");
  const std::size_t n = dataset.size(), d = dataset.num_targets();
  const bool multi = models.size() == 1 && models[0].spec.out == d && !models[0].spec.target_index;
  if (!multi && models.size() != d)
    throw ContractError("predict: expected " + std::to_string(d) + " forecasters, got " +
                        std::to_string(models.size()));
  NoGradGuard no_grad;
  std::vector<double> out(n * d);
  std::vector<std::size_t> idx;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + batch_size);
    idx.resize(end - begin);
    for (std::size_t r = begin; r < end; ++r) idx[r - begin] = r;
    const Batch batch = dataset.gather(idx);
    if (multi) {
      const Tensor y_t = forecaster_forward(models[0], batch.steps);
      auto y = y_t.values();
      std::copy(y.begin(), y.end(), out.begin() + static_cast<std::ptrdiff_t>(begin * d));
    } else {
      for (std::size_t k = 0; k < d; ++k) {
        const Tensor y_t = forecaster_forward(models[k], batch.steps);
        auto y = y_t.values();
        for (std::size_t r = begin; r < end; ++r) out[r * d + k] = y[r - begin];
      }
    }
  }
  return Tensor::from({n, d}, std::move(out));
}

EvalResult evaluate(const Tensor& pred_scaled, const WindowedDataset& dataset,
                    const DiscriminatorModel* disc) {
  const Tensor truth = dataset.targets();
  const Scaler scaler = dataset.target_scaler();
  EvalResult r;
  r.variables = dataset.target_names();
  r.mse = mse_per_variable(pred_scaled, truth, &scaler);
  r.mae = mae_per_variable(pred_scaled, truth, &scaler);
  r.mse_scaled = mse_per_variable(pred_scaled, truth);
  if (disc) {
    NoGradGuard no_grad;
    const Tensor real = discriminator_forward(*disc, truth);
    const Tensor fake = discriminator_forward(*disc, pred_scaled);
    r.disc_accuracy = discriminator_accuracy(real.values(), fake.values());
  }
  if (pred_scaled.dim(0) >= 3) {
    auto jc = joint_consistency(pred_scaled, truth);
    r.corr_pred = std::move(jc.predicted);
    r.corr_true = std::move(jc.truth);
    r.gap = jc.gap;
  }
  return r;
}

nlohmann::json to_json(const EvalResult& r) {
  nlohmann::json j = {{"variables", r.variables},
                      {"mse", r.mse},
                      {"mae", r.mae},
                      {"mse_scaled", r.mse_scaled},
                      {"corr_pred", corr_json(r.corr_pred)},
                      {"corr_true", corr_json(r.corr_true)},
                      {"joint_gap", r.gap}};
  j["disc_accuracy"] = r.disc_accuracy ? nlohmann::json(*r.disc_accuracy) : nlohmann::json(nullptr);
  return j;
}

EvalResult eval_result_from_json(const nlohmann::json& j) {
  EvalResult r;
  r.variables = j.at("variables").get<std::vector<std::string>>();
  r.mse = j.at("mse").get<std::vector<double>>();
  r.mae = j.at("mae").get<std::vector<double>>();
  r.mse_scaled = j.at("mse_scaled").get<std::vector<double>>();
  r.corr_pred = corr_from_json(j.at("corr_pred"));
  r.corr_true = corr_from_json(j.at("corr_true"));
  r.gap = j.at("joint_gap").get<double>();
  if (!j.at("disc_accuracy").is_null()) r.disc_accuracy = j.at("disc_accuracy").get<double>();
  return r;
}

ComparisonTable compare_systems(std::span<const std::pair<std::string, EvalResult>> results) {
  if (results.empty()) throw ContractError("compare_systems: no results");
  ComparisonTable t;
  t.variables = results[0].second.variables;
  for (const auto& [name, r] : results) {
    if (r.variables != t.variables)
      throw ContractError("compare_systems: '" + name + "' reports different variables");
    t.systems.push_back(name);
    t.mse.push_back(r.mse);
    t.gaps.push_back(r.gap);
  }
  auto pick = [&](auto value_of) -> std::optional<std::size_t> {
    if (t.systems.size() < 2) return std::nullopt;
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t s = 1; s < t.systems.size(); ++s) {
      if (value_of(s) < value_of(best)) {
        best = s;
        tie = false;
      } else if (value_of(s) == value_of(best)) {
        tie = true;
      }
    }
    if (tie) return std::nullopt;
    return best;
  };
  for (std::size_t v = 0; v < t.variables.size(); ++v)
    t.winner.push_back(pick([&](std::size_t s) { return t.mse[s][v]; }));
  t.gap_winner = pick([&](std::size_t s) { return t.gaps[s]; });
  return t;
}

std::string ComparisonTable::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(16) << "variable";
  for (const auto& s : systems) os << std::right << std::setw(18) << s;
  os << std::right << std::setw(18) << "winner" << '\n';
  auto row = [&](const std::string& label, auto value_of, const std::optional<std::size_t>& w) {
    os << std::left << std::setw(16) << label;
    for (std::size_t s = 0; s < systems.size(); ++s) {
      std::ostringstream cell;
      cell << std::setprecision(6) << value_of(s) << (w && *w == s ? "*" : "");
      os << std::right << std::setw(18) << cell.str();
    }
    os << std::right << std::setw(18) << (w ? systems[*w] : (systems.size() > 1 ? "tie" : "-"))
       << '\n';
  };
  for (std::size_t v = 0; v < variables.size(); ++v)
    row(variables[v], [&](std::size_t s) { return mse[s][v]; }, winner[v]);
  row("joint_gap", [&](std::size_t s) { return gaps[s]; }, gap_winner);
  return os.str();
}

std::string ComparisonTable::mse_csv() const {
  std::ostringstream os;
  os << "variable";
  for (const auto& s : systems) os << ',' << s;
  os << '\n';
  for (std::size_t v = 0; v < variables.size(); ++v) {
    os << variables[v];
    for (std::size_t s = 0; s < systems.size(); ++s) os << ',' << format_number(mse[s][v]);
    os << '\n';
  }
  return os.str();
}

std::string ComparisonTable::gap_csv() const {
  std::ostringstream os;
  os << "system,joint_gap\n";
  for (std::size_t s = 0; s < systems.size(); ++s)
    os << systems[s] << ',' << format_number(gaps[s]) << '\n';
  return os.str();
}

}  // namespace matsf
