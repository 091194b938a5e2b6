#include "matsf/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "matsf/eval.hpp"
#include "matsf/rng.hpp"

namespace matsf {

std::string to_string(GeneratorLoss kind) {
  return kind == GeneratorLoss::NonSaturating ? "non_saturating" : "saturating";
}

GeneratorLoss parse_generator_loss(const std::string& text) {
  if (text == "non_saturating") return GeneratorLoss::NonSaturating;
  if (text == "saturating") return GeneratorLoss::Saturating;
  throw ConfigError("unknown generator loss '" + text + "'");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  for (double lr : {lr_forecast, lr_disc, lr_gen})
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rates must be positive");
  if (disc_steps_per_batch == 0 || gen_steps_per_batch == 0)
    throw ConfigError("discriminator and generator step counts must be positive");
  if (!(lambda_adv >= 0.0) || !std::isfinite(lambda_adv))
    throw ConfigError("lambda_adv must be non-negative");
}

OptimizerConfig TrainConfig::optimizer_config(double lr) const {
  OptimizerConfig c;
  c.kind = optimizer;
  c.learning_rate = lr;
  return c;
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr_forecast", c.lr_forecast},
          {"lr_disc", c.lr_disc},
          {"lr_gen", c.lr_gen},
          {"optimizer", to_string(c.optimizer)},
          {"disc_steps_per_batch", c.disc_steps_per_batch},
          {"gen_steps_per_batch", c.gen_steps_per_batch},
          {"lambda_adv", c.lambda_adv},
          {"generator_loss", to_string(c.generator_loss)},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.lr_forecast = j.at("lr_forecast").get<double>();
  c.lr_disc = j.at("lr_disc").get<double>();
  c.lr_gen = j.at("lr_gen").get<double>();
  c.optimizer = parse_optimizer_kind(j.at("optimizer").get<std::string>());
  c.disc_steps_per_batch = j.at("disc_steps_per_batch").get<std::size_t>();
  c.gen_steps_per_batch = j.at("gen_steps_per_batch").get<std::size_t>();
  c.lambda_adv = j.at("lambda_adv").get<double>();
  c.generator_loss = parse_generator_loss(j.at("generator_loss").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

namespace {
nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

std::string TrainReport::epochs_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::json j = {{"epoch", e.epoch},
                        {"forecast_loss", e.forecast_loss},
                        {"disc_loss", optional_json(e.disc_loss)},
                        {"disc_accuracy", optional_json(e.disc_accuracy)},
                        {"gen_loss", optional_json(e.gen_loss)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

nlohmann::json TrainReport::summary() const {
  return {{"system", system},
          {"variables", variables},
          {"epochs_completed", epochs.size()},
          {"test_mse", test_mse},
          {"test_mse_scaled", test_mse_scaled},
          {"config", to_json(config)}};
}

DivergenceError::DivergenceError(const std::string& what, std::size_t epoch, std::size_t batch,
                                 TrainReport partial)
    : Error(what), epoch_(epoch), batch_(batch), partial_(std::move(partial)) {}

Tensor concat_forecasts(std::span<const ForecasterModel> models, std::span<const Tensor> steps) {
  std::vector<Tensor> parts;
  parts.reserve(models.size());
  for (const auto& m : models) parts.push_back(forecaster_forward(m, steps));
  return concat(parts, 1);
}

namespace {

Tensor loss_from_scores(const Tensor& real_scores, const Tensor& fake_scores) {
  return neg(add(mean(clamped_log(real_scores)),
                 mean(clamped_log(add_scalar(neg(fake_scores), 1.0)))));
}

}  // namespace

Tensor discriminator_loss(const DiscriminatorModel& disc, const Tensor& real, const Tensor& fake) {
  return loss_from_scores(discriminator_forward(disc, real), discriminator_forward(disc, fake));
}

Tensor generator_adversarial_loss(const DiscriminatorModel& disc, const Tensor& forecast_concat,
                                  GeneratorLoss kind) {
  const Tensor scores = discriminator_forward(disc, forecast_concat);
  if (kind == GeneratorLoss::NonSaturating) return neg(mean(clamped_log(scores)));
  return mean(clamped_log(add_scalar(neg(scores), 1.0)));
}

std::vector<double> forecast_phase_step(std::span<ForecasterModel> models, const Batch& batch,
                                        std::span<Optimizer> optimizers) {
  if (optimizers.size() != models.size())
    throw ContractError("forecast phase: one optimizer per forecaster required");
  const std::size_t d = batch.targets.dim(1);
  std::vector<double> losses;
  losses.reserve(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::size_t var = models[i].spec.target_index.value_or(i);
    if (var >= d) throw ContractError("forecaster target index out of range");
    const Tensor pred = forecaster_forward(models[i], batch.steps);
    const Tensor target = slice(batch.targets, 1, var, var + 1);
    const Tensor loss = mean(square(sub(pred, target)));
    backward(loss);
    optimizers[i].step();
    losses.push_back(loss.item());
  }
  return losses;
}

RegularizationStats regularization_phase_step(std::span<ForecasterModel> models,
                                              DiscriminatorModel& disc, const Batch& batch,
                                              Optimizer& disc_optimizer,
                                              std::span<Optimizer> gen_optimizers,
                                              const TrainConfig& config) {
  if (gen_optimizers.size() != models.size())
    throw ContractError("regularization phase: one generator optimizer per forecaster required");
  if (batch.targets.dim(1) != models.size())
    throw ContractError("regularization phase: targets must hold one column per forecaster");
  RegularizationStats stats;
  const Tensor& real = batch.targets;

  // (a) discriminator update; forecasts are constants here.
  Tensor fake;
  {
    NoGradGuard frozen_forecasters;
    fake = concat_forecasts(models, batch.steps);
  }
  for (std::size_t s = 0; s < config.disc_steps_per_batch; ++s) {
    const Tensor real_scores = discriminator_forward(disc, real);
    const Tensor fake_scores = discriminator_forward(disc, fake);
    const Tensor loss = loss_from_scores(real_scores, fake_scores);
    stats.disc_loss += loss.item();
    stats.disc_accuracy += discriminator_accuracy(real_scores.values(), fake_scores.values());
    backward(loss);
    disc_optimizer.step();
  }
  stats.disc_loss /= static_cast<double>(config.disc_steps_per_batch);
  stats.disc_accuracy /= static_cast<double>(config.disc_steps_per_batch);

  // (b) generator update through a frozen discriminator.
  FreezeGuard frozen_disc(disc.parameters());
  for (std::size_t s = 0; s < config.gen_steps_per_batch; ++s) {
    const Tensor forecasts = concat_forecasts(models, batch.steps);
    const Tensor loss = generator_adversarial_loss(disc, forecasts, config.generator_loss);
    stats.gen_loss += loss.item();
    backward(scale(loss, config.lambda_adv));
    for (auto& opt : gen_optimizers) opt.step();
  }
  stats.gen_loss /= static_cast<double>(config.gen_steps_per_batch);
  return stats;
}

namespace {

bool out_of_range(double v) { return !std::isfinite(v) || std::abs(v) > kDivergenceLimit; }

}  // namespace

TrainReport run_epochs(const std::string& system, const WindowedDataset& train,
                       const TrainConfig& config, const BatchStep& step) {
  config.validate();
  if (train.empty()) throw ConfigError("training set is empty");
  const auto started = std::chrono::steady_clock::now();
  TrainReport report;
  report.system = system;
  report.variables = train.target_names();
  report.config = config;

  const std::size_t n = train.size();
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> idx;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(derive_seed(config.seed, "shuffle", epoch));
    std::shuffle(order.begin(), order.end(), rng);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.forecast_loss.assign(train.num_targets(), 0.0);
    double disc_loss = 0.0, disc_acc = 0.0, gen_loss = 0.0;
    std::size_t batches = 0;
    bool regularized = false;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size, ++batches) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      idx.assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                 order.begin() + static_cast<std::ptrdiff_t>(end));
      const BatchMetrics m = step(train.gather(idx));

      std::vector<double> checked = m.forecast_loss;
      if (m.regularization) {
        checked.push_back(m.regularization->disc_loss);
        checked.push_back(m.regularization->gen_loss);
      }
      for (double v : checked) {
        if (out_of_range(v)) {
          report.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
          throw DivergenceError("loss " + std::to_string(v) + " at epoch " +
                                    std::to_string(epoch) + ", batch " + std::to_string(batches),
                                epoch, batches, report);
        }
      }
      for (std::size_t k = 0; k < rec.forecast_loss.size() && k < m.forecast_loss.size(); ++k)
        rec.forecast_loss[k] += m.forecast_loss[k];
      if (m.regularization) {
        regularized = true;
        disc_loss += m.regularization->disc_loss;
        disc_acc += m.regularization->disc_accuracy;
        gen_loss += m.regularization->gen_loss;
      }
    }
    const double nb = static_cast<double>(batches);
    for (auto& v : rec.forecast_loss) v /= nb;
    if (regularized) {
      rec.disc_loss = disc_loss / nb;
      rec.disc_accuracy = disc_acc / nb;
      rec.gen_loss = gen_loss / nb;
    }
    report.epochs.push_back(std::move(rec));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void fill_test_metrics(TrainReport& report, std::span<const ForecasterModel> models,
                       const WindowedDataset& test) {
  if (test.empty()) return;
  const Tensor pred = predict(models, test);
  const EvalResult r = evaluate(pred, test);
  report.test_mse = r.mse;
  report.test_mse_scaled = r.mse_scaled;
}

TrainReport train(std::vector<ForecasterModel>& models, DiscriminatorModel* disc,
                  const WindowedDataset& train_set, const WindowedDataset& test_set,
                  const TrainConfig& config) {
  config.validate();
  if (models.size() != train_set.num_targets())
    throw ContractError("train: need one forecaster per target variable");
  if (disc && disc->spec.input_size != models.size())
    throw ContractError("train: discriminator input size must equal the variable count");

  std::vector<Optimizer> forecast_opts, gen_opts;
  for (const auto& m : models) {
    forecast_opts.emplace_back(config.optimizer_config(config.lr_forecast), m.parameters());
    gen_opts.emplace_back(config.optimizer_config(config.lr_gen), m.parameters());
  }
  std::optional<Optimizer> disc_opt;
  if (disc) disc_opt.emplace(config.optimizer_config(config.lr_disc), disc->parameters());

  const BatchStep step = [&](const Batch& batch) {
    BatchMetrics m;
    m.forecast_loss = forecast_phase_step(models, batch, forecast_opts);
    if (disc) m.regularization = regularization_phase_step(models, *disc, batch, *disc_opt, gen_opts, config);
    return m;
  };
  TrainReport report = run_epochs(disc ? "adversarial" : "parallel", train_set, config, step);
  fill_test_metrics(report, models, test_set);
  return report;
}

}  // namespace matsf
