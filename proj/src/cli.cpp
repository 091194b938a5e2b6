#include "matsf/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "matsf/baselines.hpp"
#include "matsf/checkpoint.hpp"
#include "matsf/data.hpp"
#include "matsf/error.hpp"
#include "matsf/eval.hpp"
#include "matsf/format.hpp"
#include "matsf/rng.hpp"
#include "matsf/synth.hpp"
#include "matsf/trainer.hpp"

namespace matsf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TrainOptions {
  std::string system = "adversarial";
  std::string data;
  std::string synth;
  std::string profile;
  std::vector<std::string> timestamp_cols;
  std::int64_t step = 0;
  std::vector<std::string> categorical;
  std::vector<std::string> targets;
  std::vector<std::string> drop;
  std::string impute = "drop_leading";
  std::size_t lookback = 24;
  std::size_t layers = 1;
  std::size_t units = 16;
  std::vector<std::size_t> disc_hidden;
  double train_fraction = 0.8;
  std::string optimizer = "adam";
  std::string generator_loss = "non_saturating";
  TrainConfig train;
  std::string out;
  std::string cache_dir;
};

struct Profile {
  std::size_t lookback;
  std::size_t layers;
  std::size_t units;
  std::vector<std::string> timestamp_cols;
  std::int64_t step;
  std::vector<std::string> categorical;
  std::vector<std::string> targets;
  std::vector<std::string> drop;
};

const std::map<std::string, Profile>& profiles() {
  static const std::map<std::string, Profile> p = {
      {"airquality",
       {24, 3, 10, {"year", "month", "day", "hour"}, 3600, {"cbwd"},
        {"pm2.5", "DEWP", "TEMP", "PRES", "Iws", "Is", "Ir"}, {"No"}}},
      {"industrial", {96, 1, 100, {"timestamp"}, 900, {}, {}, {}}},
  };
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

Schema build_schema(const TrainOptions& o, const fs::path& csv) {
  const auto header = read_csv_header(csv);
  Schema s;
  s.timestamp.columns = o.timestamp_cols;
  if (s.timestamp.columns.empty()) {
    if (std::find(header.begin(), header.end(), "timestamp") != header.end())
      s.timestamp.columns = {"timestamp"};
    else if (std::find(header.begin(), header.end(), "t") != header.end())
      s.timestamp.columns = {"t"};
    else
      throw ConfigError("no timestamp column; pass --timestamp-cols");
  }
  s.timestamp.step = o.step > 0 ? o.step : 1;
  auto listed = [](const std::vector<std::string>& v, const std::string& name) {
    return std::find(v.begin(), v.end(), name) != v.end();
  };
  for (const auto& name : o.categorical)
    if (!listed(header, name)) throw SchemaError("missing column '" + name + "'");
  for (const auto& name : header) {
    if (listed(s.timestamp.columns, name) || listed(o.drop, name)) continue;
    s.columns.push_back({name, listed(o.categorical, name) ? ColumnKind::Categorical
                                                           : ColumnKind::Continuous});
  }
  return s;
}

std::string pipeline_key(const Schema& schema, const PipelineConfig& pc) {
  json j = {{"schema", to_json(schema)},
            {"targets", pc.targets},
            {"lookback", pc.lookback},
            {"horizon", pc.horizon},
            {"train_fraction", pc.train_fraction},
            {"impute", to_string(pc.impute)}};
  return j.dump();
}

std::string loss_curves_csv(const TrainReport& r) {
  std::ostringstream os;
  os << "epoch,disc_loss,disc_accuracy,gen_loss";
  for (const auto& v : r.variables) os << ",forecast_loss_" << v;
  os << '\n';
  for (const auto& e : r.epochs) {
    os << e.epoch << ',' << optional_cell(e.disc_loss) << ',' << optional_cell(e.disc_accuracy)
       << ',' << optional_cell(e.gen_loss);
    for (double l : e.forecast_loss) os << ',' << format_number(l);
    os << '\n';
  }
  return os.str();
}

std::string trace_csv(const WindowedDataset& ds, const Tensor& pred_scaled) {
  const Scaler scaler = ds.target_scaler();
  const std::size_t d = ds.num_targets();
  std::ostringstream os;
  os << "window,target_row";
  for (const auto& v : ds.target_names()) os << ",target_" << v << ",forecast_" << v;
  os << '\n';
  auto p = pred_scaled.values();
  for (std::size_t j = 0; j < ds.size(); ++j) {
    os << j << ',' << ds.target_row(j);
    for (std::size_t k = 0; k < d; ++k) {
      const auto& cs = scaler.columns()[k];
      os << ',' << format_number(cs.inverse(ds.target(j, k))) << ','
         << format_number(cs.inverse(p[j * d + k]));
    }
    os << '\n';
  }
  return os.str();
}

std::string mse_csv(const EvalResult& r) {
  std::ostringstream os;
  os << "variable,mse,mae,mse_scaled\n";
  for (std::size_t k = 0; k < r.variables.size(); ++k)
    os << r.variables[k] << ',' << format_number(r.mse[k]) << ',' << format_number(r.mae[k]) << ','
       << format_number(r.mse_scaled[k]) << '\n';
  return os.str();
}

std::string correlation_csv(const EvalResult& r) {
  std::ostringstream os;
  os << "source,variable";
  for (const auto& v : r.variables) os << ',' << v;
  os << '\n';
  auto emit = [&](const char* label, const CorrelationMatrix& c) {
    for (std::size_t i = 0; i < c.d; ++i) {
      os << label << ',' << r.variables[i];
      for (std::size_t j = 0; j < c.d; ++j) os << ',' << format_number(c.at(i, j));
      os << '\n';
    }
  };
  emit("forecast", r.corr_pred);
  emit("target", r.corr_true);
  return os.str();
}

std::string toml_list(const std::vector<std::string>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + json(v[i]).dump();
  return s + "]";
}

// Resolved options in the same TOML form --config accepts.
std::string effective_config(const TrainOptions& o) {
  std::ostringstream os;
  os << "[train]\n";
  auto str = [&](const char* key, const std::string& v) {
    if (!v.empty()) os << key << " = " << json(v).dump() << '\n';
  };
  auto list = [&](const char* key, const std::vector<std::string>& v) {
    if (!v.empty()) os << key << " = " << toml_list(v) << '\n';
  };
  str("system", o.system);
  str("data", o.data);
  str("synth", o.synth);
  str("profile", o.profile);
  list("timestamp-cols", o.timestamp_cols);
  if (o.step > 0) os << "step = " << o.step << '\n';
  list("categorical", o.categorical);
  list("targets", o.targets);
  list("drop", o.drop);
  str("impute", o.impute);
  os << "lookback = " << o.lookback << '\n';
  os << "layers = " << o.layers << '\n';
  os << "units = " << o.units << '\n';
  if (!o.disc_hidden.empty()) {
    os << "disc-hidden = [";
    for (std::size_t i = 0; i < o.disc_hidden.size(); ++i) os << (i ? ", " : "") << o.disc_hidden[i];
    os << "]\n";
  }
  os << "train-fraction = " << format_number(o.train_fraction) << '\n';
  os << "epochs = " << o.train.epochs << '\n';
  os << "batch-size = " << o.train.batch_size << '\n';
  os << "lr-forecast = " << format_number(o.train.lr_forecast) << '\n';
  os << "lr-disc = " << format_number(o.train.lr_disc) << '\n';
  os << "lr-gen = " << format_number(o.train.lr_gen) << '\n';
  str("optimizer", o.optimizer);
  os << "disc-steps = " << o.train.disc_steps_per_batch << '\n';
  os << "gen-steps = " << o.train.gen_steps_per_batch << '\n';
  os << "lambda-adv = " << format_number(o.train.lambda_adv) << '\n';
  str("gen-loss", o.generator_loss);
  os << "seed = " << o.train.seed << '\n';
  return os.str();
}

int cmd_train(TrainOptions o, const std::string& config_echo, std::ostream& out) {
  if (o.data.empty() == o.synth.empty())
    throw ConfigError("give exactly one of --data or --synth");
  if (o.out.empty()) throw ConfigError("--out is required");
  if (o.system != "adversarial" && o.system != "multi_output" && o.system != "parallel")
    throw ConfigError("unknown system '" + o.system + "'");
  o.train.optimizer = parse_optimizer_kind(o.optimizer);
  o.train.generator_loss = parse_generator_loss(o.generator_loss);
  o.train.validate();
  if (o.layers == 0 || o.units == 0) throw ConfigError("--layers and --units must be positive");
  const ImputePolicy impute_policy = parse_impute_policy(o.impute);

  const fs::path out_dir(o.out);
  fs::create_directories(out_dir);

  fs::path csv;
  if (!o.synth.empty()) {
    const CoupledProcessSpec spec = parse_synth_spec(o.synth);
    csv = out_dir / "synth.csv";
    write_csv(csv, generate(spec).frame);
    if (o.timestamp_cols.empty()) o.timestamp_cols = {"t"};
    if (o.step == 0) o.step = 1;
  } else {
    csv = o.data;
  }

  const Schema schema = build_schema(o, csv);
  PipelineConfig pc;
  pc.lookback = o.lookback;
  pc.train_fraction = o.train_fraction;
  pc.impute = impute_policy;
  pc.targets = o.targets;
  if (pc.targets.empty())
    for (const auto& c : schema.columns)
      if (c.kind != ColumnKind::Categorical) pc.targets.push_back(c.name);

  const std::string bytes = read_file(csv);
  const std::string hash = dataset_hash(bytes, pipeline_key(schema, pc));
  std::optional<PreparedData> prepared;
  LoadStats load_stats;
  fs::path cache_file;
  if (!o.cache_dir.empty()) {
    fs::create_directories(o.cache_dir);
    cache_file = fs::path(o.cache_dir) / (hash + ".mwd");
    if (fs::exists(cache_file)) prepared = load_prepared(cache_file);
  }
  if (!prepared) {
    TimeSeriesFrame frame = parse_csv(bytes, schema);
    load_stats = frame.stats;
    prepared = prepare(std::move(frame), schema, pc);
    if (!cache_file.empty()) save_prepared(cache_file, *prepared);
  }
  const WindowedDataset& train_set = prepared->train;
  const WindowedDataset& test_set = prepared->test;
  const std::size_t d = train_set.num_targets();
  const std::size_t f = train_set.num_features();
  const std::uint64_t seed = o.train.seed;

  ForecasterSpec base;
  base.input_size = f;
  base.hidden_sizes.assign(o.layers, o.units);

  Checkpoint ckpt;
  ckpt.system = o.system;
  ckpt.pipeline = prepared->meta;
  std::optional<DiscriminatorModel> disc;
  if (o.system == "multi_output") {
    ForecasterSpec s = base;
    s.out = d;
    ckpt.forecasters.push_back(init_forecaster(s, derive_seed(seed, "multi_output")));
  } else {
    for (std::size_t i = 0; i < d; ++i) {
      ForecasterSpec s = base;
      s.target_index = i;
      ckpt.forecasters.push_back(init_forecaster(s, derive_seed(seed, "forecaster", i)));
    }
    if (o.system == "adversarial") {
      DiscriminatorSpec ds = DiscriminatorSpec::defaults_for(d);
      if (!o.disc_hidden.empty()) ds.hidden_sizes = o.disc_hidden;
      disc = init_discriminator(ds, derive_seed(seed, "discriminator"));
    }
  }

  TrainReport report;
  int code = kOk;
  std::string diagnostic;
  try {
    if (o.system == "multi_output")
      report = train_multi_output(ckpt.forecasters[0], train_set, test_set, o.train);
    else if (o.system == "parallel")
      report = train_parallel_single(ckpt.forecasters, train_set, test_set, o.train);
    else
      report = train(ckpt.forecasters, &*disc, train_set, test_set, o.train);
  } catch (const DivergenceError& e) {
    report = e.partial_report();
    code = kDivergence;
    diagnostic = std::string("divergence: ") + e.what();
  }
  ckpt.discriminator = disc;

  const Tensor train_pred = predict(ckpt.forecasters, train_set);
  const Tensor test_pred = predict(ckpt.forecasters, test_set);
  const EvalResult test_eval = evaluate(test_pred, test_set, disc ? &*disc : nullptr);
  const EvalResult train_eval = evaluate(train_pred, train_set, disc ? &*disc : nullptr);

  json summary = report.summary();
  summary["dataset_hash"] = hash;
  summary["data"] = {{"source", o.synth.empty() ? o.data : "synth:" + o.synth},
                     {"data_lines", load_stats.data_lines},
                     {"rows_rejected", load_stats.rows_rejected},
                     {"rows_inserted", load_stats.rows_inserted},
                     {"train_windows", train_set.size()},
                     {"test_windows", test_set.size()},
                     {"features", train_set.feature_names()}};
  summary["architecture"] = {{"lookback", o.lookback}, {"layers", o.layers}, {"units", o.units}};
  summary["eval"] = to_json(test_eval);
  summary["eval_train"] = to_json(train_eval);
  if (code == kDivergence) summary["diverged"] = diagnostic;

  save_checkpoint(out_dir / "checkpoint.matsf", ckpt);
  write_text(out_dir / "config.toml", config_echo);
  write_text(out_dir / "epochs.jsonl", report.epochs_jsonl());
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  write_text(out_dir / "loss_curves.csv", loss_curves_csv(report));
  write_text(out_dir / "trace_train.csv", trace_csv(train_set, train_pred));
  write_text(out_dir / "trace_test.csv", trace_csv(test_set, test_pred));
  write_text(out_dir / "mse_per_variable.csv", mse_csv(test_eval));
  write_text(out_dir / "correlation.csv", correlation_csv(test_eval));
  write_text(out_dir / "timing.json", json{{"wall_seconds", report.wall_seconds}}.dump() + "\n");

  if (code != kOk) {
    out << diagnostic << '\n';
    return code;
  }
  out << o.system << ": " << report.epochs.size() << " epochs, test mse";
  for (std::size_t k = 0; k < test_eval.mse.size(); ++k)
    out << ' ' << test_eval.variables[k] << '=' << format_number(test_eval.mse[k]);
  out << ", joint gap " << format_number(test_eval.gap) << '\n';
  return kOk;
}

int cmd_compare(const std::vector<std::string>& runs, const std::string& out_dir,
                std::ostream& out) {
  if (runs.size() < 2) throw ConfigError("compare needs at least two run directories");
  std::vector<std::pair<std::string, EvalResult>> results;
  std::string hash;
  std::map<std::string, int> seen;
  for (const auto& dir : runs) {
    const json summary = read_json(fs::path(dir) / "summary.json");
    const std::string h = summary.at("dataset_hash").get<std::string>();
    if (hash.empty()) hash = h;
    if (h != hash)
      throw InputError("run '" + dir + "' was trained on a different dataset (hash mismatch)");
    std::string name = summary.at("system").get<std::string>();
    if (seen[name]++) name += "@" + fs::path(dir).filename().string();
    results.emplace_back(name, eval_result_from_json(summary.at("eval")));
  }
  const ComparisonTable table = compare_systems(results);
  out << table.to_text();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "compare.txt", table.to_text());
    write_text(fs::path(out_dir) / "compare_mse.csv", table.mse_csv());
    write_text(fs::path(out_dir) / "compare_gap.csv", table.gap_csv());
  }
  return kOk;
}

int cmd_forecast(const std::string& checkpoint_path, const std::string& input, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const PipelineMeta& meta = ckpt.pipeline;
  TimeSeriesFrame frame = load_csv(input, meta.schema);
  if (frame.rows() < meta.lookback)
    throw InputError("window has " + std::to_string(frame.rows()) + " rows, checkpoint needs " +
                     std::to_string(meta.lookback));
  const std::vector<double> matrix = replay_pipeline(std::move(frame), meta);
  const std::size_t f = meta.feature_names.size();
  const std::size_t rows = matrix.size() / f;
  std::vector<double> window(matrix.end() - static_cast<std::ptrdiff_t>(meta.lookback * f),
                             matrix.end());
  (void)rows;
  const Tensor input_window = Tensor::from({1, meta.lookback, f}, std::move(window));
  const auto steps = timestep_inputs(input_window);
  const std::size_t d = meta.target_names.size();
  std::vector<double> scaled(d);
  {
    NoGradGuard no_grad;
    if (ckpt.forecasters.size() == 1 && ckpt.forecasters[0].spec.out == d &&
        !ckpt.forecasters[0].spec.target_index) {
      const Tensor y_t = forecaster_forward(ckpt.forecasters[0], steps);
      auto y = y_t.values();
      std::copy(y.begin(), y.end(), scaled.begin());
    } else {
      if (ckpt.forecasters.size() != d) throw InputError("checkpoint forecaster count mismatch");
      for (std::size_t k = 0; k < d; ++k)
        scaled[k] = forecaster_forward(ckpt.forecasters[k], steps).item();
    }
  }
  const Scaler scaler = meta.scaler.subset(meta.target_names);
  for (std::size_t k = 0; k < d; ++k)
    out << meta.target_names[k] << ' ' << format_number(scaler.columns()[k].inverse(scaled[k]))
        << '\n';
  return kOk;
}

int cmd_synth(const std::string& spec_text, const std::string& path, std::ostream& out) {
  const CoupledProcessSpec spec = parse_synth_spec(spec_text);
  write_csv(path, generate(spec).frame);
  out << "wrote " << spec.length << " rows of " << spec.d << " variables to " << path << '\n';
  return kOk;
}

// `train --config f` is accepted; the file is read at top level where its
// [train] table binds to the subcommand.
std::vector<std::string> hoist_config(const std::vector<std::string>& args) {
  std::vector<std::string> front, rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      front.push_back(args[i]);
      front.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      front.push_back(args[i]);
    } else {
      rest.push_back(args[i]);
    }
  }
  front.insert(front.end(), rest.begin(), rest.end());
  return front;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-variable adversarial time-series forecasting"};
  app.name("matsf");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file with a [train] table; flags override it");

  TrainOptions o;
  auto* train_cmd = app.add_subcommand("train", "Train a system and write its artifacts");
  train_cmd->add_option("--system", o.system, "adversarial | multi_output | parallel")
      ->check(CLI::IsMember({"adversarial", "multi_output", "parallel"}));
  train_cmd->add_option("--data", o.data, "Input CSV");
  train_cmd->add_option("--synth", o.synth, "Synthetic process spec, e.g. d=3,length=5000");
  auto* profile_opt = train_cmd->add_option("--profile", o.profile, "airquality | industrial")
                          ->check(CLI::IsMember({"airquality", "industrial"}));
  auto* ts_opt = train_cmd->add_option("--timestamp-cols", o.timestamp_cols)->delimiter(',');
  auto* step_opt = train_cmd->add_option("--step", o.step, "Time step between rows");
  auto* cat_opt = train_cmd->add_option("--categorical", o.categorical)->delimiter(',');
  auto* targets_opt = train_cmd->add_option("--targets", o.targets)->delimiter(',');
  auto* drop_opt = train_cmd->add_option("--drop", o.drop, "Columns to ignore")->delimiter(',');
  train_cmd->add_option("--impute", o.impute, "drop_leading | forward_fill");
  auto* lookback_opt = train_cmd->add_option("--lookback", o.lookback);
  auto* layers_opt = train_cmd->add_option("--layers", o.layers);
  auto* units_opt = train_cmd->add_option("--units", o.units);
  train_cmd->add_option("--disc-hidden", o.disc_hidden)->delimiter(',');
  train_cmd->add_option("--train-fraction", o.train_fraction);
  train_cmd->add_option("--epochs", o.train.epochs);
  train_cmd->add_option("--batch-size", o.train.batch_size);
  train_cmd->add_option("--lr-forecast", o.train.lr_forecast);
  train_cmd->add_option("--lr-disc", o.train.lr_disc);
  train_cmd->add_option("--lr-gen", o.train.lr_gen);
  train_cmd->add_option("--optimizer", o.optimizer, "sgd | adam");
  train_cmd->add_option("--disc-steps", o.train.disc_steps_per_batch);
  train_cmd->add_option("--gen-steps", o.train.gen_steps_per_batch);
  train_cmd->add_option("--lambda-adv", o.train.lambda_adv);
  train_cmd->add_option("--gen-loss", o.generator_loss, "non_saturating | saturating");
  auto* seed_opt = train_cmd->add_option("--seed", o.train.seed);
  train_cmd->add_option("--out", o.out, "Output directory");
  train_cmd->add_option("--cache-dir", o.cache_dir, "Reuse prepared windows keyed by content hash");

  std::vector<std::string> compare_runs;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Compare trained runs on one dataset");
  compare_cmd->add_option("--runs", compare_runs, "Run directories")->delimiter(',');
  compare_cmd->add_option("--out", compare_out, "Directory for table and plot CSVs");

  std::string ckpt_path, window_path;
  auto* forecast_cmd = app.add_subcommand("forecast", "Forecast the step after a window");
  forecast_cmd->add_option("--checkpoint", ckpt_path)->required();
  forecast_cmd->add_option("--input", window_path, "CSV holding at least lookback rows")->required();

  std::string synth_spec, synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic coupled series as CSV");
  synth_cmd->add_option("--spec", synth_spec)->required();
  synth_cmd->add_option("--out", synth_out)->required();

  try {
    std::vector<std::string> reversed = hoist_config(args);
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (train_cmd->parsed()) {
      if (!o.profile.empty()) {
        const Profile& p = profiles().at(o.profile);
        if (!lookback_opt->count()) o.lookback = p.lookback;
        if (!layers_opt->count()) o.layers = p.layers;
        if (!units_opt->count()) o.units = p.units;
        if (!ts_opt->count()) o.timestamp_cols = p.timestamp_cols;
        if (!step_opt->count()) o.step = p.step;
        if (!cat_opt->count()) o.categorical = p.categorical;
        if (!targets_opt->count()) o.targets = p.targets;
        if (!drop_opt->count()) o.drop = p.drop;
      }
      (void)profile_opt;
      if (!seed_opt->count()) {
        if (const char* env = std::getenv("MATSF_SEED")) {
          try {
            o.train.seed = std::stoull(env);
          } catch (const std::exception&) {
            throw ConfigError(std::string("MATSF_SEED is not an integer: ") + env);
          }
        }
      }
      return cmd_train(o, effective_config(o), out);
    }
    if (compare_cmd->parsed()) return cmd_compare(compare_runs, compare_out, out);
    if (forecast_cmd->parsed()) return cmd_forecast(ckpt_path, window_path, out);
    if (synth_cmd->parsed()) return cmd_synth(synth_spec, synth_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DimensionError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace matsf::cli
