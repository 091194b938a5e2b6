#pragma once

// CSV ingestion and the supervised-windowing pipeline.
//
//   load_csv → impute → encode_categorical → scale (fit on training rows)
//            → make_windows → split
//
// `prepare` runs the whole chain and records everything needed to replay it
// on new data (PipelineMeta) so a checkpoint can de-normalize its forecasts.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "matsf/tensor.hpp"

namespace matsf {

enum class ColumnKind { Continuous, Categorical, Integer };

std::string to_string(ColumnKind kind);
ColumnKind parse_column_kind(const std::string& text);

struct ColumnDecl {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
};

/// How a row's time is read. One column holds either an integer tick or a
/// calendar stamp ("YYYY-MM-DD[ HH:MM[:SS]]"); three or four columns are read
/// as year, month, day[, hour]. Calendar stamps are in seconds, so `step` is
/// in seconds for them and in ticks otherwise.
struct TimestampSpec {
  std::vector<std::string> columns;
  std::int64_t step = 1;
};

struct Schema {
  TimestampSpec timestamp;
  std::vector<ColumnDecl> columns;
  std::string missing_token = "NA";
};

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  bool indicator = false;  // one-hot column produced by encode_categorical
  std::vector<double> values;          // categorical: index into vocabulary
  std::vector<std::uint8_t> missing;   // 1 where the cell was missing
  std::vector<std::string> vocabulary; // categorical only, sorted
};

struct LoadStats {
  std::size_t data_lines = 0;     // non-empty lines after the header
  std::size_t rows_rejected = 0;  // unparseable timestamps
  std::size_t rows_inserted = 0;  // placeholder rows for whole-step gaps
};

struct TimeSeriesFrame {
  std::vector<std::int64_t> timestamps;
  std::int64_t step = 1;
  std::vector<Column> columns;
  LoadStats stats;

  std::size_t rows() const noexcept { return timestamps.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  const Column& column(std::string_view name) const;
  Column& column(std::string_view name);
  std::vector<std::string> column_names() const;
  bool has_missing() const;
  /// Throws InputError if time is not strictly increasing by `step` or a
  /// column length disagrees with the row count.
  void validate() const;
};

std::vector<std::string> read_csv_header(const std::filesystem::path& path);
TimeSeriesFrame parse_csv(std::string_view text, const Schema& schema);
TimeSeriesFrame load_csv(const std::filesystem::path& path, const Schema& schema);
/// Writes a frame with an integer tick column named `t`.
void write_csv(const std::filesystem::path& path, const TimeSeriesFrame& frame);

enum class ImputePolicy { DropLeading, ForwardFill };
std::string to_string(ImputePolicy policy);
ImputePolicy parse_impute_policy(const std::string& text);

/// DropLeading removes the initial rows whose target columns are missing;
/// both policies then forward-fill interior gaps.
TimeSeriesFrame impute(TimeSeriesFrame frame, ImputePolicy policy,
                       std::span<const std::string> target_columns);

/// Replaces a categorical column by one indicator column per category,
/// named "<column>_<category>". With `vocabulary`, categories outside it are
/// an EncodingError; otherwise the column's own vocabulary is used.
TimeSeriesFrame encode_categorical(TimeSeriesFrame frame, const std::string& column,
                                   const std::vector<std::string>* vocabulary = nullptr);

struct ColumnScale {
  std::string name;
  double min = 0.0;
  double max = 1.0;

  double transform(double x) const noexcept {
    return max == min ? 0.0 : (x - min) / (max - min);
  }
  double inverse(double y) const noexcept { return min + y * (max - min); }
};

class Scaler {
 public:
  Scaler() = default;
  explicit Scaler(std::vector<ColumnScale> columns) : columns_(std::move(columns)) {}

  const std::vector<ColumnScale>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return columns_.size(); }
  const ColumnScale* find(std::string_view name) const;
  /// Scaler restricted to `names`, in that order; identity for unknown names.
  Scaler subset(std::span<const std::string> names) const;
  TimeSeriesFrame transform(TimeSeriesFrame frame) const;
  TimeSeriesFrame inverse_transform(TimeSeriesFrame frame) const;

 private:
  std::vector<ColumnScale> columns_;
};

/// Min-max scaling of every non-indicator column, fitted on rows
/// [0, train_rows). Constant columns map to 0.
std::pair<TimeSeriesFrame, Scaler> scale_fit_rows(TimeSeriesFrame frame, std::size_t train_rows);
/// Same, fitted on the first floor(train_fraction · rows) rows; 0 < fraction < 1.
std::pair<TimeSeriesFrame, Scaler> scale_fit_transform(TimeSeriesFrame frame,
                                                       double train_fraction);

struct Batch {
  std::vector<Tensor> steps;  // lookback tensors of [B × features]
  Tensor targets;             // [B × d]
};

/// Supervised pairs over a shared row-major feature matrix. Window j covers
/// rows [start_j, start_j + lookback); its target is row
/// start_j + lookback + horizon − 1 restricted to the target columns.
class WindowedDataset {
 public:
  WindowedDataset() = default;
  WindowedDataset(std::shared_ptr<const std::vector<double>> matrix, std::size_t num_features,
                  std::size_t lookback, std::size_t horizon, std::vector<std::size_t> starts,
                  std::vector<std::size_t> target_features, std::vector<std::string> feature_names,
                  std::vector<std::string> target_names, Scaler scaler,
                  std::size_t split_boundary);

  std::size_t size() const noexcept { return starts_.size(); }
  bool empty() const noexcept { return starts_.empty(); }
  std::size_t lookback() const noexcept { return lookback_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t num_features() const noexcept { return num_features_; }
  std::size_t num_targets() const noexcept { return target_features_.size(); }

  /// lookback × features values of window j, row-major.
  std::span<const double> window(std::size_t j) const;
  double target(std::size_t j, std::size_t var) const;
  std::size_t window_start(std::size_t j) const { return starts_.at(j); }
  std::size_t target_row(std::size_t j) const { return starts_.at(j) + lookback_ + horizon_ - 1; }

  Tensor windows() const;  // [N × L × F]
  Tensor targets() const;  // [N × d]
  Batch gather(std::span<const std::size_t> indices) const;
  WindowedDataset subset(std::size_t begin, std::size_t end) const;

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<std::string>& target_names() const noexcept { return target_names_; }
  const std::vector<std::size_t>& target_features() const noexcept { return target_features_; }
  const Scaler& scaler() const noexcept { return scaler_; }
  /// Scaler over the target columns, in target order.
  Scaler target_scaler() const { return scaler_.subset(target_names_); }
  /// Index of the first test window in the unsplit dataset.
  std::size_t split_boundary() const noexcept { return split_boundary_; }
  void set_scaler(Scaler s) { scaler_ = std::move(s); }
  void set_split_boundary(std::size_t b) { split_boundary_ = b; }

  const std::vector<double>& matrix() const { return *matrix_; }
  const std::vector<std::size_t>& starts() const noexcept { return starts_; }

 private:
  std::shared_ptr<const std::vector<double>> matrix_;
  std::size_t num_features_ = 0;
  std::size_t lookback_ = 0;
  std::size_t horizon_ = 1;
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> target_features_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> target_names_;
  Scaler scaler_;
  std::size_t split_boundary_ = 0;
};

/// Every frame column becomes a feature. The frame must hold no missing cells.
WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t lookback,
                             std::span<const std::string> target_columns,
                             std::size_t horizon = 1);

/// Number of training windows for a chronological split of n windows.
std::size_t train_count(std::size_t n, double train_fraction);

/// Chronological split; both halves must be non-empty.
std::pair<WindowedDataset, WindowedDataset> split(const WindowedDataset& dataset,
                                                  double train_fraction);

struct PipelineConfig {
  std::vector<std::string> targets;
  std::size_t lookback = 24;
  std::size_t horizon = 1;
  double train_fraction = 0.8;
  ImputePolicy impute = ImputePolicy::DropLeading;
};

/// What it takes to replay the pipeline on unseen rows.
struct PipelineMeta {
  Schema schema;
  std::vector<std::string> feature_names;
  std::vector<std::string> target_names;
  std::vector<std::pair<std::string, std::vector<std::string>>> vocabularies;
  std::size_t lookback = 0;
  std::size_t horizon = 1;
  Scaler scaler;
};

struct PreparedData {
  WindowedDataset train;
  WindowedDataset test;
  PipelineMeta meta;
};

/// Full pipeline. The scaler is fitted on exactly the rows touched by the
/// training windows and their targets.
PreparedData prepare(TimeSeriesFrame frame, const Schema& schema, const PipelineConfig& config);

/// Applies a fitted pipeline (forward-fill, stored vocabularies, stored
/// scaler) to raw rows and returns the feature matrix, row-major.
std::vector<double> replay_pipeline(TimeSeriesFrame frame, const PipelineMeta& meta);

nlohmann::json to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineMeta& meta);
PipelineMeta pipeline_meta_from_json(const nlohmann::json& j);

/// Hex SHA-256 of the input bytes followed by the configuration text.
std::string dataset_hash(std::string_view input_bytes, std::string_view config_text);

std::string read_file(const std::filesystem::path& path);

/// Binary cache of a prepared dataset.
void save_prepared(const std::filesystem::path& path, const PreparedData& data);
PreparedData load_prepared(const std::filesystem::path& path);

}  // namespace matsf
