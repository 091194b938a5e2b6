#include "matsf/data.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "matsf/error.hpp"

namespace matsf {

namespace {

constexpr std::size_t kMaxInsertedRows = 1'000'000;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

/// Splits one CSV record; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.emplace_back(trim(field));
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> calendar_seconds(int y, int mo, int d, int h, int mi, int s) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * 86400 + h * 3600 + mi * 60 + s;
}

std::optional<std::int64_t> parse_single_stamp(std::string_view field) {
  if (auto tick = parse_number<std::int64_t>(field)) return tick;
  const std::string s(trim(field));
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  char sep = 0;
  const int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (n == 3 || (n >= 6 && (sep == ' ' || sep == 'T')))
    return calendar_seconds(y, mo, d, h, mi, sec);
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool is_missing(std::string_view field, const std::string& token) {
  return field.empty() || field == token;
}

}  // namespace

// ---- kinds & frame ----------------------------------------------------------

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Integer: return "integer";
  }
  return "continuous";
}

ColumnKind parse_column_kind(const std::string& text) {
  if (text == "continuous") return ColumnKind::Continuous;
  if (text == "categorical") return ColumnKind::Categorical;
  if (text == "integer") return ColumnKind::Integer;
  throw ConfigError("unknown column kind '" + text + "'");
}

std::optional<std::size_t> TimeSeriesFrame::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  return std::nullopt;
}

const Column& TimeSeriesFrame::column(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw SchemaError("no column named '" + std::string(name) + "'");
  return columns[*i];
}

Column& TimeSeriesFrame::column(std::string_view name) {
  auto i = index_of(name);
  if (!i) throw SchemaError("no column named '" + std::string(name) + "'");
  return columns[*i];
}

std::vector<std::string> TimeSeriesFrame::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

bool TimeSeriesFrame::has_missing() const {
  for (const auto& c : columns)
    for (auto m : c.missing)
      if (m) return true;
  return false;
}

void TimeSeriesFrame::validate() const {
  if (step <= 0) throw InputError("time step must be positive");
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] - timestamps[i - 1] != step) {
      throw InputError("row " + std::to_string(i) + " breaks the constant time step " +
                       std::to_string(step));
    }
  }
  for (const auto& c : columns) {
    if (c.values.size() != rows() || c.missing.size() != rows())
      throw InputError("column '" + c.name + "' length disagrees with row count");
  }
}

// ---- CSV --------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw InputError("'" + path.string() + "' is empty");
  return split_record(line);
}

TimeSeriesFrame parse_csv(std::string_view text, const Schema& schema) {
  const auto lines = split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw InputError("CSV input is empty");

  const auto header = split_record(lines[first]);
  auto find = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  const auto& ts_cols = schema.timestamp.columns;
  if (ts_cols.empty() || ts_cols.size() == 2 || ts_cols.size() > 4)
    throw ConfigError("timestamp needs 1 column or year,month,day[,hour] columns");
  if (schema.timestamp.step <= 0) throw ConfigError("timestamp step must be positive");
  std::vector<std::size_t> ts_idx;
  for (const auto& c : ts_cols) ts_idx.push_back(find(c));
  std::vector<std::size_t> col_idx;
  for (const auto& c : schema.columns) col_idx.push_back(find(c.name));

  const std::size_t ncol = schema.columns.size();
  std::vector<std::int64_t> stamps;
  std::vector<std::vector<double>> numeric(ncol);
  std::vector<std::vector<std::string>> raw(ncol);
  std::vector<std::vector<std::uint8_t>> missing(ncol);
  LoadStats stats;

  for (std::size_t ln = first + 1; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    ++stats.data_lines;
    const auto fields = split_record(lines[ln]);
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(ln + 1) + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()));
    }
    std::optional<std::int64_t> stamp;
    if (ts_idx.size() == 1) {
      stamp = parse_single_stamp(fields[ts_idx[0]]);
    } else {
      int parts[4] = {0, 0, 0, 0};
      bool ok = true;
      for (std::size_t k = 0; k < ts_idx.size() && ok; ++k) {
        auto v = parse_number<int>(fields[ts_idx[k]]);
        ok = v.has_value();
        if (ok) parts[k] = *v;
      }
      if (ok) stamp = calendar_seconds(parts[0], parts[1], parts[2], parts[3], 0, 0);
    }
    if (!stamp) {
      ++stats.rows_rejected;
      continue;
    }
    stamps.push_back(*stamp);
    for (std::size_t c = 0; c < ncol; ++c) {
      const std::string& f = fields[col_idx[c]];
      const bool miss = is_missing(f, schema.missing_token);
      missing[c].push_back(miss ? 1 : 0);
      if (schema.columns[c].kind == ColumnKind::Categorical) {
        raw[c].push_back(miss ? std::string() : f);
        numeric[c].push_back(0.0);
        continue;
      }
      double v = 0.0;
      if (!miss) {
        auto parsed = parse_number<double>(f);
        if (!parsed) {
          throw InputError("line " + std::to_string(ln + 1) + ", column '" +
                           schema.columns[c].name + "': cannot parse '" + f + "'");
        }
        v = *parsed;
      }
      numeric[c].push_back(v);
    }
  }
  if (stamps.empty()) throw InputError("CSV input has no usable rows");

  // Whole-step gaps become all-missing placeholder rows.
  const std::int64_t step = schema.timestamp.step;
  std::vector<std::size_t> source;  // frame row -> parsed row, or npos
  std::vector<std::int64_t> frame_stamps;
  constexpr auto npos = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    if (i > 0) {
      const std::int64_t delta = stamps[i] - stamps[i - 1];
      if (delta <= 0)
        throw InputError("timestamps are not strictly increasing at data row " + std::to_string(i));
      if (delta % step != 0)
        throw InputError("gap of " + std::to_string(delta) + " at data row " + std::to_string(i) +
                         " is not a multiple of the step " + std::to_string(step));
      for (std::int64_t t = stamps[i - 1] + step; t < stamps[i]; t += step) {
        if (++stats.rows_inserted > kMaxInsertedRows)
          throw InputError("time gaps too large to fill");
        frame_stamps.push_back(t);
        source.push_back(npos);
      }
    }
    frame_stamps.push_back(stamps[i]);
    source.push_back(i);
  }

  TimeSeriesFrame frame;
  frame.timestamps = std::move(frame_stamps);
  frame.step = step;
  frame.stats = stats;
  for (std::size_t c = 0; c < ncol; ++c) {
    Column col;
    col.name = schema.columns[c].name;
    col.kind = schema.columns[c].kind;
    std::map<std::string, std::size_t> code;
    if (col.kind == ColumnKind::Categorical) {
      std::set<std::string> vocab;
      for (std::size_t i = 0; i < raw[c].size(); ++i)
        if (!missing[c][i]) vocab.insert(raw[c][i]);
      col.vocabulary.assign(vocab.begin(), vocab.end());
      for (std::size_t k = 0; k < col.vocabulary.size(); ++k) code[col.vocabulary[k]] = k;
    }
    col.values.reserve(source.size());
    col.missing.reserve(source.size());
    for (auto s : source) {
      if (s == npos) {
        col.values.push_back(0.0);
        col.missing.push_back(1);
      } else if (col.kind == ColumnKind::Categorical) {
        col.values.push_back(missing[c][s] ? 0.0 : static_cast<double>(code[raw[c][s]]));
        col.missing.push_back(missing[c][s]);
      } else {
        col.values.push_back(numeric[c][s]);
        col.missing.push_back(missing[c][s]);
      }
    }
    frame.columns.push_back(std::move(col));
  }
  frame.validate();
  return frame;
}

TimeSeriesFrame load_csv(const std::filesystem::path& path, const Schema& schema) {
  return parse_csv(read_file(path), schema);
}

void write_csv(const std::filesystem::path& path, const TimeSeriesFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << 't';
  for (const auto& c : frame.columns) out << ',' << c.name;
  out << '\n';
  for (std::size_t r = 0; r < frame.rows(); ++r) {
    out << frame.timestamps[r];
    for (const auto& c : frame.columns) {
      out << ',';
      if (c.missing[r])
        out << "NA";
      else if (c.kind == ColumnKind::Categorical)
        out << c.vocabulary.at(static_cast<std::size_t>(c.values[r]));
      else
        out << format_double(c.values[r]);
    }
    out << '\n';
  }
}

// ---- imputation -------------------------------------------------------------

std::string to_string(ImputePolicy policy) {
  return policy == ImputePolicy::DropLeading ? "drop_leading" : "forward_fill";
}

ImputePolicy parse_impute_policy(const std::string& text) {
  if (text == "drop_leading") return ImputePolicy::DropLeading;
  if (text == "forward_fill") return ImputePolicy::ForwardFill;
  throw ConfigError("unknown impute policy '" + text + "'");
}

TimeSeriesFrame impute(TimeSeriesFrame frame, ImputePolicy policy,
                       std::span<const std::string> target_columns) {
  if (frame.rows() == 0) throw InputError("cannot impute an empty frame");
  if (policy == ImputePolicy::DropLeading) {
    std::vector<const Column*> targets;
    for (const auto& name : target_columns) targets.push_back(&frame.column(name));
    std::size_t first = 0;
    auto complete = [&](std::size_t r) {
      for (const Column* c : targets)
        if (c->missing[r]) return false;
      return true;
    };
    while (first < frame.rows() && !complete(first)) ++first;
    if (first == frame.rows()) throw InputError("all rows have missing target values");
    if (first > 0) {
      frame.timestamps.erase(frame.timestamps.begin(), frame.timestamps.begin() + first);
      for (auto& c : frame.columns) {
        c.values.erase(c.values.begin(), c.values.begin() + first);
        c.missing.erase(c.missing.begin(), c.missing.begin() + first);
      }
    }
  }
  for (auto& c : frame.columns) {
    std::size_t r = 0;
    while (r < c.missing.size() && c.missing[r]) ++r;
    if (r == c.missing.size()) throw InputError("column '" + c.name + "' is entirely missing");
    if (r > 0)
      throw InputError("column '" + c.name + "' has " + std::to_string(r) +
                       " leading missing rows that cannot be forward-filled");
    for (; r < c.missing.size(); ++r) {
      if (c.missing[r]) {
        c.values[r] = c.values[r - 1];
        c.missing[r] = 0;
      }
    }
  }
  return frame;
}

// ---- categorical encoding -----------------------------------------------------

TimeSeriesFrame encode_categorical(TimeSeriesFrame frame, const std::string& column,
                                   const std::vector<std::string>* vocabulary) {
  const auto idx = frame.index_of(column);
  if (!idx) throw SchemaError("no column named '" + column + "'");
  const Column src = frame.columns[*idx];
  if (src.kind != ColumnKind::Categorical)
    throw ContractError("column '" + column + "' is not categorical");
  const std::vector<std::string>& vocab = vocabulary ? *vocabulary : src.vocabulary;

  std::vector<std::size_t> remap(src.vocabulary.size());
  for (std::size_t k = 0; k < src.vocabulary.size(); ++k) {
    auto it = std::find(vocab.begin(), vocab.end(), src.vocabulary[k]);
    if (it == vocab.end())
      throw EncodingError("column '" + column + "': unseen category '" + src.vocabulary[k] + "'");
    remap[k] = static_cast<std::size_t>(it - vocab.begin());
  }

  std::vector<Column> indicators(vocab.size());
  for (std::size_t k = 0; k < vocab.size(); ++k) {
    indicators[k].name = column + "_" + vocab[k];
    indicators[k].kind = ColumnKind::Integer;
    indicators[k].indicator = true;
    indicators[k].values.assign(src.values.size(), 0.0);
    indicators[k].missing.assign(src.values.size(), 0);
  }
  for (std::size_t r = 0; r < src.values.size(); ++r) {
    if (src.missing[r])
      throw ContractError("column '" + column + "' has missing values; impute before encoding");
    indicators[remap[static_cast<std::size_t>(src.values[r])]].values[r] = 1.0;
  }
  frame.columns.erase(frame.columns.begin() + static_cast<std::ptrdiff_t>(*idx));
  frame.columns.insert(frame.columns.begin() + static_cast<std::ptrdiff_t>(*idx),
                       std::make_move_iterator(indicators.begin()),
                       std::make_move_iterator(indicators.end()));
  return frame;
}

// ---- scaling ----------------------------------------------------------------

const ColumnScale* Scaler::find(std::string_view name) const {
  for (const auto& c : columns_)
    if (c.name == name) return &c;
  return nullptr;
}

Scaler Scaler::subset(std::span<const std::string> names) const {
  std::vector<ColumnScale> out;
  for (const auto& n : names) {
    const ColumnScale* c = find(n);
    out.push_back(c ? *c : ColumnScale{n, 0.0, 1.0});
  }
  return Scaler(std::move(out));
}

TimeSeriesFrame Scaler::transform(TimeSeriesFrame frame) const {
  for (auto& col : frame.columns) {
    if (col.kind == ColumnKind::Categorical)
      throw ContractError("column '" + col.name + "' must be encoded before scaling");
    if (const ColumnScale* s = find(col.name))
      for (double& v : col.values) v = s->transform(v);
  }
  return frame;
}

TimeSeriesFrame Scaler::inverse_transform(TimeSeriesFrame frame) const {
  for (auto& col : frame.columns) {
    if (const ColumnScale* s = find(col.name))
      for (double& v : col.values) v = s->inverse(v);
  }
  return frame;
}

std::pair<TimeSeriesFrame, Scaler> scale_fit_rows(TimeSeriesFrame frame, std::size_t train_rows) {
  if (train_rows == 0 || train_rows > frame.rows())
    throw ConfigError("scaler fit needs between 1 and " + std::to_string(frame.rows()) + " rows");
  std::vector<ColumnScale> scales;
  for (const auto& col : frame.columns) {
    if (col.kind == ColumnKind::Categorical)
      throw ContractError("column '" + col.name + "' must be encoded before scaling");
    if (col.indicator) continue;
    auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.begin() +
                                                                static_cast<std::ptrdiff_t>(train_rows));
    scales.push_back({col.name, *lo, *hi});
  }
  Scaler scaler(std::move(scales));
  auto scaled = scaler.transform(std::move(frame));
  return {std::move(scaled), std::move(scaler)};
}

std::pair<TimeSeriesFrame, Scaler> scale_fit_transform(TimeSeriesFrame frame,
                                                       double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train fraction must lie in (0, 1)");
  const auto rows = std::max<std::size_t>(1, train_count(frame.rows(), train_fraction));
  return scale_fit_rows(std::move(frame), rows);
}

// ---- windows ----------------------------------------------------------------

WindowedDataset::WindowedDataset(std::shared_ptr<const std::vector<double>> matrix,
                                 std::size_t num_features, std::size_t lookback,
                                 std::size_t horizon, std::vector<std::size_t> starts,
                                 std::vector<std::size_t> target_features,
                                 std::vector<std::string> feature_names,
                                 std::vector<std::string> target_names, Scaler scaler,
                                 std::size_t split_boundary)
    : matrix_(std::move(matrix)),
      num_features_(num_features),
      lookback_(lookback),
      horizon_(horizon),
      starts_(std::move(starts)),
      target_features_(std::move(target_features)),
      feature_names_(std::move(feature_names)),
      target_names_(std::move(target_names)),
      scaler_(std::move(scaler)),
      split_boundary_(split_boundary) {}

std::span<const double> WindowedDataset::window(std::size_t j) const {
  return std::span<const double>(*matrix_).subspan(starts_.at(j) * num_features_,
                                                   lookback_ * num_features_);
}

double WindowedDataset::target(std::size_t j, std::size_t var) const {
  return (*matrix_)[target_row(j) * num_features_ + target_features_.at(var)];
}

Tensor WindowedDataset::windows() const {
  std::vector<double> v;
  v.reserve(size() * lookback_ * num_features_);
  for (std::size_t j = 0; j < size(); ++j) {
    auto w = window(j);
    v.insert(v.end(), w.begin(), w.end());
  }
  return Tensor::from({size(), lookback_, num_features_}, std::move(v));
}

Tensor WindowedDataset::targets() const {
  const std::size_t d = num_targets();
  std::vector<double> v(size() * d);
  for (std::size_t j = 0; j < size(); ++j)
    for (std::size_t k = 0; k < d; ++k) v[j * d + k] = target(j, k);
  return Tensor::from({size(), d}, std::move(v));
}

Batch WindowedDataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t b = indices.size(), f = num_features_, d = num_targets();
  if (b == 0) throw ContractError("empty batch");
  Batch batch;
  batch.steps.reserve(lookback_);
  for (std::size_t t = 0; t < lookback_; ++t) {
    std::vector<double> step(b * f);
    for (std::size_t r = 0; r < b; ++r) {
      const double* row = matrix_->data() + (starts_.at(indices[r]) + t) * f;
      std::copy_n(row, f, step.begin() + static_cast<std::ptrdiff_t>(r * f));
    }
    batch.steps.push_back(Tensor::from({b, f}, std::move(step)));
  }
  std::vector<double> tv(b * d);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t k = 0; k < d; ++k) tv[r * d + k] = target(indices[r], k);
  batch.targets = Tensor::from({b, d}, std::move(tv));
  return batch;
}

WindowedDataset WindowedDataset::subset(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw ContractError("dataset subset out of range");
  WindowedDataset out = *this;
  out.starts_.assign(starts_.begin() + static_cast<std::ptrdiff_t>(begin),
                     starts_.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t lookback,
                             std::span<const std::string> target_columns, std::size_t horizon) {
  if (lookback == 0) throw ConfigError("lookback must be at least 1");
  if (horizon == 0) throw ConfigError("horizon must be at least 1");
  if (target_columns.empty()) throw ConfigError("no target columns");
  if (frame.rows() < lookback + horizon) {
    throw InputError("frame has " + std::to_string(frame.rows()) + " rows; lookback " +
                     std::to_string(lookback) + " and horizon " + std::to_string(horizon) +
                     " need at least " + std::to_string(lookback + horizon));
  }
  const std::size_t f = frame.columns.size();
  std::vector<std::size_t> target_idx;
  for (const auto& name : target_columns) {
    auto i = frame.index_of(name);
    if (!i) throw SchemaError("target column '" + name + "' not in frame");
    target_idx.push_back(*i);
  }
  auto matrix = std::make_shared<std::vector<double>>(frame.rows() * f);
  for (std::size_t c = 0; c < f; ++c) {
    const auto& col = frame.columns[c];
    if (col.kind == ColumnKind::Categorical)
      throw ContractError("column '" + col.name + "' must be encoded before windowing");
    for (std::size_t r = 0; r < frame.rows(); ++r) {
      if (col.missing[r])
        throw ContractError("column '" + col.name + "' has missing values; impute first");
      (*matrix)[r * f + c] = col.values[r];
    }
  }
  const std::size_t n = frame.rows() - lookback - horizon + 1;
  std::vector<std::size_t> starts(n);
  for (std::size_t j = 0; j < n; ++j) starts[j] = j;
  return WindowedDataset(std::move(matrix), f, lookback, horizon, std::move(starts),
                         std::move(target_idx), frame.column_names(),
                         std::vector<std::string>(target_columns.begin(), target_columns.end()),
                         Scaler(), n);
}

std::size_t train_count(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train fraction must lie strictly between 0 and 1, got " +
                      std::to_string(train_fraction));
  return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
}

std::pair<WindowedDataset, WindowedDataset> split(const WindowedDataset& dataset,
                                                  double train_fraction) {
  const std::size_t n_train = train_count(dataset.size(), train_fraction);
  if (n_train == 0 || n_train >= dataset.size())
    throw ConfigError("split of " + std::to_string(dataset.size()) + " windows at fraction " +
                      std::to_string(train_fraction) + " leaves an empty side");
  auto train = dataset.subset(0, n_train);
  auto test = dataset.subset(n_train, dataset.size());
  train.set_split_boundary(n_train);
  test.set_split_boundary(n_train);
  return {std::move(train), std::move(test)};
}

// ---- full pipeline ----------------------------------------------------------

PreparedData prepare(TimeSeriesFrame frame, const Schema& schema, const PipelineConfig& config) {
  if (config.lookback == 0) throw ConfigError("lookback must be at least 1");
  if (config.targets.empty()) throw ConfigError("no target columns");
  for (const auto& t : config.targets) {
    if (frame.column(t).kind == ColumnKind::Categorical)
      throw ConfigError("categorical target '" + t + "' is not supported");
  }
  frame = impute(std::move(frame), config.impute, config.targets);

  PipelineMeta meta;
  meta.schema = schema;
  meta.target_names = config.targets;
  meta.lookback = config.lookback;
  meta.horizon = config.horizon;
  for (const auto& name : frame.column_names()) {
    const Column& col = frame.column(name);
    if (col.kind == ColumnKind::Categorical) {
      meta.vocabularies.emplace_back(name, col.vocabulary);
      frame = encode_categorical(std::move(frame), name);
    }
  }

  const std::size_t span = config.lookback + config.horizon;
  if (frame.rows() < span)
    throw InputError("series of " + std::to_string(frame.rows()) +
                     " rows is too short for lookback " + std::to_string(config.lookback));
  const std::size_t n = frame.rows() - span + 1;
  const std::size_t n_train = train_count(n, config.train_fraction);
  if (n_train == 0 || n_train >= n)
    throw ConfigError("train fraction " + std::to_string(config.train_fraction) + " over " +
                      std::to_string(n) + " windows leaves an empty split");

  auto [scaled, scaler] = scale_fit_rows(std::move(frame), n_train + span - 1);
  auto all = make_windows(scaled, config.lookback, config.targets, config.horizon);
  all.set_scaler(scaler);
  auto [train, test] = split(all, config.train_fraction);
  meta.feature_names = all.feature_names();
  meta.scaler = std::move(scaler);
  return {std::move(train), std::move(test), std::move(meta)};
}

std::vector<double> replay_pipeline(TimeSeriesFrame frame, const PipelineMeta& meta) {
  frame = impute(std::move(frame), ImputePolicy::ForwardFill, {});
  for (const auto& [name, vocab] : meta.vocabularies) {
    frame = encode_categorical(std::move(frame), name, &vocab);
  }
  frame = meta.scaler.transform(std::move(frame));
  const std::size_t f = meta.feature_names.size();
  std::vector<double> out(frame.rows() * f);
  for (std::size_t k = 0; k < f; ++k) {
    const Column& col = frame.column(meta.feature_names[k]);
    for (std::size_t r = 0; r < frame.rows(); ++r) out[r * f + k] = col.values[r];
  }
  return out;
}

// ---- serialization ----------------------------------------------------------

nlohmann::json to_json(const Schema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns) cols.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
  return {{"timestamp", {{"columns", schema.timestamp.columns}, {"step", schema.timestamp.step}}},
          {"columns", cols},
          {"missing_token", schema.missing_token}};
}

Schema schema_from_json(const nlohmann::json& j) {
  Schema s;
  s.timestamp.columns = j.at("timestamp").at("columns").get<std::vector<std::string>>();
  s.timestamp.step = j.at("timestamp").at("step").get<std::int64_t>();
  for (const auto& c : j.at("columns"))
    s.columns.push_back({c.at("name").get<std::string>(), parse_column_kind(c.at("kind"))});
  s.missing_token = j.value("missing_token", "NA");
  return s;
}

nlohmann::json to_json(const PipelineMeta& meta) {
  nlohmann::json scaler = nlohmann::json::array();
  for (const auto& c : meta.scaler.columns())
    scaler.push_back({{"name", c.name}, {"min", c.min}, {"max", c.max}});
  nlohmann::json vocab = nlohmann::json::array();
  for (const auto& [name, v] : meta.vocabularies) vocab.push_back({{"column", name}, {"categories", v}});
  return {{"schema", to_json(meta.schema)},
          {"features", meta.feature_names},
          {"targets", meta.target_names},
          {"vocabularies", vocab},
          {"lookback", meta.lookback},
          {"horizon", meta.horizon},
          {"scaler", scaler}};
}

PipelineMeta pipeline_meta_from_json(const nlohmann::json& j) {
  PipelineMeta m;
  m.schema = schema_from_json(j.at("schema"));
  m.feature_names = j.at("features").get<std::vector<std::string>>();
  m.target_names = j.at("targets").get<std::vector<std::string>>();
  for (const auto& v : j.at("vocabularies"))
    m.vocabularies.emplace_back(v.at("column").get<std::string>(),
                                v.at("categories").get<std::vector<std::string>>());
  m.lookback = j.at("lookback").get<std::size_t>();
  m.horizon = j.at("horizon").get<std::size_t>();
  std::vector<ColumnScale> cols;
  for (const auto& c : j.at("scaler"))
    cols.push_back({c.at("name").get<std::string>(), c.at("min").get<double>(),
                    c.at("max").get<double>()});
  m.scaler = Scaler(std::move(cols));
  return m;
}

std::string dataset_hash(std::string_view input_bytes, std::string_view config_text) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, input_bytes.data(), input_bytes.size());
  EVP_DigestUpdate(ctx, config_text.data(), config_text.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {
constexpr char kCacheMagic[] = "MATSF-WINDOWS 1";
}

void save_prepared(const std::filesystem::path& path, const PreparedData& data) {
  nlohmann::json header = {{"meta", to_json(data.meta)},
                           {"num_features", data.train.num_features()},
                           {"target_features", data.train.target_features()},
                           {"train_starts", data.train.starts()},
                           {"test_starts", data.test.starts()},
                           {"split_boundary", data.train.split_boundary()},
                           {"matrix_size", data.train.matrix().size()}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << kCacheMagic << '\n' << header.dump() << '\n';
  const auto& m = data.train.matrix();
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

PreparedData load_prepared(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::string magic, header_line;
  std::getline(in, magic);
  if (magic != kCacheMagic) throw InputError("'" + path.string() + "' is not a window cache");
  std::getline(in, header_line);
  const auto header = nlohmann::json::parse(header_line);
  auto matrix = std::make_shared<std::vector<double>>(header.at("matrix_size").get<std::size_t>());
  in.read(reinterpret_cast<char*>(matrix->data()),
          static_cast<std::streamsize>(matrix->size() * sizeof(double)));
  if (!in) throw InputError("truncated window cache '" + path.string() + "'");
  PreparedData d;
  d.meta = pipeline_meta_from_json(header.at("meta"));
  const auto f = header.at("num_features").get<std::size_t>();
  const auto tf = header.at("target_features").get<std::vector<std::size_t>>();
  const auto boundary = header.at("split_boundary").get<std::size_t>();
  auto make = [&](const char* key) {
    return WindowedDataset(matrix, f, d.meta.lookback, d.meta.horizon,
                           header.at(key).get<std::vector<std::size_t>>(), tf,
                           d.meta.feature_names, d.meta.target_names, d.meta.scaler, boundary);
  };
  d.train = make("train_starts");
  d.test = make("test_starts");
  return d;
}

}  // namespace matsf
