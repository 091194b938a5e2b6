#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "matsf/data.hpp"
#include "matsf/error.hpp"
#include "oracles.hpp"

using namespace matsf;

namespace {

Schema tick_schema(std::vector<std::string> cols, std::vector<std::string> categorical = {}) {
  Schema s;
  s.timestamp = {{"t"}, 1};
  for (auto& c : cols) {
    const bool cat = std::find(categorical.begin(), categorical.end(), c) != categorical.end();
    s.columns.push_back({c, cat ? ColumnKind::Categorical : ColumnKind::Continuous});
  }
  return s;
}

// n rows of t, a = t, b = 10·t, c = t².
TimeSeriesFrame ramp_frame(std::size_t n) {
  std::ostringstream os;
  os << "t,a,b,c\n";
  for (std::size_t i = 0; i < n; ++i) os << i << ',' << i << ',' << 10 * i << ',' << i * i << '\n';
  return parse_csv(os.str(), tick_schema({"a", "b", "c"}));
}

}  // namespace

TEST(LoadCsv, WellFormedThreeRows) {
  auto f = parse_csv("t,x,y\n1,0.5,2\n2,0.25,3\n3,1,4\n", tick_schema({"x", "y"}));
  EXPECT_EQ(f.rows(), 3u);
  EXPECT_EQ(f.column("x").values[1], 0.25);
  EXPECT_EQ(f.stats.data_lines, 3u);
  EXPECT_FALSE(f.has_missing());
}

TEST(LoadCsv, MissingDeclaredColumnNamesIt) {
  try {
    parse_csv("t,x\n1,2\n", tick_schema({"x", "pm2.5"}));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("pm2.5"), std::string::npos);
  }
}

TEST(LoadCsv, EmptyInput) {
  EXPECT_THROW(parse_csv("", tick_schema({"x"})), InputError);
  EXPECT_THROW(parse_csv("\n\n", tick_schema({"x"})), InputError);
}

TEST(LoadCsv, RejectsUnparseableTimestampsAndCounts) {
  auto f = parse_csv("t,x\n1,1\nbad,2\n2,3\n", tick_schema({"x"}));
  EXPECT_EQ(f.rows(), 2u);
  EXPECT_EQ(f.stats.rows_rejected, 1u);
  EXPECT_EQ(f.stats.data_lines, 3u);
}

TEST(LoadCsv, CalendarColumnsAndGapFill) {
  Schema s;
  s.timestamp = {{"year", "month", "day", "hour"}, 3600};
  s.columns = {{"v", ColumnKind::Continuous}, {"w", ColumnKind::Categorical}};
  auto f = parse_csv("No,year,month,day,hour,v,w\n1,2010,1,1,0,NA,NE\n2,2010,1,1,1,2,cv\n"
                     "3,2010,1,1,3,4,NE\n",
                     s);
  EXPECT_EQ(f.rows(), 4u);
  EXPECT_EQ(f.stats.rows_inserted, 1u);
  EXPECT_EQ(f.timestamps[1] - f.timestamps[0], 3600);
  EXPECT_EQ(f.column("v").missing[0], 1);
  EXPECT_EQ(f.column("v").missing[2], 1);
  EXPECT_EQ(f.column("w").vocabulary, (std::vector<std::string>{"NE", "cv"}));
}

TEST(LoadCsv, QuotedFieldsAndIsoStamps) {
  Schema s;
  s.timestamp = {{"when"}, 900};
  s.columns = {{"load", ColumnKind::Continuous}};
  auto f = parse_csv("when,load,note\n2020-01-01 00:00,1.5,\"a,b\"\n2020-01-01 00:15,2.5,\"c\"\n", s);
  EXPECT_EQ(f.rows(), 2u);
  EXPECT_EQ(f.column("load").values[1], 2.5);
}

TEST(LoadCsv, NonMonotoneTimeIsAnError) {
  EXPECT_THROW(parse_csv("t,x\n2,1\n1,2\n", tick_schema({"x"})), InputError);
  Schema s = tick_schema({"x"});
  s.timestamp.step = 2;
  EXPECT_THROW(parse_csv("t,x\n0,1\n3,2\n", s), InputError);
}

TEST(LoadCsv, RoundTripsThroughWriteCsv) {
  auto f = ramp_frame(5);
  const auto path = std::filesystem::temp_directory_path() / "matsf_roundtrip.csv";
  write_csv(path, f);
  auto g = load_csv(path, tick_schema({"a", "b", "c"}));
  EXPECT_EQ(g.timestamps, f.timestamps);
  for (const auto& name : {"a", "b", "c"}) EXPECT_EQ(g.column(name).values, f.column(name).values);
  std::filesystem::remove(path);
}

TEST(Impute, IdentityWithoutMissing) {
  auto f = ramp_frame(6);
  const std::vector<std::string> targets = {"a"};
  auto g = impute(f, ImputePolicy::DropLeading, targets);
  EXPECT_EQ(g.rows(), 6u);
  EXPECT_EQ(g.column("b").values, f.column("b").values);
}

TEST(Impute, DropsLeadingMissingTargetRows) {
  std::ostringstream os;
  os << "t,pm,x\n";
  for (int i = 0; i < 30; ++i) os << i << ',' << (i < 24 ? "NA" : std::to_string(i)) << ',' << i << '\n';
  auto f = parse_csv(os.str(), tick_schema({"pm", "x"}));
  const std::vector<std::string> targets = {"pm"};
  auto g = impute(f, ImputePolicy::DropLeading, targets);
  EXPECT_EQ(g.rows(), 6u);
  EXPECT_EQ(g.timestamps.front(), 24);
  EXPECT_FALSE(g.has_missing());
  EXPECT_THROW(impute(f, ImputePolicy::ForwardFill, targets), InputError);
}

TEST(Impute, InteriorGapTakesPreviousValue) {
  auto f = parse_csv("t,x\n0,1\n1,NA\n2,3\n", tick_schema({"x"}));
  auto g = impute(f, ImputePolicy::ForwardFill, {});
  EXPECT_EQ(g.column("x").values, (std::vector<double>{1, 1, 3}));
  EXPECT_FALSE(g.has_missing());
}

TEST(Impute, AllMissingIsAnError) {
  auto f = parse_csv("t,x\n0,NA\n1,NA\n", tick_schema({"x"}));
  const std::vector<std::string> targets = {"x"};
  EXPECT_THROW(impute(f, ImputePolicy::DropLeading, targets), InputError);
}

TEST(Encode, FourWindDirections) {
  auto f = parse_csv("t,cbwd\n0,SE\n1,cv\n2,NW\n3,NE\n4,cv\n", tick_schema({"cbwd"}, {"cbwd"}));
  auto g = encode_categorical(f, "cbwd");
  EXPECT_EQ(g.column_names(),
            (std::vector<std::string>{"cbwd_NE", "cbwd_NW", "cbwd_SE", "cbwd_cv"}));
  for (std::size_t r = 0; r < g.rows(); ++r) {
    double s = 0;
    for (const auto& c : g.columns) s += c.values[r];
    EXPECT_EQ(s, 1.0);
  }
  EXPECT_EQ(g.column("cbwd_cv").values, (std::vector<double>{0, 1, 0, 0, 1}));
}

TEST(Encode, SingleCategoryGivesConstantIndicator) {
  auto f = parse_csv("t,k\n0,a\n1,a\n", tick_schema({"k"}, {"k"}));
  auto g = encode_categorical(f, "k");
  ASSERT_EQ(g.columns.size(), 1u);
  EXPECT_EQ(g.columns[0].values, (std::vector<double>{1, 1}));
}

TEST(Encode, UnseenCategoryIsEncodingError) {
  auto f = parse_csv("t,k\n0,a\n1,z\n", tick_schema({"k"}, {"k"}));
  const std::vector<std::string> vocab = {"a", "b"};
  EXPECT_THROW(encode_categorical(f, "k", &vocab), EncodingError);
}

TEST(Scale, ExamplesAndRoundTrip) {
  auto f = parse_csv("t,x,k\n0,0,7\n1,5,7\n2,10,7\n", tick_schema({"x", "k"}));
  auto [g, scaler] = scale_fit_rows(f, 3);
  EXPECT_EQ(g.column("x").values, (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(g.column("k").values, (std::vector<double>{0, 0, 0}));
  CounterRng rng(2);
  const ColumnScale cs{"x", -3.7, 12.25};
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-10, 20);
    EXPECT_NEAR(cs.inverse(cs.transform(x)), x, 1e-12);
  }
  auto back = scaler.inverse_transform(g);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(back.column("x").values[r], f.column("x").values[r], 1e-12);
}

TEST(Scale, FitUsesOnlyLeadingRows) {
  auto f = ramp_frame(10);
  auto [g, s_train] = scale_fit_transform(f, 0.5);
  auto [h, s_all] = scale_fit_rows(f, 10);
  EXPECT_EQ(s_train.find("a")->max, 4.0);
  EXPECT_NE(s_train.find("a")->max, s_all.find("a")->max);
  for (std::size_t r = 0; r < 5; ++r) {
    EXPECT_GE(g.column("a").values[r], 0.0);
    EXPECT_LE(g.column("a").values[r], 1.0);
  }
  EXPECT_THROW(scale_fit_transform(f, 1.0), ConfigError);
  EXPECT_THROW(scale_fit_transform(f, 0.0), ConfigError);
}

TEST(Windows, CountAndShapes) {
  auto f = ramp_frame(10);
  const std::vector<std::string> targets = {"a", "c"};
  auto ds = make_windows(f, 3, targets);
  EXPECT_EQ(ds.size(), 7u);
  EXPECT_EQ(ds.windows().shape(), (Shape{7, 3, 3}));
  EXPECT_EQ(ds.targets().shape(), (Shape{7, 2}));
  EXPECT_THROW(make_windows(ramp_frame(3), 3, targets), InputError);
  EXPECT_THROW(make_windows(f, 0, targets), ConfigError);
}

TEST(Windows, SevenTargetsLookback24) {
  std::ostringstream os;
  os << "t";
  for (int k = 0; k < 8; ++k) os << ",v" << k;
  os << '\n';
  for (int i = 0; i < 40; ++i) {
    os << i;
    for (int k = 0; k < 8; ++k) os << ',' << i * k;
    os << '\n';
  }
  std::vector<std::string> cols, targets;
  for (int k = 0; k < 8; ++k) cols.push_back("v" + std::to_string(k));
  targets.assign(cols.begin(), cols.begin() + 7);
  auto ds = make_windows(parse_csv(os.str(), tick_schema(cols)), 24, targets);
  EXPECT_EQ(ds.targets().shape(), (Shape{40 - 24, 7}));
}

TEST(Windows, AlignmentMatchesIndexArithmetic) {
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    CounterRng rng(derive_seed(12, "windows", inst));
    const std::size_t rows = 5 + rng() % 30;
    const std::size_t lookback = 1 + rng() % (rows - 2);
    const std::size_t horizon = 1 + rng() % (rows - lookback);
    auto f = ramp_frame(rows);
    const std::vector<std::string> targets = {"c", "a"};
    auto ds = make_windows(f, lookback, targets, horizon);
    ASSERT_EQ(ds.size(), rows - lookback - horizon + 1);
    for (std::size_t j = 0; j < ds.size(); ++j) {
      const auto w = ds.window(j);
      for (std::size_t t = 0; t < lookback; ++t) {
        const double row = static_cast<double>(j + t);
        ASSERT_EQ(w[t * 3 + 0], row);
        ASSERT_EQ(w[t * 3 + 1], 10 * row);
        ASSERT_EQ(w[t * 3 + 2], row * row);
      }
      const double trow = static_cast<double>(j + lookback + horizon - 1);
      ASSERT_EQ(ds.target(j, 0), trow * trow);
      ASSERT_EQ(ds.target(j, 1), trow);
      ASSERT_LT(j + lookback - 1, ds.target_row(j));
    }
  }
}

TEST(Windows, FlatteningReproducesFrame) {
  auto f = ramp_frame(12);
  const std::vector<std::string> targets = {"a"};
  auto ds = make_windows(f, 4, targets);
  for (std::size_t j = 0; j < ds.size(); ++j)
    for (std::size_t t = 0; t < 4; ++t)
      for (std::size_t k = 0; k < 3; ++k)
        EXPECT_EQ(ds.window(j)[t * 3 + k], f.columns[k].values[j + t]);
}

TEST(Split, ChronologicalEightyTwenty) {
  auto f = ramp_frame(102);
  const std::vector<std::string> targets = {"a"};
  auto ds = make_windows(f, 2, targets);
  ASSERT_EQ(ds.size(), 100u);
  auto [train, test] = split(ds, 0.8);
  EXPECT_EQ(train.size(), 80u);
  EXPECT_EQ(test.size(), 20u);
  EXPECT_LT(train.target_row(train.size() - 1), test.target_row(0));
  EXPECT_THROW(split(ds, 1.0), ConfigError);
  EXPECT_THROW(split(ds, 0.001), ConfigError);
}

TEST(Prepare, ScalerFittedOnTrainingRowsOnly) {
  auto f = ramp_frame(60);
  PipelineConfig cfg;
  cfg.targets = {"a", "b"};
  cfg.lookback = 5;
  auto p = prepare(f, tick_schema({"a", "b", "c"}), cfg);
  const std::size_t last_train_row = p.train.target_row(p.train.size() - 1);
  EXPECT_EQ(p.meta.scaler.find("a")->max, static_cast<double>(last_train_row));
  EXPECT_EQ(p.meta.scaler.find("a")->min, 0.0);
  for (std::size_t j = 0; j < p.train.size(); ++j) {
    for (double v : p.train.window(j)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_GT(p.test.target(p.test.size() - 1, 0), 1.0);
}

TEST(Prepare, PureFunctionOfInputs) {
  std::ostringstream os;
  os << "t,x,w\n";
  const char* dirs[] = {"NE", "cv", "SE"};
  for (int i = 0; i < 50; ++i) os << i << ',' << (i * 37 % 11) << ',' << dirs[i % 3] << '\n';
  const Schema s = tick_schema({"x", "w"}, {"w"});
  PipelineConfig cfg;
  cfg.targets = {"x"};
  cfg.lookback = 4;
  auto a = prepare(parse_csv(os.str(), s), s, cfg);
  auto b = prepare(parse_csv(os.str(), s), s, cfg);
  EXPECT_EQ(a.train.matrix(), b.train.matrix());
  EXPECT_EQ(to_json(a.meta).dump(), to_json(b.meta).dump());
  EXPECT_EQ(a.meta.feature_names, (std::vector<std::string>{"x", "w_NE", "w_SE", "w_cv"}));

  const auto path = std::filesystem::temp_directory_path() / "matsf_cache.bin";
  save_prepared(path, a);
  auto c = load_prepared(path);
  EXPECT_EQ(c.train.matrix(), a.train.matrix());
  EXPECT_EQ(c.test.starts(), a.test.starts());
  EXPECT_EQ(to_json(c.meta).dump(), to_json(a.meta).dump());
  std::filesystem::remove(path);

  // replay on the raw rows reproduces the prepared matrix
  auto replayed = replay_pipeline(parse_csv(os.str(), s), a.meta);
  EXPECT_EQ(replayed, a.train.matrix());
}

TEST(Hash, DependsOnBytesAndConfig) {
  const auto h = dataset_hash("abc", "cfg");
  EXPECT_EQ(h.size(), 64u);
  EXPECT_EQ(h, dataset_hash("abc", "cfg"));
  EXPECT_NE(h, dataset_hash("abd", "cfg"));
  EXPECT_NE(h, dataset_hash("abc", "cfh"));
  // SHA-256("abc")
  EXPECT_EQ(dataset_hash("abc", ""),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
