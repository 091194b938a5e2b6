#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "matsf/cli.hpp"
#include "matsf/data.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = matsf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("matsf_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> csv_column(const fs::path& path, const std::string& name) {
  std::istringstream in(matsf::read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  const auto col = static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    for (std::size_t k = 0; k <= col; ++k) std::getline(ls, cell, ',');
    out.push_back(cell);
  }
  return out;
}

const std::vector<std::string> kSmall = {"--synth", "d=3,length=400,coupling=0.3,seed=2",
                                         "--lookback", "5", "--units", "6", "--epochs", "2",
                                         "--batch-size", "32"};

std::vector<std::string> train_args(const std::string& system, const fs::path& out) {
  std::vector<std::string> a = {"train", "--system", system};
  a.insert(a.end(), kSmall.begin(), kSmall.end());
  a.push_back("--out");
  a.push_back(out.string());
  return a;
}

// Replaces the value of `flag` or appends it.
std::vector<std::string> with(std::vector<std::string> args, const std::string& flag,
                              const std::string& value) {
  auto it = std::find(args.begin(), args.end(), flag);
  if (it != args.end()) {
    *(it + 1) = value;
  } else {
    args.push_back(flag);
    args.push_back(value);
  }
  return args;
}

std::vector<std::string> without(std::vector<std::string> args, const std::string& flag) {
  auto it = std::find(args.begin(), args.end(), flag);
  if (it != args.end()) args.erase(it, it + 2);
  return args;
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"train", "--epochs", "x"}).code, 1);
  EXPECT_EQ(run({"train", "--out", scratch("none").string()}).code, 1);
  EXPECT_EQ(run({"train", "--synth", "d=3,diag=2", "--out", scratch("unstable").string()}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ZeroEpochRunWritesEmptyReport) {
  const auto dir = scratch("zero");
  auto r = run({"train", "--system", "adversarial", "--synth", "d=3", "--epochs", "0", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(matsf::read_file(dir / "epochs.jsonl"), "");
  for (const char* f : {"checkpoint.matsf", "summary.json", "loss_curves.csv", "trace_train.csv",
                        "trace_test.csv", "mse_per_variable.csv", "correlation.csv", "config.toml",
                        "synth.csv", "timing.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Cli, RerunIsByteIdenticalAndConfigEchoReproduces) {
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  ASSERT_EQ(run(train_args("adversarial", a)).code, 0);
  ASSERT_EQ(run(train_args("adversarial", b)).code, 0);
  ASSERT_EQ(run({"train", "--config", (a / "config.toml").string(), "--out", c.string()}).code, 0);
  for (const char* f : {"epochs.jsonl", "summary.json", "loss_curves.csv", "trace_train.csv",
                        "trace_test.csv", "mse_per_variable.csv", "correlation.csv",
                        "checkpoint.matsf"}) {
    EXPECT_EQ(matsf::read_file(a / f), matsf::read_file(b / f)) << f;
    EXPECT_EQ(matsf::read_file(a / f), matsf::read_file(c / f)) << f;
  }
}

TEST(Cli, SeedPrecedence) {
  const auto env = scratch("seed_env"), flag = scratch("seed_flag");
  ::setenv("MATSF_SEED", "77", 1);
  ASSERT_EQ(run(with(train_args("parallel", env), "--epochs", "0")).code, 0);
  ASSERT_EQ(run(with(with(train_args("parallel", flag), "--epochs", "0"), "--seed", "5")).code, 0);
  ::unsetenv("MATSF_SEED");
  EXPECT_NE(matsf::read_file(env / "config.toml").find("seed = 77"), std::string::npos);
  EXPECT_NE(matsf::read_file(flag / "config.toml").find("seed = 5"), std::string::npos);

  const auto file = scratch("seed_file");
  fs::create_directories(file);
  std::ofstream(file / "c.toml") << "[train]\nseed = 31\nepochs = 0\n";
  ::setenv("MATSF_SEED", "77", 1);
  auto filed = with(without(train_args("parallel", file / "run"), "--epochs"), "--config",
                    (file / "c.toml").string());
  ASSERT_EQ(run(filed).code, 0);
  ::unsetenv("MATSF_SEED");
  const auto echo = matsf::read_file(file / "run" / "config.toml");
  EXPECT_NE(echo.find("seed = 31"), std::string::npos);
  EXPECT_NE(echo.find("epochs = 0"), std::string::npos);
}

TEST(Cli, CompareSystemsAndForecast) {
  const auto adv = scratch("cmp_adv"), multi = scratch("cmp_multi"), par = scratch("cmp_par");
  ASSERT_EQ(run(train_args("adversarial", adv)).code, 0);
  ASSERT_EQ(run(train_args("multi_output", multi)).code, 0);
  ASSERT_EQ(run(train_args("parallel", par)).code, 0);

  // every system saw the same windows
  for (const char* col : {"target_row", "target_x0", "target_x2"}) {
    EXPECT_EQ(csv_column(adv / "trace_test.csv", col), csv_column(multi / "trace_test.csv", col));
    EXPECT_EQ(csv_column(adv / "trace_test.csv", col), csv_column(par / "trace_test.csv", col));
  }

  const auto out = scratch("cmp_out");
  auto r = run({"compare", "--runs", adv.string() + "," + multi.string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("adversarial"), std::string::npos);
  EXPECT_NE(r.out.find("multi_output"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "compare_mse.csv"));
  EXPECT_TRUE(fs::exists(out / "compare_gap.csv"));
  EXPECT_EQ(run({"compare", "--runs", adv.string()}).code, 1);

  const auto other = scratch("cmp_other");
  ASSERT_EQ(run(with(train_args("parallel", other), "--synth", "d=3,length=400,coupling=0.3,seed=3")).code, 0);
  EXPECT_EQ(run({"compare", "--runs", adv.string() + "," + other.string()}).code, 2);

  // forecast of the first training window equals the stored training forecast
  const auto window = adv / "window.csv";
  {
    std::istringstream in(matsf::read_file(adv / "synth.csv"));
    std::ofstream w(window);
    std::string line;
    for (int i = 0; i <= 5 && std::getline(in, line); ++i) w << line << '\n';
  }
  auto f = run({"forecast", "--checkpoint", (adv / "checkpoint.matsf").string(), "--input", window.string()});
  ASSERT_EQ(f.code, 0) << f.err;
  std::istringstream printed(f.out);
  for (int k = 0; k < 3; ++k) {
    std::string name;
    double value;
    printed >> name >> value;
    EXPECT_EQ(name, "x" + std::to_string(k));
    const double stored = std::stod(csv_column(adv / "trace_train.csv", "forecast_" + name)[0]);
    EXPECT_NEAR(value, stored, 1e-9);
  }

  const auto short_window = adv / "short.csv";
  {
    std::istringstream in(matsf::read_file(adv / "synth.csv"));
    std::ofstream w(short_window);
    std::string line;
    for (int i = 0; i <= 3 && std::getline(in, line); ++i) w << line << '\n';
  }
  EXPECT_EQ(run({"forecast", "--checkpoint", (adv / "checkpoint.matsf").string(), "--input",
                 short_window.string()}).code, 2);
  std::ofstream(adv / "bad.csv") << "t,x0,x1\n0,1,2\n";
  EXPECT_EQ(run({"forecast", "--checkpoint", (adv / "checkpoint.matsf").string(), "--input",
                 (adv / "bad.csv").string()}).code, 2);
}

TEST(Cli, MissingDataFileExitsTwo) {
  EXPECT_EQ(run({"train", "--data", "/nonexistent/file.csv", "--out", scratch("nofile").string()}).code, 2);
}

TEST(Cli, DivergenceExitsThree) {
  const auto dir = scratch("diverge");
  auto r = run(with(with(train_args("parallel", dir), "--optimizer", "sgd"), "--lr-forecast", "1e9"));
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(Cli, SynthSubcommand) {
  const auto dir = scratch("synth");
  fs::create_directories(dir);
  ASSERT_EQ(run({"synth", "--spec", "d=2,length=50,seed=1", "--out", (dir / "s.csv").string()}).code, 0);
  const auto text = matsf::read_file(dir / "s.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 51);
}
