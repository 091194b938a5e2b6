#include "matsf/synth.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "matsf/error.hpp"
#include "matsf/rng.hpp"

namespace matsf {

double spectral_radius(std::span<const double> a, std::size_t d) {
  if (a.size() != d * d) throw DimensionError("coupling matrix must have d·d entries");
  Eigen::MatrixXd m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = a[i * d + j];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void CoupledProcessSpec::validate() const {
  if (d == 0) throw ConfigError("synthetic process needs d ≥ 1");
  if (length == 0) throw ConfigError("synthetic length must be positive");
  if (coupling.size() != d * d)
    throw ConfigError("coupling matrix has " + std::to_string(coupling.size()) + " entries, need " +
                      std::to_string(d * d));
  if (noise_std.size() != d) throw ConfigError("need one noise_std per variable");
  for (double s : noise_std)
    if (!(s > 0.0)) throw ConfigError("noise_std must be positive");
  if (drive == DriveKind::Sinusoid && !(drive_period > 0.0))
    throw ConfigError("drive period must be positive");
  const double rho = spectral_radius(coupling, d);
  if (!(rho < 1.0))
    throw ConfigError("coupling matrix is not stable (spectral radius " + std::to_string(rho) + ")");
}

std::vector<std::string> CoupledProcessSpec::variable_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

std::string CoupledProcessSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "d=" << d << ",length=" << length << ",A=";
  for (std::size_t i = 0; i < coupling.size(); ++i) os << (i ? ";" : "") << coupling[i];
  os << ",noise=";
  for (std::size_t i = 0; i < noise_std.size(); ++i) os << (i ? ";" : "") << noise_std[i];
  os << ",drive=" << (drive == DriveKind::Sinusoid ? "sinusoid" : "random_walk")
     << ",amplitude=" << drive_amplitude << ",period=" << drive_period
     << ",step=" << drive_step_std << ",burn_in=" << burn_in << ",seed=" << seed;
  return os.str();
}

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("synthetic spec: bad number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

CoupledProcessSpec parse_synth_spec(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("synthetic spec: expected key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto number = [&](const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    auto v = parse_list(it->second);
    if (v.size() != 1) throw ConfigError("synthetic spec: '" + key + "' takes one value");
    return v[0];
  };
  static const std::set<std::string> known = {"d", "length", "diag", "coupling", "A", "noise",
                                              "drive", "amplitude", "period", "step", "burn_in",
                                              "seed"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw ConfigError("synthetic spec: unknown key '" + k + "'");

  CoupledProcessSpec s;
  const double d_value = number("d", 3);
  if (!(d_value >= 1) || d_value != std::floor(d_value)) throw ConfigError("synthetic spec: d must be a positive integer");
  s.d = static_cast<std::size_t>(d_value);
  const double length = number("length", 5000);
  if (!(length >= 1)) throw ConfigError("synthetic spec: length must be positive");
  s.length = static_cast<std::size_t>(length);
  s.burn_in = static_cast<std::size_t>(number("burn_in", 200));
  s.seed = static_cast<std::uint64_t>(number("seed", 0));
  s.drive_amplitude = number("amplitude", 0.0);
  s.drive_period = number("period", 24);
  s.drive_step_std = number("step", 0.01);
  if (auto it = kv.find("drive"); it != kv.end()) {
    if (it->second == "sinusoid")
      s.drive = DriveKind::Sinusoid;
    else if (it->second == "random_walk")
      s.drive = DriveKind::RandomWalk;
    else
      throw ConfigError("synthetic spec: unknown drive '" + it->second + "'");
  }
  if (auto it = kv.find("A"); it != kv.end()) {
    s.coupling = parse_list(it->second);
  } else {
    const double diag = number("diag", 0.5);
    const double off = number("coupling", 0.0);
    s.coupling.assign(s.d * s.d, 0.0);
    for (std::size_t i = 0; i < s.d; ++i) {
      s.coupling[i * s.d + i] = diag;
      if (s.d > 1) s.coupling[i * s.d + (i + s.d - 1) % s.d] += off;
    }
  }
  if (auto it = kv.find("noise"); it != kv.end()) {
    s.noise_std = parse_list(it->second);
    if (s.noise_std.size() == 1) s.noise_std.assign(s.d, s.noise_std[0]);
  } else {
    s.noise_std.assign(s.d, 0.1);
  }
  s.validate();
  return s;
}

std::vector<double> generate_values(const CoupledProcessSpec& spec) {
  spec.validate();
  const std::size_t d = spec.d;
  CounterRng noise_rng(derive_seed(spec.seed, "synth.noise"));
  CounterRng walk_rng(derive_seed(spec.seed, "synth.drive"));
  std::normal_distribution<double> noise_normal(0.0, 1.0);
  std::normal_distribution<double> walk_normal(0.0, 1.0);

  std::vector<double> x(d, 0.0), next(d), walk(d, 0.0);
  std::vector<double> out(spec.length * d);
  const std::size_t total = spec.burn_in + spec.length;
  for (std::size_t step = 1; step <= total; ++step) {
    const double t = static_cast<double>(step);
    for (std::size_t i = 0; i < d; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < d; ++j) v += spec.coupling[i * d + j] * x[j];
      if (spec.drive == DriveKind::Sinusoid) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(d);
        v += spec.drive_amplitude * std::sin(2.0 * std::numbers::pi * t / spec.drive_period + phase);
      } else {
        walk[i] += spec.drive_step_std * walk_normal(walk_rng);
        v += walk[i];
      }
      v += spec.noise_std[i] * noise_normal(noise_rng);
      next[i] = v;
    }
    x.swap(next);
    if (step > spec.burn_in) {
      const std::size_t r = step - spec.burn_in - 1;
      std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(r * d));
    }
  }
  return out;
}

SyntheticSeries generate(const CoupledProcessSpec& spec) {
  auto values = generate_values(spec);
  SyntheticSeries s;
  s.coupling = spec.coupling;
  for (double n : spec.noise_std) s.noise_variance.push_back(n * n);
  auto& f = s.frame;
  f.step = 1;
  f.timestamps.resize(spec.length);
  for (std::size_t r = 0; r < spec.length; ++r) f.timestamps[r] = static_cast<std::int64_t>(r);
  const auto names = spec.variable_names();
  for (std::size_t i = 0; i < spec.d; ++i) {
    Column c;
    c.name = names[i];
    c.kind = ColumnKind::Continuous;
    c.values.resize(spec.length);
    c.missing.assign(spec.length, 0);
    for (std::size_t r = 0; r < spec.length; ++r) c.values[r] = values[r * spec.d + i];
    f.columns.push_back(std::move(c));
  }
  f.stats.data_lines = spec.length;
  return s;
}

CorrelationMatrix true_cross_correlation(const CoupledProcessSpec& spec, std::size_t min_length) {
  CoupledProcessSpec long_run = spec;
  long_run.length = std::max(spec.length, min_length);
  const auto values = generate_values(long_run);
  return pearson_matrix(values, long_run.length, spec.d);
}

}  // namespace matsf
