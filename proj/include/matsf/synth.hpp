#pragma once

// Coupled linear process with a known cross-variable law:
//
//   x_t = A·x_{t−1} + drive(t) + ε_t,   ε_t ~ N(0, diag(noise_std²))
//
// Its one-step-ahead optimal predictor leaves exactly the noise as error, so
// noise_std² is an analytic floor for forecaster MSE.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matsf/data.hpp"
#include "matsf/stats.hpp"

namespace matsf {

enum class DriveKind { Sinusoid, RandomWalk };

struct CoupledProcessSpec {
  std::size_t d = 3;
  std::vector<double> coupling;   // A, d×d row-major
  std::vector<double> noise_std;  // per variable, > 0
  DriveKind drive = DriveKind::Sinusoid;
  double drive_amplitude = 0.0;   // sinusoid: a·sin(2πt/period + 2πi/d)
  double drive_period = 24.0;
  double drive_step_std = 0.01;   // random walk increment
  std::size_t length = 5000;
  std::size_t burn_in = 200;      // discarded leading steps
  std::uint64_t seed = 0;

  /// Throws ConfigError on bad sizes, non-positive noise, or spectral radius ≥ 1.
  void validate() const;
  std::vector<std::string> variable_names() const;
  /// Canonical key=value rendering, accepted by parse_synth_spec.
  std::string to_string() const;
};

/// Largest eigenvalue modulus of a d×d row-major matrix.
double spectral_radius(std::span<const double> a, std::size_t d);

/// Parses "d=3,length=5000,diag=0.5,coupling=0.4,noise=0.1,drive=sinusoid,
/// amplitude=0.5,period=24,step=0.01,burn_in=200,seed=7". `coupling` places
/// weight on A[i][i−1 mod d]; `A=a00;a01;...` gives the matrix explicitly and
/// `noise=s0;s1;...` per-variable noise. Omitted keys default to diag 0.5, no
/// coupling, noise 0.1 and no drive.
CoupledProcessSpec parse_synth_spec(const std::string& text);

struct SyntheticSeries {
  TimeSeriesFrame frame;       // columns x0..x{d−1}, integer ticks
  std::vector<double> coupling;
  std::vector<double> noise_variance;
};

SyntheticSeries generate(const CoupledProcessSpec& spec);

/// Raw realization as a row-major [length × d] matrix.
std::vector<double> generate_values(const CoupledProcessSpec& spec);

/// Empirical cross-correlation of a realization at least `min_length` long.
CorrelationMatrix true_cross_correlation(const CoupledProcessSpec& spec,
                                         std::size_t min_length = 100000);

}  // namespace matsf
