#include "matsf/stats.hpp"

#include <cmath>

#include "matsf/error.hpp"

namespace matsf {

CorrelationMatrix pearson_matrix(std::span<const double> data, std::size_t n, std::size_t d) {
  if (data.size() != n * d) throw DimensionError("pearson_matrix: data size is not n·d");
  if (n < 2) throw ContractError("pearson_matrix needs at least two rows");
  std::vector<double> mu(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) mu[j] += data[r * d + j];
  for (auto& m : mu) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < d; ++i) {
      const double di = data[r * d + i] - mu[i];
      for (std::size_t j = i; j < d; ++j) cov[i * d + j] += di * (data[r * d + j] - mu[j]);
    }

  CorrelationMatrix out;
  out.d = d;
  out.values.assign(d * d, 0.0);
  out.zero_variance.assign(d, false);
  for (std::size_t i = 0; i < d; ++i) out.zero_variance[i] = !(cov[i * d + i] > 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    out.values[i * d + i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      double c = 0.0;
      if (!out.zero_variance[i] && !out.zero_variance[j])
        c = cov[i * d + j] / std::sqrt(cov[i * d + i] * cov[j * d + j]);
      out.values[i * d + j] = out.values[j * d + i] = c;
    }
  }
  return out;
}

double autocorrelation(std::span<const double> data, std::size_t n, std::size_t d,
                       std::size_t column, std::size_t lag) {
  if (lag >= n) throw ContractError("autocorrelation lag exceeds series length");
  double mu = 0.0;
  for (std::size_t r = 0; r < n; ++r) mu += data[r * d + column];
  mu /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double x = data[r * d + column] - mu;
    den += x * x;
    if (r + lag < n) num += x * (data[(r + lag) * d + column] - mu);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace matsf
