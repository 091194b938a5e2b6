#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace matsf {

struct CorrelationMatrix {
  std::size_t d = 0;
  std::vector<double> values;          // d×d row-major, unit diagonal
  std::vector<bool> zero_variance;     // per column; its off-diagonals are reported as 0

  double at(std::size_t i, std::size_t j) const { return values[i * d + j]; }
};

/// Pearson correlation between the columns of a row-major [n × d] matrix.
CorrelationMatrix pearson_matrix(std::span<const double> data, std::size_t n, std::size_t d);

/// Sample autocorrelation of one column at the given lag.
double autocorrelation(std::span<const double> data, std::size_t n, std::size_t d,
                       std::size_t column, std::size_t lag);

}  // namespace matsf
