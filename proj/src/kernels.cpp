#include "matsf/kernels.hpp"

#include <omp.h>

#include <cstdint>

namespace matsf::kernels {

namespace {

// Row kernels: the body of one output row, shared by both implementations.

inline void row_nn(std::size_t i, std::size_t n, std::size_t k, const double* a,
                   const double* b, double* c) {
  double* ci = c + i * n;
  const double* ai = a + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double aip = ai[p];
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
  }
}

inline void row_nt(std::size_t i, std::size_t n, std::size_t k, const double* a,
                   const double* b, double* c) {
  double* ci = c + i * n;
  const double* ai = a + i * k;
  for (std::size_t j = 0; j < n; ++j) {
    const double* bj = b + j * k;
    double acc = ci[j];
    for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
    ci[j] = acc;
  }
}

inline void row_tn(std::size_t i, std::size_t m, std::size_t n, std::size_t k,
                   const double* a, const double* b, double* c) {
  double* ci = c + i * n;
  for (std::size_t p = 0; p < k; ++p) {
    const double api = a[p * m + i];
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
  }
}

}  // namespace

namespace serial {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < m; ++i) row_nn(i, n, k, a.data(), b.data(), c.data());
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < m; ++i) row_nt(i, n, k, a.data(), b.data(), c.data());
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  for (std::size_t i = 0; i < m; ++i) row_tn(i, m, n, k, a.data(), b.data(), c.data());
}

}  // namespace serial

namespace parallel {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    row_nn(static_cast<std::size_t>(i), n, k, a.data(), b.data(), c.data());
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    row_nt(static_cast<std::size_t>(i), n, k, a.data(), b.data(), c.data());
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i)
    row_tn(static_cast<std::size_t>(i), m, n, k, a.data(), b.data(), c.data());
}

}  // namespace parallel

namespace {
bool go_parallel(std::size_t m, std::size_t n, std::size_t k) {
  return m > 1 && m * n * k >= kParallelThreshold && omp_get_max_threads() > 1;
}
}  // namespace

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  if (go_parallel(m, n, k))
    parallel::gemm_nn(m, n, k, a, b, c);
  else
    serial::gemm_nn(m, n, k, a, b, c);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  if (go_parallel(m, n, k))
    parallel::gemm_nt(m, n, k, a, b, c);
  else
    serial::gemm_nt(m, n, k, a, b, c);
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c) {
  if (go_parallel(m, n, k))
    parallel::gemm_tn(m, n, k, a, b, c);
  else
    serial::gemm_tn(m, n, k, a, b, c);
}

}  // namespace matsf::kernels
