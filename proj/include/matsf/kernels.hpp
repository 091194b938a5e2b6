#pragma once

// Dense row-major GEMM kernels. Each kernel accumulates into C (C += op(A)·op(B)).
//
// Two implementations share one loop order: `serial` is the reference used by
// tests, `parallel` splits output rows across OpenMP threads. Every C element
// sees the same sequence of additions in both, so results are bitwise equal
// for any thread count.

#include <cstddef>
#include <span>

namespace matsf::kernels {

namespace serial {
/// C[m×n] += A[m×k] · B[k×n]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
/// C[m×n] += A[m×k] · B[n×k]ᵀ
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
/// C[m×n] += A[k×m]ᵀ · B[k×n]
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
}  // namespace serial

namespace parallel {
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
}  // namespace parallel

/// Work (m·n·k) above which the dispatching entry points go parallel.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
             std::span<const double> b, std::span<double> c);

}  // namespace matsf::kernels
