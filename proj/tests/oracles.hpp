#pragma once
// Independent reference implementations used by the unit and acceptance
// tests: central finite differences and plain scalar loops.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "matsf/models.hpp"
#include "matsf/rng.hpp"
#include "matsf/tensor.hpp"

namespace oracle {

inline std::vector<double> random_values(std::size_t n, matsf::CounterRng& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline matsf::Tensor random_tensor(matsf::Shape shape, matsf::CounterRng& rng, double lo = -1.0,
                                   double hi = 1.0, bool requires_grad = true) {
  const std::size_t n = matsf::element_count(shape);
  return matsf::Tensor::from(std::move(shape), random_values(n, rng, lo, hi), requires_grad);
}

struct GradCheck {
  double relative_error = 0.0;  // ‖analytic − numeric‖ / (‖analytic‖ + ‖numeric‖)
  std::size_t entries = 0;
};

/// Compares backward() against central differences of `f` over every element
/// of every leaf. `f` must rebuild its graph from the leaves on each call.
inline GradCheck gradient_check(const std::function<matsf::Tensor()>& f,
                                std::vector<matsf::Tensor> leaves, double h = 1e-5) {
  for (auto& l : leaves) l.clear_grad();
  matsf::backward(f());
  std::vector<double> analytic, numeric;
  for (auto& leaf : leaves) {
    const auto g = leaf.grad();
    analytic.insert(analytic.end(), g.begin(), g.end());
    auto v = leaf.mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + h;
      const double up = f().item();
      v[i] = saved - h;
      const double down = f().item();
      v[i] = saved;
      numeric.push_back((up - down) / (2 * h));
    }
  }
  double diff = 0, na = 0, nn = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nn);
  return {denom == 0.0 ? 0.0 : std::sqrt(diff) / denom, analytic.size()};
}

/// Naive triple loop, C = A[m×k] · B[k×n].
inline std::vector<double> matmul(std::span<const double> a, std::span<const double> b,
                                  std::size_t m, std::size_t k, std::size_t n) {
  std::vector<double> c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      c[i * n + j] = s;
    }
  return c;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// One LSTM step for a single row, gates in (input, forget, cell, output) order.
inline void lstm_cell(std::span<const double> x, std::span<const double> h,
                      std::span<const double> c, const matsf::LstmLayerParams& p,
                      std::vector<double>& h_out, std::vector<double>& c_out) {
  const std::size_t in = p.input_size, hs = p.hidden_size;
  const auto w = p.w_gates.values(), u = p.u_gates.values(), b = p.b_gates.values();
  std::vector<double> z(4 * hs);
  for (std::size_t r = 0; r < 4 * hs; ++r) {
    double s = b[r];
    for (std::size_t j = 0; j < in; ++j) s += w[r * in + j] * x[j];
    for (std::size_t j = 0; j < hs; ++j) s += u[r * hs + j] * h[j];
    z[r] = s;
  }
  h_out.assign(hs, 0.0);
  c_out.assign(hs, 0.0);
  for (std::size_t j = 0; j < hs; ++j) {
    const double ig = sigmoid(z[j]);
    const double fg = sigmoid(z[hs + j]);
    const double gg = std::tanh(z[2 * hs + j]);
    const double og = sigmoid(z[3 * hs + j]);
    c_out[j] = fg * c[j] + ig * gg;
    h_out[j] = og * std::tanh(c_out[j]);
  }
}

/// Full forecaster on one window [L × F] (row-major).
inline std::vector<double> forecaster(const matsf::ForecasterModel& m, std::span<const double> window,
                                      std::size_t lookback) {
  const std::size_t f = m.spec.input_size;
  std::vector<std::vector<double>> seq(lookback);
  for (std::size_t t = 0; t < lookback; ++t)
    seq[t].assign(window.begin() + static_cast<std::ptrdiff_t>(t * f),
                  window.begin() + static_cast<std::ptrdiff_t>((t + 1) * f));
  for (const auto& layer : m.layers) {
    std::vector<double> h(layer.hidden_size, 0.0), c(layer.hidden_size, 0.0), hn, cn;
    for (std::size_t t = 0; t < lookback; ++t) {
      lstm_cell(seq[t], h, c, layer, hn, cn);
      h = hn;
      c = cn;
      seq[t] = h;
    }
  }
  const auto& last = seq.back();
  const auto w = m.head_w.values(), b = m.head_b.values();
  std::vector<double> y(m.spec.out);
  for (std::size_t o = 0; o < m.spec.out; ++o) {
    double s = b[o];
    for (std::size_t j = 0; j < last.size(); ++j) s += w[o * last.size() + j] * last[j];
    y[o] = s;
  }
  return y;
}

/// Discriminator on one row.
inline double discriminator(const matsf::DiscriminatorModel& m, std::span<const double> v) {
  std::vector<double> a(v.begin(), v.end());
  for (const auto& layer : m.layers) {
    const std::size_t out = layer.w.dim(0), in = layer.w.dim(1);
    const auto w = layer.w.values(), b = layer.b.values();
    std::vector<double> next(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (std::size_t j = 0; j < in; ++j) s += w[o * in + j] * a[j];
      next[o] = layer.activation == matsf::Activation::Relu ? std::max(0.0, s) : sigmoid(s);
    }
    a = std::move(next);
  }
  return a[0];
}

/// Column-wise mean squared error of row-major [n × d] matrices.
inline std::vector<double> mse_columns(std::span<const double> pred, std::span<const double> truth,
                                       std::size_t n, std::size_t d) {
  std::vector<double> out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = pred[i * d + k] - truth[i * d + k];
      s += e * e;
    }
    out[k] = s / static_cast<double>(n);
  }
  return out;
}

}  // namespace oracle
