#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace conicwave::ode {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct StepResult {
  State<N> y;        // 5th-order solution
  double error = 0;  // scaled RMS error estimate (accept when <= 1)
};

/// One Dormand–Prince 5(4) step of size h from y0 with derivative f0 = f(y0).
template <std::size_t N, class F>
StepResult<N> dopri_step(F&& f, const State<N>& y0, const State<N>& f0, double h, double rtol,
                         double atol) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto combo = [&](auto&&... terms) {
    State<N> out = y0;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * (0.0 + ... + (terms.first * (*terms.second)[i]));
    return out;
  };
  using P = std::pair<double, const State<N>*>;

  const State<N>& k1 = f0;
  const State<N> k2 = f(combo(P{a21, &k1}));
  const State<N> k3 = f(combo(P{a31, &k1}, P{a32, &k2}));
  const State<N> k4 = f(combo(P{a41, &k1}, P{a42, &k2}, P{a43, &k3}));
  const State<N> k5 = f(combo(P{a51, &k1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4}));
  const State<N> k6 = f(combo(P{a61, &k1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4}, P{a65, &k5}));
  StepResult<N> r;
  r.y = combo(P{b1, &k1}, P{b3, &k3}, P{b4, &k4}, P{b5, &k5}, P{b6, &k6});
  const State<N> k7 = f(r.y);
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double err =
        h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(r.y[i]));
    acc += (err / scale) * (err / scale);
  }
  r.error = std::sqrt(acc / N);
  return r;
}

/// Standard step-size update for an order-5 pair.
inline double next_step(double h, double error) {
  constexpr double safety = 0.9;
  if (error == 0.0) return h * 5.0;
  const double factor = safety * std::pow(error, -0.2);
  return h * std::clamp(factor, 0.2, 5.0);
}

}  // namespace conicwave::ode
