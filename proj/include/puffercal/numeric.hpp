//
// Copyright 2026 The puffercal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Small numerical kernels shared by the other modules: log-space sums,
// compensated accumulation, shortest round-trip formatting and an adaptive
// Gauss-Kronrod integrator.

#ifndef PUFFERCAL_NUMERIC_HPP_
#define PUFFERCAL_NUMERIC_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <system_error>
#include <tuple>
#include <utility>
#include <vector>

#include "puffercal/error.hpp"

namespace puffercal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sum_k exp(v_k)) with the max shifted out. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> values) {
  double max = -kInf;
  for (double v : values) max = std::max(max, v);
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

// Streaming variant of log_sum_exp for generated terms.
class LogSumExp {
 public:
  void add(double v) {
    if (v == -kInf) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double value() const {
    if (max_ == -kInf) return -kInf;
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -kInf;
  double sum_ = 0.0;
};

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      compensation_ += (sum_ - t) + v;
    } else {
      compensation_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Shortest decimal string that parses back to exactly `value`.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buffer.data(), end);
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

namespace detail {

struct KronrodPanel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const KronrodPanel& other) const { return error < other.error; }
};

// 7-point Gauss / 15-point Kronrod pair on [a, b].
template <typename F>
KronrodPanel kronrod15(F& f, double a, double b) {
  static constexpr std::array<double, 8> kNodes = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> kKronrodWeights = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> kGaussWeights = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = kKronrodWeights[7] * f_center;
  double gauss = kGaussWeights[3] * f_center;
  for (std::size_t k = 0; k < 7; ++k) {
    const double dx = half * kNodes[k];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[k] * pair;
    if (k % 2 == 1) gauss += kGaussWeights[k / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of `f` over the union of the
// segments delimited by `breakpoints` (sorted, at least two entries). The
// panel with the largest error estimate is bisected until the summed error
// meets max(abs_tol, rel_tol * |I|).
template <typename F>
  requires std::invocable<F&, double>
QuadratureResult integrate(F&& f, std::span<const double> breakpoints,
                           const QuadratureOptions& options = {}) {
  if (breakpoints.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "integrate needs at least two breakpoints");
  }
  std::priority_queue<detail::KronrodPanel> panels;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k] < breakpoints[k + 1])) continue;
    panels.push(detail::kronrod15(f, breakpoints[k], breakpoints[k + 1]));
  }
  QuadratureResult result;
  if (panels.empty()) return result;

  auto totals = [&panels]() {
    auto copy = panels;
    CompensatedSum value;
    CompensatedSum error;
    while (!copy.empty()) {
      value.add(copy.top().value);
      error.add(copy.top().error);
      copy.pop();
    }
    return std::pair{value.value(), error.value()};
  };

  // Running totals; recomputed exactly every so often to shed drift.
  auto [value, error] = totals();
  std::size_t since_refresh = 0;
  while (true) {
    if (!std::isfinite(value) || !std::isfinite(error)) {
      throw Error(ErrorCode::kIntegrationFailure, "integrand produced a non-finite value");
    }
    const double goal = std::max(options.abs_tol, options.rel_tol * std::abs(value));
    if (error <= goal) break;
    if (panels.size() >= options.max_intervals) {
      std::tie(value, error) = totals();
      if (error <= std::max(options.abs_tol, options.rel_tol * std::abs(value))) break;
      throw Error(ErrorCode::kIntegrationFailure,
                  "no convergence after " + std::to_string(panels.size()) +
                      " panels (error " + format_double(error) + ", value " +
                      format_double(value) + ")");
    }
    const detail::KronrodPanel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // Panel can no longer be split in floating point; accept what we have.
      std::tie(value, error) = totals();
      break;
    }
    panels.pop();
    const detail::KronrodPanel left = detail::kronrod15(f, worst.a, mid);
    const detail::KronrodPanel right = detail::kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    if (++since_refresh == 256) {
      std::tie(value, error) = totals();
      since_refresh = 0;
    }
  }
  std::tie(result.value, result.error) = totals();
  result.intervals = panels.size();
  return result;
}

template <typename F>
  requires std::invocable<F&, double>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& options = {}) {
  const std::array<double, 2> ends = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(ends), options);
}

}  // namespace puffercal

#endif  // PUFFERCAL_NUMERIC_HPP_
