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

#ifndef PUFFERCAL_SOLVE_HPP_
#define PUFFERCAL_SOLVE_HPP_

#include <cmath>
#include <concepts>
#include <limits>
#include <utility>

#include "puffercal/error.hpp"
#include "puffercal/numeric.hpp"

namespace puffercal {

struct SolveOptions {
  double rel_tol = 1e-9;
  int max_expansions = 200;
  int max_iterations = 1000;
};

struct SolveResult {
  // Bracket endpoint on the feasible side: f(root) <= target.
  double root = 0.0;
  double value = 0.0;
  int iterations = 0;
  double low = 0.0;
  double high = 0.0;
};

// Root of f(x) = target for f continuous and strictly decreasing on (0, inf).
//
// The hint is widened geometrically until f(low) >= target >= f(high), then
// Brent's method (inverse quadratic interpolation / secant / bisection)
// shrinks the bracket to a relative width of rel_tol. The endpoint where
// f <= target is returned, so the constraint f(x) <= target holds exactly at
// the answer instead of approximately.
template <typename F>
  requires std::invocable<F&, double>
SolveResult solve_decreasing(F&& f, double target, std::pair<double, double> hint,
                             const SolveOptions& options = {}) {
  double low = hint.first;
  double high = hint.second;
  if (!(low > 0.0) || !std::isfinite(low)) low = 1.0;
  if (!(high > 0.0) || !std::isfinite(high)) high = 2.0 * low;
  if (high < low) std::swap(low, high);
  if (high == low) high = 2.0 * low;

  auto eval = [&](double x) {
    const double v = f(x);
    if (std::isnan(v)) {
      throw Error(ErrorCode::kNoRoot, "function is NaN at " + format_double(x));
    }
    return v;
  };

  double f_low = eval(low);
  double f_high = eval(high);
  if (f_low < f_high) {
    throw Error(ErrorCode::kNotMonotone, "f(" + format_double(low) + ") < f(" +
                                             format_double(high) + ") on the initial bracket");
  }
  int expansions = 0;
  while (f_low < target) {
    if (++expansions > options.max_expansions) {
      throw Error(ErrorCode::kNoRoot, "f stays below the target as x -> 0");
    }
    high = low;
    f_high = f_low;
    low *= 0.5;
    f_low = eval(low);
    if (f_low < f_high) {
      throw Error(ErrorCode::kNotMonotone, "f increases when x shrinks to " + format_double(low));
    }
  }
  expansions = 0;
  while (f_high > target) {
    if (++expansions > options.max_expansions) {
      throw Error(ErrorCode::kNoRoot, "f stays above the target as x -> inf");
    }
    low = high;
    f_low = f_high;
    high *= 2.0;
    f_high = eval(high);
    if (f_high > f_low) {
      throw Error(ErrorCode::kNotMonotone, "f increases when x grows to " + format_double(high));
    }
  }

  SolveResult result;
  if (f_low == target) {
    result = {low, f_low, 0, low, low};
    return result;
  }
  if (f_high == target) {
    result = {high, f_high, 0, high, high};
    return result;
  }

  // Brent on h(x) = f(x) - target with h(a) > 0 > h(b).
  double a = low;
  double b = high;
  double fa = f_low - target;
  double fb = f_high - target;
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * kEps * std::abs(b) + 0.5 * options.rel_tol * std::abs(b);
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) break;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = eval(b) - target;
  }
  if (iter == options.max_iterations) {
    throw Error(ErrorCode::kNoRoot, "Brent iteration limit reached");
  }

  // b and c bracket the root; pick the one on the feasible side.
  const double lo = std::min(b, c);
  const double hi = std::max(b, c);
  if (fb <= 0.0) {
    result.root = b;
    result.value = fb + target;
  } else {
    result.root = c;
    result.value = fc + target;
  }
  result.iterations = iter;
  result.low = lo;
  result.high = hi;
  return result;
}

}  // namespace puffercal

#endif  // PUFFERCAL_SOLVE_HPP_
