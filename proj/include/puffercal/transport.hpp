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

// One-dimensional optimal transport between discrete distributions.
//
// In 1-D the comonotone (quantile-aligned) coupling minimizes the expected
// cost for every convex function of |x - x'|, and it also minimizes the
// worst-case displacement. Every calibration functional in this library is
// therefore an expectation over this single plan.

#ifndef PUFFERCAL_TRANSPORT_HPP_
#define PUFFERCAL_TRANSPORT_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <vector>

#include "puffercal/dist.hpp"
#include "puffercal/error.hpp"
#include "puffercal/numeric.hpp"

namespace puffercal {

struct CouplingEntry {
  double x;
  double x_prime;
  double mass;

  double distance() const { return std::abs(x - x_prime); }
};

// Finite transport plan. Entries are sorted by (x, x') and, when produced by
// monotone_coupling, comonotone.
class Coupling {
 public:
  Coupling() = default;
  explicit Coupling(std::vector<CouplingEntry> entries) : entries_(std::move(entries)) {}

  const std::vector<CouplingEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // True when every unit of mass stays in place.
  bool diagonal() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const CouplingEntry& e) { return e.x == e.x_prime; });
  }

  double max_distance() const {
    double d = 0.0;
    for (const auto& e : entries_) d = std::max(d, e.distance());
    return d;
  }

 private:
  std::vector<CouplingEntry> entries_;
};

// Cumulative levels closer than this are treated as equal, so rounding in
// the two CDFs does not create spurious slivers of mass between far atoms.
inline constexpr double kLevelTolerance = 1e-13;

// North-west corner sweep over the two sorted mass lists: the discrete form
// of the plan d^2/dx dx' min{F_P(x), F_Q(x')}.
inline Coupling monotone_coupling(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const auto& xs = p.atoms();
  const auto& ys = q.atoms();
  const auto& cp = p.cumulative();
  const auto& cq = q.cumulative();
  std::vector<CouplingEntry> entries;
  entries.reserve(xs.size() + ys.size() - 1);
  std::size_t i = 0;
  std::size_t j = 0;
  double level = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double next = std::min(cp[i], cq[j]);
    const double mass = next - level;
    if (mass > 0.0) entries.push_back({xs[i], ys[j], mass});
    level = std::max(level, next);
    const bool advance_i = cp[i] <= next + kLevelTolerance;
    const bool advance_j = cq[j] <= next + kLevelTolerance;
    if (advance_i) ++i;
    if (advance_j) ++j;
  }
  return Coupling(std::move(entries));
}

// sum g(|x - x'|) * mass, compensated. A non-finite term raises
// FunctionalOverflow.
template <typename G>
  requires std::invocable<G&, double>
double coupling_expectation(const Coupling& plan, G&& g) {
  CompensatedSum sum;
  for (const auto& e : plan) {
    const double v = g(e.distance());
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kFunctionalOverflow,
                  "integrand is not finite at |x - x'| = " + format_double(e.distance()));
    }
    sum.add(v * e.mass);
  }
  return sum.value();
}

// log sum mass * exp(h(|x - x'|)), the overflow-free form of
// coupling_expectation for exponential integrands.
template <typename H>
  requires std::invocable<H&, double>
double log_exp_moment(const Coupling& plan, H&& exponent) {
  LogSumExp acc;
  for (const auto& e : plan) acc.add(std::log(e.mass) + exponent(e.distance()));
  return acc.value();
}

// (sum |x - x'|^p mass)^(1/p) on the monotone plan; W_p for p >= 1.
inline double wasserstein(const DiscreteDistribution& p, const DiscreteDistribution& q,
                          double order) {
  if (!(order >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "Wasserstein order must be >= 1");
  const Coupling plan = monotone_coupling(p, q);
  if (std::isinf(order)) return plan.max_distance();
  const double moment = coupling_expectation(plan, [order](double d) { return std::pow(d, order); });
  return std::pow(moment, 1.0 / order);
}

// Largest displacement in the support of the monotone plan.
inline double w_infinity(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return monotone_coupling(p, q).max_distance();
}

}  // namespace puffercal

#endif  // PUFFERCAL_TRANSPORT_HPP_
