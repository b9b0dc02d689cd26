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

// Independent checks of a calibrated mechanism: Renyi divergence between the
// noisy posteriors by quadrature, the Chernoff breach bound, and a
// Monte-Carlo estimate of the breach probability.

#ifndef PUFFERCAL_VERIFY_HPP_
#define PUFFERCAL_VERIFY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "puffercal/calibrate.hpp"
#include "puffercal/dist.hpp"
#include "puffercal/error.hpp"
#include "puffercal/numeric.hpp"
#include "puffercal/parallel.hpp"

namespace puffercal {

namespace detail {

inline std::vector<double> union_atoms(const DiscreteDistribution& p,
                                       const DiscreteDistribution& q) {
  std::vector<double> out;
  out.reserve(p.size() + q.size());
  std::merge(p.atoms().begin(), p.atoms().end(), q.atoms().begin(), q.atoms().end(),
             std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline double log_ratio(const MechanismParams& mech, const DiscreteDistribution& p,
                        const DiscreteDistribution& q, double y) {
  return posterior_log_density(mech, p, y) - posterior_log_density(mech, q, y);
}

// log of int_a^b exp(h(y)) dy, with the integrand rescaled by its largest
// sampled value so that neither overflow nor underflow occurs.
template <typename H>
double log_integral(H& h, double a, double b, const QuadratureOptions& options) {
  constexpr int kProbe = 64;
  double shift = -kInf;
  for (int k = 0; k <= kProbe; ++k) {
    shift = std::max(shift, h(a + (b - a) * k / kProbe));
  }
  if (!std::isfinite(shift)) {
    throw Error(ErrorCode::kIntegrationFailure, "log integrand is not finite on the window");
  }
  auto scaled = [&](double y) { return std::exp(h(y) - shift); };
  const QuadratureResult r = integrate(scaled, a, b, options);
  if (!(r.value > 0.0)) return -kInf;
  return shift + std::log(r.value);
}

}  // namespace detail

struct DivergenceOptions {
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
  // Grid points per gap between consecutive atoms for alpha = inf.
  int grid_per_gap = 4096;
};

// D_alpha(P_i * N || P_j * N) for alpha in (0,1) u (1, inf].
inline double renyi_divergence_numeric(const DiscreteDistribution& p_i,
                                       const DiscreteDistribution& p_j,
                                       const MechanismParams& mech, double alpha,
                                       const DivergenceOptions& options = {}) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "divergence order must lie in (0,1) u (1,inf], got " + format_double(alpha));
  }
  if (p_i == p_j) return 0.0;
  const std::vector<double> atoms = detail::union_atoms(p_i, p_j);
  const double width = truncation_half_width(mech);

  if (std::isinf(alpha)) {
    double best = -kInf;
    auto probe = [&](double y) { best = std::max(best, detail::log_ratio(mech, p_i, p_j, y)); };
    std::vector<double> knots;
    knots.push_back(atoms.front() - width);
    knots.insert(knots.end(), atoms.begin(), atoms.end());
    knots.push_back(atoms.back() + width);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const double a = knots[k];
      const double step = (knots[k + 1] - a) / options.grid_per_gap;
      for (int g = 0; g < options.grid_per_gap; ++g) probe(a + g * step);
    }
    probe(knots.back());
    // Tail limits.
    std::visit(Overloaded{[&](const Laplace&) {
                            // The ratio is constant beyond the extreme atoms.
                          },
                          [&](const Gaussian&) {
                            const auto edge_ratio = [&](bool right) {
                              const double xi = right ? p_i.max_atom() : p_i.min_atom();
                              const double xj = right ? p_j.max_atom() : p_j.min_atom();
                              if (xi != xj) {
                                return (right ? xi > xj : xi < xj) ? kInf : -kInf;
                              }
                              const double mi = right ? p_i.masses().back() : p_i.masses().front();
                              const double mj = right ? p_j.masses().back() : p_j.masses().front();
                              return std::log(mi) - std::log(mj);
                            };
                            best = std::max({best, edge_ratio(true), edge_ratio(false)});
                          },
                          [&](const Exponential&) {
                            double reach = width;
                            for (int k = 0; k < 40; ++k) {
                              reach *= 2.0;
                              probe(atoms.front() - reach);
                              probe(atoms.back() + reach);
                            }
                          }},
               mech);
    return std::max(best, 0.0);
  }

  // Finite alpha: integrate exp(alpha log p - (alpha - 1) log q) piecewise
  // between atoms, then extend both tails until the added mass is negligible.
  auto h = [&](double y) {
    const double lp = posterior_log_density(mech, p_i, y);
    const double lq = posterior_log_density(mech, p_j, y);
    if (lp == -kInf) return -kInf;
    return alpha * lp - (alpha - 1.0) * lq;
  };
  QuadratureOptions quad;
  quad.rel_tol = options.rel_tol;
  quad.max_intervals = options.max_intervals;
  LogSumExp total;
  std::vector<double> knots;
  knots.push_back(atoms.front() - width);
  knots.insert(knots.end(), atoms.begin(), atoms.end());
  knots.push_back(atoms.back() + width);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    if (knots[k] < knots[k + 1]) total.add(detail::log_integral(h, knots[k], knots[k + 1], quad));
  }
  constexpr double kNegligible = -40.0;  // relative to the running total
  for (const int side : {-1, 1}) {
    double edge = side < 0 ? knots.front() : knots.back();
    double chunk = width;
    for (int k = 0; k < 60; ++k) {
      const double next = edge + side * chunk;
      const double piece = detail::log_integral(h, std::min(edge, next), std::max(edge, next), quad);
      total.add(piece);
      const bool decaying = h(next) <= h(edge);
      edge = next;
      chunk *= 2.0;
      if (decaying && piece - total.value() < kNegligible) break;
      if (k == 59) {
        throw Error(ErrorCode::kIntegrationFailure, "divergence integrand tail does not decay");
      }
    }
  }
  double d = total.value() / (alpha - 1.0);
  if (d < 0.0 && d > -1e-9) d = 0.0;
  return d;
}

// Renyi divergence between the priors themselves (no noise added).
inline double renyi_divergence_discrete(const DiscreteDistribution& p,
                                        const DiscreteDistribution& q, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "divergence order must lie in (0,1) u (1,inf], got " + format_double(alpha));
  }
  if (p == q) return 0.0;
  const auto& xp = p.atoms();
  const auto& xq = q.atoms();
  const auto mass_q = [&](double x) -> double {
    const auto it = std::lower_bound(xq.begin(), xq.end(), x);
    if (it == xq.end() || *it != x) return 0.0;
    return q.masses()[static_cast<std::size_t>(it - xq.begin())];
  };
  if (std::isinf(alpha)) {
    double best = -kInf;
    for (std::size_t k = 0; k < xp.size(); ++k) {
      const double mq = mass_q(xp[k]);
      if (mq == 0.0) return kInf;
      best = std::max(best, std::log(p.masses()[k]) - std::log(mq));
    }
    return std::max(best, 0.0);
  }
  LogSumExp acc;
  for (std::size_t k = 0; k < xp.size(); ++k) {
    const double mq = mass_q(xp[k]);
    if (mq == 0.0) {
      if (alpha > 1.0) return kInf;
      continue;
    }
    acc.add(alpha * std::log(p.masses()[k]) + (1.0 - alpha) * std::log(mq));
  }
  const double log_sum = acc.value();
  if (log_sum == -kInf) return kInf;
  const double d = log_sum / (alpha - 1.0);
  return d < 0.0 && d > -1e-12 ? 0.0 : d;
}

// e^{(alpha-1)(D - epsilon)}: bound on Pr(p_i(Y)/p_j(Y) > e^epsilon) under
// P_i. Values above 1 are returned as computed; they carry no information.
inline double chernoff_breach_bound(double divergence, const PrivacySpec& spec) {
  if (spec.sub_unit() || spec.infinite_order()) {
    throw Error(ErrorCode::kInvalidArgument, "Chernoff bound requires alpha in (1, inf)");
  }
  return std::exp((spec.alpha() - 1.0) * (divergence - spec.epsilon()));
}

struct BreachEstimate {
  double estimate = 0.0;
  double half_width = 0.0;  // 95% normal interval
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

namespace detail {

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF sampler for the symmetric exponential-mechanism noise.
class ExponentialSampler {
 public:
  explicit ExponentialSampler(const Exponential& e) {
    constexpr int kCells = 8192;
    const double h = e.half_width();
    nodes_.resize(kCells + 1);
    cumulative_.resize(kCells + 1);
    const auto kernel = [&](double z) { return std::exp(-e.eta() * e.cost()(z)); };
    QuadratureOptions options;
    options.rel_tol = 1e-12;
    CompensatedSum sum;
    for (int k = 0; k <= kCells; ++k) {
      nodes_[k] = h * k / kCells;
      if (k > 0) sum.add(integrate(kernel, nodes_[k - 1], nodes_[k], options).value);
      cumulative_[k] = sum.value();
    }
    for (double& c : cumulative_) c /= cumulative_.back();
  }

  double operator()(std::mt19937_64& rng) const {
    const double u = unit_uniform(rng);
    const double sign = unit_uniform(rng) < 0.5 ? -1.0 : 1.0;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return sign * nodes_.back();
    const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    const double c0 = cumulative_[k - 1];
    const double c1 = cumulative_[k];
    const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return sign * (nodes_[k - 1] + t * (nodes_[k] - nodes_[k - 1]));
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
};

}  // namespace detail

// Fraction of Y ~ P_i * N with log p_i(Y) - log p_j(Y) > epsilon. The same
// seed always gives the same estimate.
inline BreachEstimate monte_carlo_breach(const DiscreteDistribution& p_i,
                                         const DiscreteDistribution& p_j,
                                         const MechanismParams& mech, double epsilon,
                                         std::uint64_t n, std::uint64_t seed) {
  if (n < 1000) throw Error(ErrorCode::kInvalidArgument, "Monte-Carlo breach needs n >= 1000");
  if (std::isnan(epsilon)) throw Error(ErrorCode::kInvalidArgument, "epsilon is NaN");
  BreachEstimate out;
  out.samples = n;
  if (p_i == p_j || epsilon == kInf) return out;

  std::mt19937_64 rng(seed);
  std::optional<detail::ExponentialSampler> exp_sampler;
  if (const auto* e = std::get_if<Exponential>(&mech)) exp_sampler.emplace(*e);
  auto noise = [&]() -> double {
    return std::visit(
        Overloaded{[&](const Laplace& l) {
                     const double u = detail::unit_uniform(rng) - 0.5;
                     const double tail = 1.0 - 2.0 * std::abs(u);
                     return -l.scale * std::copysign(std::log(tail > 0.0 ? tail : 0x1.0p-53), u);
                   },
                   [&](const Gaussian& g) {
                     // Box-Muller, one variate per call.
                     const double u1 = 1.0 - detail::unit_uniform(rng);
                     const double u2 = detail::unit_uniform(rng);
                     return g.stddev * std::sqrt(-2.0 * std::log(u1)) *
                            std::cos(2.0 * std::numbers::pi * u2);
                   },
                   [&](const Exponential&) { return (*exp_sampler)(rng); }},
        mech);
  };
  const auto& cumulative = p_i.cumulative();
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < n; ++s) {
    const double u = detail::unit_uniform(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    const double x = p_i.atoms()[static_cast<std::size_t>(it - cumulative.begin())];
    const double y = x + noise();
    if (detail::log_ratio(mech, p_i, p_j, y) > epsilon) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  out.estimate = p;
  out.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  out.half_width = 1.96 * out.standard_error;
  return out;
}

struct VerificationReport {
  std::string label;
  std::size_t pair_index = 0;
  double alpha = 0.0;
  double epsilon_target = 0.0;
  double divergence_ij = 0.0;
  double divergence_ji = 0.0;
  double slack = 0.0;
  double chernoff_bound = 0.0;
  double mc_breach_estimate = 0.0;
  double mc_half_width = 0.0;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  bool inconclusive = false;
  std::string message;
};

struct VerifyOptions {
  // Verification passes iff max divergence <= epsilon + tolerance.
  double tolerance = 1e-6;
  // 0 disables the Monte-Carlo breach estimate.
  std::uint64_t mc_samples = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  DivergenceOptions divergence;
};

// Per-pair generator seed derived from (seed, pair index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Checks D_alpha <= epsilon in both directions for every pair. Without a
// mechanism the priors are compared directly (parameter 0, no noise).
inline std::vector<VerificationReport> verify_rpp(const ScenarioSet& scenarios,
                                                  const std::optional<MechanismParams>& mech,
                                                  const PrivacySpec& spec,
                                                  const VerifyOptions& options = {}) {
  std::vector<VerificationReport> reports(scenarios.size());
  parallel_for(scenarios.size(), options.jobs, [&](std::size_t k) {
    const ScenarioPair& pair = scenarios[k];
    VerificationReport& r = reports[k];
    r.label = pair.label;
    r.pair_index = k;
    r.alpha = spec.alpha();
    r.epsilon_target = spec.epsilon();
    try {
      if (mech) {
        r.divergence_ij =
            renyi_divergence_numeric(pair.p_i, pair.p_j, *mech, spec.alpha(), options.divergence);
        r.divergence_ji =
            renyi_divergence_numeric(pair.p_j, pair.p_i, *mech, spec.alpha(), options.divergence);
      } else {
        r.divergence_ij = renyi_divergence_discrete(pair.p_i, pair.p_j, spec.alpha());
        r.divergence_ji = renyi_divergence_discrete(pair.p_j, pair.p_i, spec.alpha());
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kIntegrationFailure) throw;
      r.inconclusive = true;
      r.pass = false;
      r.message = e.detail();
      return;
    }
    const double worst = std::max(r.divergence_ij, r.divergence_ji);
    r.slack = spec.epsilon() - worst;
    r.pass = worst <= spec.epsilon() + options.tolerance;
    if (spec.infinite_order()) {
      r.chernoff_bound = r.divergence_ij <= spec.epsilon() ? 0.0 : 1.0;
    } else if (spec.sub_unit()) {
      r.chernoff_bound = 1.0;
    } else {
      r.chernoff_bound = chernoff_breach_bound(r.divergence_ij, spec);
    }
    if (options.mc_samples > 0 && mech) {
      r.seed = derive_seed(options.seed, k);
      const BreachEstimate b =
          monte_carlo_breach(pair.p_i, pair.p_j, *mech, spec.epsilon(), options.mc_samples, r.seed);
      r.mc_breach_estimate = b.estimate;
      r.mc_half_width = b.half_width;
      r.sample_count = b.samples;
    }
  });
  return reports;
}

}  // namespace puffercal

#endif  // PUFFERCAL_VERIFY_HPP_
