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

// Noise calibration for (alpha, epsilon)-Renyi pufferfish privacy.
//
// For each secret pair the prior distributions are coupled by the monotone
// plan pi*, and the noise parameter is set so that a transport functional
//
//   Laplace:      E_pi*[exp(alpha |x - x'| / b)]                  = e^{(alpha-1) eps}
//   Gaussian:     E_pi*[exp(alpha (alpha-1) (x - x')^2 / 2 sigma^2)] = e^{(alpha-1) eps}
//   Exponential:  E_pi*[exp(alpha eta(theta) c(x - x'))]           = e^{(alpha-1) eps}
//
// holds. All functionals are decreasing in the parameter and are evaluated
// in log space, so large alpha cannot overflow. The returned parameter sits
// on the side where the functional is <= the target.

#ifndef PUFFERCAL_CALIBRATE_HPP_
#define PUFFERCAL_CALIBRATE_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "puffercal/dist.hpp"
#include "puffercal/error.hpp"
#include "puffercal/parallel.hpp"
#include "puffercal/solve.hpp"
#include "puffercal/transport.hpp"

namespace puffercal {

struct CalibrationResult {
  double parameter = 0.0;
  std::size_t binding_pair_index = 0;
  std::string binding_label;
  // Left and right side of the solved condition, in log scale. For
  // alpha = inf these are the worst-case log ratio bound and epsilon.
  double log_functional = 0.0;
  double log_target = 0.0;
  int iterations = 0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  bool guarantee_side = true;
  bool no_noise_needed = false;
  // Set for the alpha in (0,1) condition, whose operational meaning is open.
  bool experimental = false;

  double functional_value() const { return std::exp(log_functional); }
  double target_value() const { return std::exp(log_target); }
};

struct ScenarioPair {
  DiscreteDistribution p_i;
  DiscreteDistribution p_j;
  std::string label;
};

// Nonempty list of secret pairs, one entry per (pair, prior belief).
class ScenarioSet {
 public:
  static ScenarioSet create(std::vector<ScenarioPair> pairs) {
    if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "scenario set is empty");
    return ScenarioSet(std::move(pairs));
  }

  const std::vector<ScenarioPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const ScenarioPair& operator[](std::size_t k) const { return pairs_[k]; }

 private:
  explicit ScenarioSet(std::vector<ScenarioPair> pairs) : pairs_(std::move(pairs)) {}
  std::vector<ScenarioPair> pairs_;
};

struct CalibrateOptions {
  SolveOptions solve;
  int jobs = 1;
};

namespace detail {

inline CalibrationResult no_noise_result(double log_target) {
  CalibrationResult r;
  r.parameter = 0.0;
  r.log_functional = 0.0;
  r.log_target = log_target;
  r.no_noise_needed = true;
  r.guarantee_side = true;
  return r;
}

inline CalibrationResult from_solve(const SolveResult& s, double log_target) {
  CalibrationResult r;
  r.parameter = s.root;
  r.log_functional = s.value;
  r.log_target = log_target;
  r.iterations = s.iterations;
  r.bracket_low = s.low;
  r.bracket_high = s.high;
  r.guarantee_side = s.value <= log_target;
  return r;
}

inline void require_finite_order_above_one(const PrivacySpec& spec, std::string_view what) {
  if (spec.sub_unit() || spec.infinite_order()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " requires alpha in (1, inf), got " + format_double(spec.alpha()));
  }
}

}  // namespace detail

// b = W_inf(P_i, P_j) / epsilon, the limit alpha -> inf of the Laplace rule.
inline CalibrationResult calibrate_winf_laplace(const DiscreteDistribution& p_i,
                                                const DiscreteDistribution& p_j, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  const double w = w_infinity(p_i, p_j);
  if (w == 0.0) return detail::no_noise_result(epsilon);
  CalibrationResult r;
  r.parameter = w / epsilon;
  r.log_functional = w / r.parameter;
  r.log_target = epsilon;
  r.guarantee_side = r.log_functional <= epsilon * (1.0 + 1e-15);
  return r;
}

inline CalibrationResult calibrate_laplace(const Coupling& plan, const PrivacySpec& spec,
                                           const CalibrateOptions& options = {}) {
  if (spec.sub_unit()) {
    throw Error(ErrorCode::kInvalidArgument,
                "calibrate_laplace requires alpha > 1; use feasible_b_sub_unit_alpha");
  }
  const double w = plan.max_distance();
  if (spec.infinite_order()) {
    if (w == 0.0) return detail::no_noise_result(spec.epsilon());
    CalibrationResult r;
    r.parameter = w / spec.epsilon();
    r.log_functional = w / r.parameter;
    r.log_target = spec.epsilon();
    return r;
  }
  if (plan.diagonal()) return detail::no_noise_result(spec.log_target());
  const double alpha = spec.alpha();
  const double target = spec.log_target();
  auto functional = [&](double b) {
    return log_exp_moment(plan, [&](double d) { return alpha * d / b; });
  };
  const double upper = w * alpha / target;
  const double lower = w * alpha / (target + std::numbers::ln2);
  return detail::from_solve(solve_decreasing(functional, target, {lower, upper}, options.solve),
                            target);
}

inline CalibrationResult calibrate_laplace(const DiscreteDistribution& p_i,
                                           const DiscreteDistribution& p_j,
                                           const PrivacySpec& spec,
                                           const CalibrateOptions& options = {}) {
  return calibrate_laplace(monotone_coupling(p_i, p_j), spec, options);
}

inline CalibrationResult calibrate_gaussian(const Coupling& plan, const PrivacySpec& spec,
                                            const CalibrateOptions& options = {}) {
  detail::require_finite_order_above_one(spec, "calibrate_gaussian");
  if (plan.diagonal()) return detail::no_noise_result(spec.log_target());
  const double alpha = spec.alpha();
  const double target = spec.log_target();
  const double w = plan.max_distance();
  auto functional = [&](double sigma) {
    const double scale = alpha * (alpha - 1.0) / (2.0 * sigma * sigma);
    return log_exp_moment(plan, [&](double d) { return scale * d * d; });
  };
  const double upper = std::sqrt(alpha * w * w / (2.0 * spec.epsilon()));
  const double lower =
      std::sqrt(alpha * (alpha - 1.0) * w * w / (2.0 * (target + std::numbers::ln2)));
  return detail::from_solve(solve_decreasing(functional, target, {lower, upper}, options.solve),
                            target);
}

inline CalibrationResult calibrate_gaussian(const DiscreteDistribution& p_i,
                                            const DiscreteDistribution& p_j,
                                            const PrivacySpec& spec,
                                            const CalibrateOptions& options = {}) {
  return calibrate_gaussian(monotone_coupling(p_i, p_j), spec, options);
}

inline CalibrationResult calibrate_exponential(const Coupling& plan, const Cost& cost,
                                               const Rate& rate, const PrivacySpec& spec,
                                               const CalibrateOptions& options = {}) {
  if (spec.sub_unit()) {
    throw Error(ErrorCode::kInvalidArgument, "calibrate_exponential requires alpha > 1");
  }
  double cost_max = 0.0;
  for (const auto& e : plan) cost_max = std::max(cost_max, cost(e.x - e.x_prime));
  if (cost_max == 0.0) {
    return detail::no_noise_result(spec.infinite_order() ? spec.epsilon() : spec.log_target());
  }
  if (spec.infinite_order()) {
    CalibrationResult r;
    r.parameter = rate.inverse(spec.epsilon() / cost_max);
    r.log_functional = rate.eta(r.parameter) * cost_max;
    r.log_target = spec.epsilon();
    r.guarantee_side = r.log_functional <= spec.epsilon() * (1.0 + 1e-12);
    return r;
  }
  const double alpha = spec.alpha();
  const double target = spec.log_target();
  auto functional = [&](double theta) {
    const double eta = rate.eta(theta);
    return log_exp_moment(plan, [&](double d) { return alpha * eta * cost(d); });
  };
  const double upper = rate.inverse(target / (alpha * cost_max));
  const double lower = rate.inverse((target + std::numbers::ln2) / (alpha * cost_max));
  return detail::from_solve(solve_decreasing(functional, target, {lower, upper}, options.solve),
                            target);
}

inline CalibrationResult calibrate_exponential(const DiscreteDistribution& p_i,
                                               const DiscreteDistribution& p_j, const Cost& cost,
                                               const Rate& rate, const PrivacySpec& spec,
                                               const CalibrateOptions& options = {}) {
  return calibrate_exponential(monotone_coupling(p_i, p_j), cost, rate, spec, options);
}

// Prior-work baseline: b such that the order-alpha Renyi divergence between
// two Laplace(b) laws whose centers are W_inf apart equals epsilon,
//   (1/(alpha-1)) log( alpha/(2alpha-1) e^{(alpha-1)W/b}
//                      + (alpha-1)/(2alpha-1) e^{-alpha W/b} ) = epsilon.
inline CalibrationResult baseline_laplace_rpp(const DiscreteDistribution& p_i,
                                              const DiscreteDistribution& p_j,
                                              const PrivacySpec& spec,
                                              const CalibrateOptions& options = {}) {
  if (spec.sub_unit()) {
    throw Error(ErrorCode::kInvalidArgument, "baseline_laplace_rpp requires alpha > 1");
  }
  const double w = w_infinity(p_i, p_j);
  if (w == 0.0) return detail::no_noise_result(spec.epsilon());
  if (spec.infinite_order()) return calibrate_winf_laplace(p_i, p_j, spec.epsilon());
  const double alpha = spec.alpha();
  const double log_near = std::log(alpha / (2.0 * alpha - 1.0));
  const double log_far = std::log((alpha - 1.0) / (2.0 * alpha - 1.0));
  auto divergence = [&](double b) {
    const std::array<double, 2> terms = {log_near + (alpha - 1.0) * w / b,
                                         log_far - alpha * w / b};
    return log_sum_exp(terms) / (alpha - 1.0);
  };
  const double upper = w / spec.epsilon();
  const double lower = 0.25 * w * std::min(1.0 / spec.epsilon(), std::sqrt(alpha / (2.0 * spec.epsilon())));
  return detail::from_solve(
      solve_decreasing(divergence, spec.epsilon(), {lower, upper}, options.solve), spec.epsilon());
}

// sigma = sqrt(alpha W_inf^2 / (2 epsilon)).
inline CalibrationResult baseline_gaussian_rpp(const DiscreteDistribution& p_i,
                                               const DiscreteDistribution& p_j,
                                               const PrivacySpec& spec) {
  detail::require_finite_order_above_one(spec, "baseline_gaussian_rpp");
  const double w = w_infinity(p_i, p_j);
  if (w == 0.0) return detail::no_noise_result(spec.epsilon());
  CalibrationResult r;
  r.parameter = std::sqrt(spec.alpha() * w * w / (2.0 * spec.epsilon()));
  r.log_functional = spec.alpha() * w * w / (2.0 * r.parameter * r.parameter);
  r.log_target = spec.epsilon();
  r.guarantee_side = r.log_functional <= spec.epsilon() * (1.0 + 1e-12);
  return r;
}

// Gaussian mechanism for (alpha, epsilon)-RDP with sensitivity delta:
// sigma^2 = alpha delta^2 / (2 epsilon).
inline double rdp_gaussian_closed_form(double delta_sensitivity, const PrivacySpec& spec) {
  detail::require_finite_order_above_one(spec, "rdp_gaussian_closed_form");
  if (!(delta_sensitivity >= 0.0) || !std::isfinite(delta_sensitivity)) {
    throw Error(ErrorCode::kInvalidArgument, "sensitivity must be a nonnegative number");
  }
  return std::sqrt(spec.alpha() * delta_sensitivity * delta_sensitivity / (2.0 * spec.epsilon()));
}

// alpha in (0, 1): smallest b with E_pi*[exp(-alpha |x - x'| / b)] >=
// e^{(alpha-1) eps}. The left side grows with b, so we solve the decreasing
// function -log E[...] against (1 - alpha) eps.
inline CalibrationResult feasible_b_sub_unit_alpha(const DiscreteDistribution& p_i,
                                                   const DiscreteDistribution& p_j,
                                                   const PrivacySpec& spec,
                                                   const CalibrateOptions& options = {}) {
  if (!spec.sub_unit()) {
    throw Error(ErrorCode::kInvalidArgument, "feasible_b_sub_unit_alpha requires alpha in (0,1)");
  }
  const double alpha = spec.alpha();
  const double target = (1.0 - alpha) * spec.epsilon();
  if (!(target > 0.0)) {
    throw Error(ErrorCode::kInfeasibleEvenAtInfinity,
                "e^{(alpha-1) eps} >= 1 cannot be reached by the left side");
  }
  const Coupling plan = monotone_coupling(p_i, p_j);
  CalibrationResult r;
  r.experimental = true;
  r.log_target = spec.log_target();
  if (plan.diagonal()) {
    r.no_noise_needed = true;
    return r;
  }
  // b -> 0 keeps only the mass that does not move.
  double stay = 0.0;
  for (const auto& e : plan) {
    if (e.x == e.x_prime) stay += e.mass;
  }
  if (stay > 0.0 && -std::log(stay) <= target) {
    r.no_noise_needed = true;
    r.log_functional = std::log(stay);
    return r;
  }
  auto decreasing = [&](double b) {
    return -log_exp_moment(plan, [&](double d) { return -alpha * d / b; });
  };
  const double w = plan.max_distance();
  const double upper = alpha * w / target;
  const SolveResult s = solve_decreasing(decreasing, target, {0.5 * upper, upper}, options.solve);
  r.parameter = s.root;
  r.log_functional = -s.value;
  r.iterations = s.iterations;
  r.bracket_low = s.low;
  r.bracket_high = s.high;
  r.guarantee_side = r.log_functional >= r.log_target;
  return r;
}

enum class MechanismKind {
  kLaplace,
  kGaussian,
  kExponential,
  kWinfLaplace,
  kBaselineLaplace,
  kBaselineGaussian,
};

struct MechanismChoice {
  MechanismKind kind = MechanismKind::kLaplace;
  Cost cost = Cost::abs();
  Rate rate = Rate::reciprocal();

  // laplace, gaussian, exponential, winf, baseline-laplace, baseline-gaussian.
  static MechanismChoice parse(std::string_view name) {
    MechanismChoice c;
    if (name == "laplace") {
      c.kind = MechanismKind::kLaplace;
    } else if (name == "gaussian") {
      c.kind = MechanismKind::kGaussian;
    } else if (name == "exponential") {
      c.kind = MechanismKind::kExponential;
    } else if (name == "winf") {
      c.kind = MechanismKind::kWinfLaplace;
    } else if (name == "baseline-laplace") {
      c.kind = MechanismKind::kBaselineLaplace;
    } else if (name == "baseline-gaussian") {
      c.kind = MechanismKind::kBaselineGaussian;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown mechanism '" + std::string(name) + "'");
    }
    return c;
  }

  std::string name() const {
    switch (kind) {
      case MechanismKind::kLaplace: return "laplace";
      case MechanismKind::kGaussian: return "gaussian";
      case MechanismKind::kExponential: return "exponential";
      case MechanismKind::kWinfLaplace: return "winf";
      case MechanismKind::kBaselineLaplace: return "baseline-laplace";
      case MechanismKind::kBaselineGaussian: return "baseline-gaussian";
    }
    return "laplace";
  }

  bool gaussian_noise() const {
    return kind == MechanismKind::kGaussian || kind == MechanismKind::kBaselineGaussian;
  }
};

// Noise law for a calibrated parameter; nullopt when the parameter is 0
// (no noise needed).
inline std::optional<MechanismParams> mechanism_for(const MechanismChoice& choice,
                                                    double parameter) {
  if (parameter == 0.0) return std::nullopt;
  switch (choice.kind) {
    case MechanismKind::kGaussian:
    case MechanismKind::kBaselineGaussian:
      return make_gaussian(parameter);
    case MechanismKind::kExponential:
      return make_exponential(parameter, choice.cost, choice.rate);
    default:
      return make_laplace(parameter);
  }
}

// Variance of the noise at `parameter`: 2 b^2 for Laplace, sigma^2 for
// Gaussian, numerical second moment for the exponential mechanism.
inline double variance_for(const MechanismChoice& choice, double parameter) {
  if (parameter == 0.0) return 0.0;
  if (choice.kind == MechanismKind::kExponential) {
    return Exponential::create(parameter, choice.cost, choice.rate, false).variance();
  }
  return choice.gaussian_noise() ? parameter * parameter : 2.0 * parameter * parameter;
}

// Single-pair dispatch. Laplace with alpha in (0,1) goes to the experimental
// sufficient condition; alpha = inf goes to the closed forms.
inline CalibrationResult calibrate_pair(const ScenarioPair& pair, const MechanismChoice& choice,
                                        const PrivacySpec& spec,
                                        const CalibrateOptions& options = {}) {
  switch (choice.kind) {
    case MechanismKind::kLaplace:
      if (spec.sub_unit()) return feasible_b_sub_unit_alpha(pair.p_i, pair.p_j, spec, options);
      return calibrate_laplace(pair.p_i, pair.p_j, spec, options);
    case MechanismKind::kGaussian:
      return calibrate_gaussian(pair.p_i, pair.p_j, spec, options);
    case MechanismKind::kExponential:
      return calibrate_exponential(pair.p_i, pair.p_j, choice.cost, choice.rate, spec, options);
    case MechanismKind::kWinfLaplace:
      return calibrate_winf_laplace(pair.p_i, pair.p_j, spec.epsilon());
    case MechanismKind::kBaselineLaplace:
      return baseline_laplace_rpp(pair.p_i, pair.p_j, spec, options);
    case MechanismKind::kBaselineGaussian:
      return baseline_gaussian_rpp(pair.p_i, pair.p_j, spec);
  }
  throw Error(ErrorCode::kInvalidArgument, "unhandled mechanism");
}

// Per-pair results in scenario order. Errors name the failing pair.
inline std::vector<CalibrationResult> calibrate_each_pair(const ScenarioSet& scenarios,
                                                          const MechanismChoice& choice,
                                                          const PrivacySpec& spec,
                                                          const CalibrateOptions& options = {}) {
  std::vector<CalibrationResult> results(scenarios.size());
  parallel_for(scenarios.size(), options.jobs, [&](std::size_t k) {
    const ScenarioPair& pair = scenarios[k];
    try {
      results[k] = calibrate_pair(pair, choice, spec, options);
    } catch (const Error& e) {
      throw Error(e.code(), "pair '" + pair.label + "': " + e.detail());
    }
    results[k].binding_pair_index = k;
    results[k].binding_label = pair.label;
  });
  return results;
}

// Largest parameter over all pairs; ties go to the lowest index.
inline CalibrationResult calibrate_over_scenarios(const ScenarioSet& scenarios,
                                                  const MechanismChoice& choice,
                                                  const PrivacySpec& spec,
                                                  const CalibrateOptions& options = {}) {
  const std::vector<CalibrationResult> each = calibrate_each_pair(scenarios, choice, spec, options);
  std::size_t best = 0;
  for (std::size_t k = 1; k < each.size(); ++k) {
    if (each[k].parameter > each[best].parameter) best = k;
  }
  CalibrationResult r = each[best];
  bool all_hold = true;
  for (const auto& e : each) all_hold = all_hold && e.guarantee_side;
  r.guarantee_side = all_hold;
  return r;
}

}  // namespace puffercal

#endif  // PUFFERCAL_CALIBRATE_HPP_
