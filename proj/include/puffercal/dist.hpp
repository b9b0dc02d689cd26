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

// One-dimensional discrete priors, additive noise densities and the
// posterior (noisy output) densities obtained by convolving the two.

#ifndef PUFFERCAL_DIST_HPP_
#define PUFFERCAL_DIST_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "puffercal/error.hpp"
#include "puffercal/numeric.hpp"

namespace puffercal {

// Probability mass function on finitely many real atoms. Atoms are strictly
// increasing, masses strictly positive and sum to one within 1e-12.
class DiscreteDistribution {
 public:
  static constexpr double kMassTolerance = 1e-12;

  static DiscreteDistribution create(std::vector<double> atoms, std::vector<double> masses) {
    if (atoms.empty()) throw Error(ErrorCode::kEmptySample, "distribution has no atoms");
    if (atoms.size() != masses.size()) {
      throw Error(ErrorCode::kInvalidArgument, "atoms and masses differ in length");
    }
    CompensatedSum total;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (!std::isfinite(atoms[k])) {
        throw Error(ErrorCode::kInvalidValue, "non-finite atom at index " + std::to_string(k));
      }
      if (k > 0 && !(atoms[k - 1] < atoms[k])) {
        throw Error(ErrorCode::kInvalidArgument, "atoms must be strictly increasing");
      }
      if (!(masses[k] > 0.0) || !std::isfinite(masses[k])) {
        throw Error(ErrorCode::kInvalidValue, "mass at index " + std::to_string(k) +
                                                  " is not a positive finite number");
      }
      total.add(masses[k]);
    }
    if (std::abs(total.value() - 1.0) > kMassTolerance) {
      throw Error(ErrorCode::kInvalidValue,
                  "masses sum to " + format_double(total.value()) + ", not 1");
    }
    return DiscreteDistribution(std::move(atoms), std::move(masses));
  }

  static DiscreteDistribution point_mass(double at) { return create({at}, {1.0}); }

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<double>& log_masses() const { return log_masses_; }
  // cumulative()[k] is the mass of atoms_[0..k]; the last entry is exactly 1.
  const std::vector<double>& cumulative() const { return cumulative_; }
  std::size_t size() const { return atoms_.size(); }
  double min_atom() const { return atoms_.front(); }
  double max_atom() const { return atoms_.back(); }

  friend bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    return a.atoms_ == b.atoms_ && a.masses_ == b.masses_;
  }

 private:
  DiscreteDistribution(std::vector<double> atoms, std::vector<double> masses)
      : atoms_(std::move(atoms)), masses_(std::move(masses)) {
    log_masses_.reserve(masses_.size());
    cumulative_.reserve(masses_.size());
    CompensatedSum running;
    for (double m : masses_) {
      log_masses_.push_back(std::log(m));
      running.add(m);
      cumulative_.push_back(running.value());
    }
    cumulative_.back() = 1.0;
  }

  std::vector<double> atoms_;
  std::vector<double> masses_;
  std::vector<double> log_masses_;
  std::vector<double> cumulative_;
};

// Empirical distribution of `samples`: distinct values as atoms, relative
// frequencies as masses. No binning.
inline DiscreteDistribution build_empirical(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptySample, "no samples");
  std::map<double, std::size_t> counts;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(samples[k])) {
      throw Error(ErrorCode::kInvalidValue, "sample " + std::to_string(k) + " is not finite");
    }
    // -0.0 and 0.0 compare equal and share one atom.
    ++counts[samples[k] == 0.0 ? 0.0 : samples[k]];
  }
  std::vector<double> atoms;
  std::vector<double> masses;
  atoms.reserve(counts.size());
  masses.reserve(counts.size());
  const auto total = static_cast<double>(samples.size());
  for (const auto& [value, count] : counts) {
    atoms.push_back(value);
    masses.push_back(static_cast<double>(count) / total);
  }
  return DiscreteDistribution::create(std::move(atoms), std::move(masses));
}

// Right-continuous CDF.
inline double cdf(const DiscreteDistribution& dist, double x) {
  const auto& atoms = dist.atoms();
  const auto it = std::upper_bound(atoms.begin(), atoms.end(), x);
  if (it == atoms.begin()) return 0.0;
  return dist.cumulative()[static_cast<std::size_t>(it - atoms.begin()) - 1];
}

namespace detail {

inline double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

// Cost c(z) of the exponential mechanism. Symmetric and nonnegative with
// c(0) = 0; whether it is a metric depends on the kind.
class Cost {
 public:
  enum class Kind { kAbs, kSquared, kPower, kClipped };

  static Cost abs() { return Cost(Kind::kAbs, 1.0); }
  static Cost squared() { return Cost(Kind::kSquared, 2.0); }
  static Cost power(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidArgument, "power cost exponent must be positive");
    }
    return Cost(Kind::kPower, p);
  }
  // min(|z|, t): a bounded metric, so exp(-eta * c) is not integrable.
  static Cost clipped(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::kInvalidArgument, "clip threshold must be positive");
    }
    return Cost(Kind::kClipped, t);
  }

  // Accepts abs, squared, sqrt, power:<p>, clipped:<t>.
  static Cost parse(std::string_view text) {
    if (text == "abs") return abs();
    if (text == "squared") return squared();
    if (text == "sqrt") return power(0.5);
    if (text.starts_with("power:")) return power(detail::parse_number(text.substr(6), "cost exponent"));
    if (text.starts_with("clipped:")) {
      return clipped(detail::parse_number(text.substr(8), "clip threshold"));
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown cost '" + std::string(text) + "'");
  }

  double operator()(double z) const {
    const double a = std::abs(z);
    switch (kind_) {
      case Kind::kAbs: return a;
      case Kind::kSquared: return a * a;
      case Kind::kPower: return std::pow(a, param_);
      case Kind::kClipped: return std::min(a, param_);
    }
    return a;
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  bool bounded() const { return kind_ == Kind::kClipped; }

  std::string name() const {
    switch (kind_) {
      case Kind::kAbs: return "abs";
      case Kind::kSquared: return "squared";
      case Kind::kPower: return param_ == 0.5 ? "sqrt" : "power:" + format_double(param_);
      case Kind::kClipped: return "clipped:" + format_double(param_);
    }
    return "abs";
  }

  friend bool operator==(const Cost&, const Cost&) = default;

 private:
  Cost(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

// Checks nonnegativity, symmetry and c(z) <= c(a) + c(z - a) on random
// triples drawn over several length scales.
inline bool satisfies_metric_axioms(const Cost& cost, int samples = 2000,
                                    std::uint64_t seed = 0x5eed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> decade(-3, 3);
  for (int k = 0; k < samples; ++k) {
    const double z = unit(rng) * std::pow(10.0, decade(rng));
    const double a = unit(rng) * std::pow(10.0, decade(rng));
    const double cz = cost(z);
    if (!(cz >= 0.0) || cost(-z) != cz) return false;
    const double bound = cost(a) + cost(z - a);
    if (cz > bound * (1.0 + 1e-12) + 1e-300) return false;
  }
  return cost(0.0) == 0.0;
}

// Map from the mechanism parameter theta to the rate eta(theta); strictly
// decreasing and invertible on (0, inf).
class Rate {
 public:
  enum class Kind { kReciprocal, kReciprocalPower };

  static Rate reciprocal() { return Rate(Kind::kReciprocal, 1.0); }
  static Rate reciprocal_power(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw Error(ErrorCode::kNonInvertibleRate,
                  "rate exponent must be positive for eta to be decreasing");
    }
    return Rate(Kind::kReciprocalPower, k);
  }

  // Accepts reciprocal, reciprocal-power:<k>.
  static Rate parse(std::string_view text) {
    if (text == "reciprocal") return reciprocal();
    if (text.starts_with("reciprocal-power:")) {
      return reciprocal_power(detail::parse_number(text.substr(17), "rate exponent"));
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown rate map '" + std::string(text) + "'");
  }

  double eta(double theta) const {
    return kind_ == Kind::kReciprocal ? 1.0 / theta : std::pow(theta, -exponent_);
  }

  double inverse(double rate) const {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw Error(ErrorCode::kNonInvertibleRate,
                  "eta^-1 undefined at " + format_double(rate));
    }
    return kind_ == Kind::kReciprocal ? 1.0 / rate : std::pow(rate, -1.0 / exponent_);
  }

  std::string name() const {
    return kind_ == Kind::kReciprocal ? "reciprocal"
                                      : "reciprocal-power:" + format_double(exponent_);
  }

  friend bool operator==(const Rate&, const Rate&) = default;

 private:
  Rate(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}
  Kind kind_;
  double exponent_;
};

struct Laplace {
  double scale;
};

struct Gaussian {
  double stddev;
};

// Exponential mechanism with density exp(-eta(theta) c(z)) / Z. The
// normalizer and the truncation half-width are computed once at creation.
class Exponential {
 public:
  // Tail cut where eta * c(z) reaches this value; the neglected mass is
  // below 1e-16 of the total for every unbounded cost we support.
  static constexpr double kTailExponent = 45.0;

  static Exponential create(double theta, Cost cost, Rate rate = Rate::reciprocal(),
                            bool require_metric = true) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
      throw Error(ErrorCode::kInvalidArgument, "exponential theta must be positive");
    }
    if (require_metric && !satisfies_metric_axioms(cost)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cost '" + cost.name() + "' violates the metric axioms");
    }
    const double eta = rate.eta(theta);
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw Error(ErrorCode::kNonInvertibleRate, "eta(theta) is not a positive finite number");
    }
    if (cost.bounded()) {
      throw Error(ErrorCode::kNonNormalizable,
                  "cost '" + cost.name() + "' is bounded; exp(-eta c) has infinite mass");
    }
    double half_width = 1.0;
    while (eta * cost(half_width) < kTailExponent) {
      half_width *= 2.0;
      if (half_width > 1e15) {
        throw Error(ErrorCode::kNonNormalizable,
                    "exp(-eta c) does not decay within |z| < 1e15");
      }
    }
    while (half_width > 1e-12 && eta * cost(half_width / 2.0) >= kTailExponent) half_width /= 2.0;
    QuadratureOptions options;
    options.rel_tol = 1e-14;
    options.max_intervals = 20000;
    const auto kernel = [&](double z) { return std::exp(-eta * cost(z)); };
    const double half_mass = integrate(kernel, 0.0, half_width, options).value;
    const auto second = [&](double z) { return z * z * std::exp(-eta * cost(z)); };
    const double half_second = integrate(second, 0.0, half_width, options).value;
    return Exponential(theta, cost, rate, eta, std::log(2.0 * half_mass), half_width,
                       half_second / half_mass);
  }

  double theta() const { return theta_; }
  const Cost& cost() const { return cost_; }
  const Rate& rate() const { return rate_; }
  double eta() const { return eta_; }
  double log_normalizer() const { return log_normalizer_; }
  double half_width() const { return half_width_; }
  double variance() const { return variance_; }

  double log_density(double z) const { return -eta_ * cost_(z) - log_normalizer_; }

 private:
  Exponential(double theta, Cost cost, Rate rate, double eta, double log_normalizer,
              double half_width, double variance)
      : theta_(theta),
        cost_(cost),
        rate_(rate),
        eta_(eta),
        log_normalizer_(log_normalizer),
        half_width_(half_width),
        variance_(variance) {}

  double theta_;
  Cost cost_;
  Rate rate_;
  double eta_;
  double log_normalizer_;
  double half_width_;
  double variance_;
};

using MechanismParams = std::variant<Laplace, Gaussian, Exponential>;

inline MechanismParams make_laplace(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument, "Laplace scale must be positive");
  }
  return Laplace{scale};
}

inline MechanismParams make_gaussian(double stddev) {
  if (!(stddev > 0.0) || !std::isfinite(stddev)) {
    throw Error(ErrorCode::kInvalidArgument, "Gaussian standard deviation must be positive");
  }
  return Gaussian{stddev};
}

inline MechanismParams make_exponential(double theta, Cost cost, Rate rate = Rate::reciprocal()) {
  return Exponential::create(theta, cost, rate);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

inline std::string mechanism_name(const MechanismParams& mech) {
  return std::visit(Overloaded{[](const Laplace&) { return std::string("laplace"); },
                               [](const Gaussian&) { return std::string("gaussian"); },
                               [](const Exponential& e) {
                                 return "exponential(" + e.cost().name() + "," +
                                        e.rate().name() + ")";
                               }},
                    mech);
}

// b, sigma or theta.
inline double mechanism_parameter(const MechanismParams& mech) {
  return std::visit(Overloaded{[](const Laplace& l) { return l.scale; },
                               [](const Gaussian& g) { return g.stddev; },
                               [](const Exponential& e) { return e.theta(); }},
                    mech);
}

inline double noise_variance(const MechanismParams& mech) {
  return std::visit(Overloaded{[](const Laplace& l) { return 2.0 * l.scale * l.scale; },
                               [](const Gaussian& g) { return g.stddev * g.stddev; },
                               [](const Exponential& e) { return e.variance(); }},
                    mech);
}

// Half-width of the window around an atom beyond which the noise tail is
// negligible: 40 b for Laplace, 12 sigma for Gaussian.
inline double truncation_half_width(const MechanismParams& mech) {
  return std::visit(Overloaded{[](const Laplace& l) { return 40.0 * l.scale; },
                               [](const Gaussian& g) { return 12.0 * g.stddev; },
                               [](const Exponential& e) { return e.half_width(); }},
                    mech);
}

inline std::pair<double, double> truncation_window(const MechanismParams& mech,
                                                   const DiscreteDistribution& prior) {
  const double w = truncation_half_width(mech);
  return {prior.min_atom() - w, prior.max_atom() + w};
}

inline double noise_log_density(const MechanismParams& mech, double z) {
  return std::visit(
      Overloaded{[z](const Laplace& l) { return -std::log(2.0 * l.scale) - std::abs(z) / l.scale; },
                 [z](const Gaussian& g) {
                   return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(g.stddev) -
                          z * z / (2.0 * g.stddev * g.stddev);
                 },
                 [z](const Exponential& e) { return e.log_density(z); }},
      mech);
}

// log sum_x P_N(y - x) P_X(x), evaluated with the max term shifted out.
inline double posterior_log_density(const MechanismParams& mech,
                                    const DiscreteDistribution& prior, double y) {
  const auto& atoms = prior.atoms();
  const auto& log_masses = prior.log_masses();
  LogSumExp acc;
  std::visit(Overloaded{[&](const Laplace& l) {
                          const double inv = 1.0 / l.scale;
                          for (std::size_t k = 0; k < atoms.size(); ++k) {
                            acc.add(log_masses[k] - std::abs(y - atoms[k]) * inv);
                          }
                        },
                        [&](const Gaussian& g) {
                          const double inv = 1.0 / (2.0 * g.stddev * g.stddev);
                          for (std::size_t k = 0; k < atoms.size(); ++k) {
                            const double z = y - atoms[k];
                            acc.add(log_masses[k] - z * z * inv);
                          }
                        },
                        [&](const Exponential& e) {
                          for (std::size_t k = 0; k < atoms.size(); ++k) {
                            acc.add(log_masses[k] - e.eta() * e.cost()(y - atoms[k]));
                          }
                        }},
             mech);
  return acc.value() + noise_log_density(mech, 0.0);
}

// Privacy target (alpha, epsilon). alpha may be +inf; alpha = 1 is rejected.
class PrivacySpec {
 public:
  static PrivacySpec create(double alpha, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "epsilon must be positive and finite, got " + format_double(epsilon));
    }
    if (std::isnan(alpha) || !(alpha > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "alpha must lie in (0,1) or (1,inf], got " + format_double(alpha));
    }
    if (alpha == 1.0) throw Error(ErrorCode::kInvalidArgument, "alpha = 1 rejected");
    return PrivacySpec(alpha, epsilon);
  }

  double alpha() const { return alpha_; }
  double epsilon() const { return epsilon_; }
  bool infinite_order() const { return std::isinf(alpha_); }
  bool sub_unit() const { return alpha_ < 1.0; }
  // log of e^{(alpha-1) epsilon}, the right side of the transport equations.
  double log_target() const { return (alpha_ - 1.0) * epsilon_; }

 private:
  PrivacySpec(double alpha, double epsilon) : alpha_(alpha), epsilon_(epsilon) {}
  double alpha_;
  double epsilon_;
};

}  // namespace puffercal

#endif  // PUFFERCAL_DIST_HPP_
