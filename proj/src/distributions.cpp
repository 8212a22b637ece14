#include "fluidlob/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fluidlob/errors.hpp"
#include "fluidlob/rng.hpp"

namespace fluidlob {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

TypeDistribution TypeDistribution::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigError("rate", "exponential rate must be positive and finite");
  }
  return TypeDistribution(Exponential{rate});
}

TypeDistribution TypeDistribution::half_normal(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma", "half-normal sigma must be positive and finite");
  }
  return TypeDistribution(HalfNormal{sigma});
}

TypeDistribution TypeDistribution::tabulated(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) {
    throw ConfigError("knots", "tabulated CDF needs at least two knots");
  }
  if (knots.front().first != 0.0 || knots.front().second != 0.0) {
    throw ConfigError("knots", "first knot must be (0, 0)");
  }
  if (knots.back().second != 1.0) {
    throw ConfigError("knots", "last knot must have F = 1");
  }
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k].first > knots[k - 1].first)) {
      throw ConfigError("knots", "gamma values must be strictly increasing");
    }
    if (knots[k].second < knots[k - 1].second) {
      throw ConfigError("knots", "CDF values must be nondecreasing");
    }
  }
  return TypeDistribution(Tabulated{std::move(knots)});
}

double TypeDistribution::cdf(double gamma) const {
  if (gamma <= 0.0) return 0.0;
  if (std::isinf(gamma)) return 1.0;
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return -std::expm1(-e.rate * gamma); },
          [&](const HalfNormal& h) { return std::erf(gamma / (h.sigma * std::numbers::sqrt2)); },
          [&](const Tabulated& t) {
            const auto& kn = t.knots;
            if (gamma >= kn.back().first) return 1.0;
            auto it = std::upper_bound(kn.begin(), kn.end(), gamma,
                                       [](double g, const auto& k) { return g < k.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double s = (gamma - lo.first) / (hi.first - lo.first);
            return lo.second + s * (hi.second - lo.second);
          }},
      dist_);
}

double TypeDistribution::density(double gamma) const {
  if (gamma < 0.0 || std::isinf(gamma)) return 0.0;
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return e.rate * std::exp(-e.rate * gamma); },
          [&](const HalfNormal& h) {
            return std::sqrt(2.0 / (std::numbers::pi * h.sigma * h.sigma)) *
                   std::exp(-gamma * gamma / (2.0 * h.sigma * h.sigma));
          },
          [&](const Tabulated& t) {
            const auto& kn = t.knots;
            if (gamma >= kn.back().first) return 0.0;
            auto it = std::upper_bound(kn.begin(), kn.end(), gamma,
                                       [](double g, const auto& k) { return g < k.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            return (hi.second - lo.second) / (hi.first - lo.first);
          }},
      dist_);
}

double TypeDistribution::log_density(double gamma) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (gamma <= 0.0 || std::isinf(gamma)) return kNegInf;
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return std::log(e.rate) - e.rate * gamma; },
          [&](const HalfNormal& h) {
            return 0.5 * std::log(2.0 / (std::numbers::pi * h.sigma * h.sigma)) -
                   gamma * gamma / (2.0 * h.sigma * h.sigma);
          },
          [&](const Tabulated&) {
            const double f = density(gamma);
            return f > 0.0 ? std::log(f) : kNegInf;
          }},
      dist_);
}

double TypeDistribution::sample(RandomStream& rng) const {
  return std::visit(
      overloaded{
          [&](const Exponential& e) { return rng.exponential(e.rate); },
          [&](const HalfNormal& h) { return h.sigma * std::abs(rng.standard_normal()); },
          [&](const Tabulated& t) {
            // Inverse of the piecewise-linear CDF; flat segments carry no mass.
            const double u = rng.uniform_pos();
            const auto& kn = t.knots;
            auto it = std::lower_bound(kn.begin(), kn.end(), u,
                                       [](const auto& k, double x) { return k.second < x; });
            if (it == kn.begin()) return kn.front().first;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double s = (u - lo.second) / (hi.second - lo.second);
            return lo.first + s * (hi.first - lo.first);
          }},
      dist_);
}

SizeDistribution SizeDistribution::deterministic(std::int64_t value) {
  if (value < 1) throw ConfigError("value", "deterministic size must be >= 1");
  return SizeDistribution(Deterministic{value});
}

SizeDistribution SizeDistribution::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p", "geometric p must lie in (0, 1]");
  return SizeDistribution(Geometric{p});
}

SizeDistribution SizeDistribution::tabulated(std::vector<double> probabilities) {
  if (probabilities.empty()) throw ConfigError("probabilities", "mass function is empty");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ConfigError("probabilities", "masses must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("probabilities", "masses must sum to 1");
  }
  return SizeDistribution(Tabulated{std::move(probabilities)});
}

double SizeDistribution::mean() const {
  return std::visit(overloaded{[](const Deterministic& d) { return static_cast<double>(d.value); },
                               [](const Geometric& g) { return 1.0 / g.p; },
                               [](const Tabulated& t) {
                                 double m = 0.0;
                                 for (std::size_t k = 0; k < t.probabilities.size(); ++k) {
                                   m += static_cast<double>(k + 1) * t.probabilities[k];
                                 }
                                 return m;
                               }},
                    dist_);
}

double SizeDistribution::second_moment() const {
  return std::visit(overloaded{[](const Deterministic& d) {
                                 const double x = static_cast<double>(d.value);
                                 return x * x;
                               },
                               [](const Geometric& g) { return (2.0 - g.p) / (g.p * g.p); },
                               [](const Tabulated& t) {
                                 double m = 0.0;
                                 for (std::size_t k = 0; k < t.probabilities.size(); ++k) {
                                   const double x = static_cast<double>(k + 1);
                                   m += x * x * t.probabilities[k];
                                 }
                                 return m;
                               }},
                    dist_);
}

std::int64_t SizeDistribution::sample(RandomStream& rng) const {
  return std::visit(
      overloaded{[](const Deterministic& d) { return d.value; },
                 [&](const Geometric& g) -> std::int64_t {
                   if (g.p == 1.0) return 1;
                   // Inversion: 1 + floor(log U / log(1 - p)).
                   const double k = std::floor(std::log(rng.uniform_pos()) / std::log1p(-g.p));
                   if (k >= static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2)) {
                     return std::numeric_limits<std::int64_t>::max() / 2;
                   }
                   return 1 + static_cast<std::int64_t>(k);
                 },
                 [&](const Tabulated& t) -> std::int64_t {
                   const double u = rng.uniform();
                   double acc = 0.0;
                   for (std::size_t k = 0; k < t.probabilities.size(); ++k) {
                     acc += t.probabilities[k];
                     if (u < acc) return static_cast<std::int64_t>(k + 1);
                   }
                   // Round-off tail: last index with positive mass.
                   for (std::size_t k = t.probabilities.size(); k-- > 0;) {
                     if (t.probabilities[k] > 0.0) return static_cast<std::int64_t>(k + 1);
                   }
                   return 1;
                 }},
      dist_);
}

}  // namespace fluidlob
