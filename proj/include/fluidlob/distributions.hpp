#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace fluidlob {

class RandomStream;

/// Investor type distribution F on (0, inf). All variants are atomless.
class TypeDistribution {
 public:
  struct Exponential {
    double rate;
    bool operator==(const Exponential&) const = default;
  };
  struct HalfNormal {
    double sigma;
    bool operator==(const HalfNormal&) const = default;
  };
  /// Piecewise-linear CDF through (gamma, F(gamma)) knots. The first knot
  /// must be (0, 0) and the last must carry F = 1.
  struct Tabulated {
    std::vector<std::pair<double, double>> knots;
    bool operator==(const Tabulated&) const = default;
  };

  using Variant = std::variant<Exponential, HalfNormal, Tabulated>;

  static TypeDistribution exponential(double rate);
  static TypeDistribution half_normal(double sigma);
  static TypeDistribution tabulated(std::vector<std::pair<double, double>> knots);

  /// F(gamma); F(+inf) = 1, F(gamma <= 0) = 0.
  double cdf(double gamma) const;
  double density(double gamma) const;
  /// log f(gamma); -inf where the density vanishes. Does not underflow in
  /// the tails of the built-in families.
  double log_density(double gamma) const;
  double sample(RandomStream& rng) const;

  const Variant& variant() const { return dist_; }
  bool operator==(const TypeDistribution&) const = default;

 private:
  explicit TypeDistribution(Variant v) : dist_(std::move(v)) {}
  Variant dist_;
};

/// Order-size law on the positive integers {1, 2, ...}.
class SizeDistribution {
 public:
  struct Deterministic {
    std::int64_t value;
    bool operator==(const Deterministic&) const = default;
  };
  /// P(k) = (1-p)^{k-1} p for k >= 1.
  struct Geometric {
    double p;
    bool operator==(const Geometric&) const = default;
  };
  /// probabilities[k-1] = P(size = k); must sum to 1.
  struct Tabulated {
    std::vector<double> probabilities;
    bool operator==(const Tabulated&) const = default;
  };

  using Variant = std::variant<Deterministic, Geometric, Tabulated>;

  static SizeDistribution deterministic(std::int64_t value);
  static SizeDistribution geometric(double p);
  static SizeDistribution tabulated(std::vector<double> probabilities);

  double mean() const;
  double second_moment() const;
  std::int64_t sample(RandomStream& rng) const;

  const Variant& variant() const { return dist_; }
  bool operator==(const SizeDistribution&) const = default;

 private:
  explicit SizeDistribution(Variant v) : dist_(std::move(v)) {}
  Variant dist_;
};

}  // namespace fluidlob
