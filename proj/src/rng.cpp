#include "flowmaint/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace flowmaint {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + 1));
}

double uniform01(RngEngine& rng) {
  // 53 random bits, offset to the bin centre: result lies in (0, 1).
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_normal(RngEngine& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

namespace {

std::int64_t poisson_inversion(double lambda, RngEngine& rng) {
  // Sequential search of the CDF; fine for lambda < ~30 (exp(-30) ~ 9e-14
  // still representable).
  const double u = uniform01(rng);
  double p = std::exp(-lambda);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
    if (k > 2000) break;  // numerical guard; unreachable for lambda < 30
  }
  return k;
}

std::int64_t poisson_ptrs(double lambda, RngEngine& rng) {
  // Hormann (1993), "The transformed rejection method for generating Poisson
  // random variables", algorithm PTRS. Valid for lambda >= 10.
  const double log_lambda = std::log(lambda);
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  while (true) {
    double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::int64_t>(kf);
    }
    if (kf < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        -lambda + k * log_lambda - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

}  // namespace

std::int64_t sample_poisson(double lambda, RngEngine& rng) {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw std::invalid_argument("sample_poisson: lambda must be finite and >= 0");
  }
  if (lambda == 0.0) return 0;
  if (lambda < 30.0) return poisson_inversion(lambda, rng);
  return poisson_ptrs(lambda, rng);
}

double sample_gamma(double shape, RngEngine& rng) {
  if (shape <= 0.0 || !std::isfinite(shape)) {
    throw std::invalid_argument("sample_gamma: shape must be finite and > 0");
  }
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(uniform01(rng), 1.0 / shape);
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = sample_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> sample_dirichlet(const std::vector<double>& alpha, RngEngine& rng) {
  if (alpha.empty()) {
    throw std::invalid_argument("sample_dirichlet: empty concentration vector");
  }
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = sample_gamma(alpha[i], rng);
    total += out[i];
  }
  // With alpha entries bounded away from 0 the total is positive; redraw on
  // the (theoretical) underflow case.
  while (total <= 0.0) {
    total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      out[i] = sample_gamma(alpha[i], rng);
      total += out[i];
    }
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<std::int64_t> sample_multinomial(std::int64_t n,
                                             const std::vector<double>& shares,
                                             RngEngine& rng) {
  std::vector<std::int64_t> counts(shares.size(), 0);
  if (shares.empty() || n <= 0) return counts;
  const std::size_t last = shares.size() - 1;
  for (std::int64_t unit = 0; unit < n; ++unit) {
    const double u = uniform01(rng);
    double cum = 0.0;
    std::size_t chosen = last;  // residual categories absorb rounding
    for (std::size_t i = 0; i < last; ++i) {
      cum += shares[i];
      if (u < cum) {
        chosen = i;
        break;
      }
    }
    ++counts[chosen];
  }
  return counts;
}

double sample_truncated_normal(double mean, double sd, double lo, double hi, RngEngine& rng) {
  if (!(lo <= hi)) throw std::invalid_argument("sample_truncated_normal: lo > hi");
  if (sd < 0.0) throw std::invalid_argument("sample_truncated_normal: sd < 0");
  auto clamp = [&](double v) { return v < lo ? lo : (v > hi ? hi : v); };
  if (sd == 0.0) return clamp(mean);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double v = mean + sd * sample_normal(rng);
    if (v >= lo && v <= hi) return v;
  }
  // Truncation bounds carved out essentially all mass; fall back to the
  // nearest bound rather than spinning forever.
  return clamp(mean);
}

double sample_truncated_lognormal(double median, double sigma, double lo, double hi,
                                  RngEngine& rng) {
  if (!(lo <= hi)) throw std::invalid_argument("sample_truncated_lognormal: lo > hi");
  if (median <= 0.0) throw std::invalid_argument("sample_truncated_lognormal: median <= 0");
  if (sigma < 0.0) throw std::invalid_argument("sample_truncated_lognormal: sigma < 0");
  auto clamp = [&](double v) { return v < lo ? lo : (v > hi ? hi : v); };
  if (sigma == 0.0) return clamp(median);
  const double mu = std::log(median);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double v = std::exp(mu + sigma * sample_normal(rng));
    if (v >= lo && v <= hi) return v;
  }
  return clamp(median);
}

}  // namespace flowmaint
