#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace flowmaint {

/// All random draws in the toolkit go through a per-work-unit engine seeded
/// with derive_seed(), so an ensemble is reproducible bit-for-bit regardless
/// of how many threads evaluate it.
using RngEngine = std::mt19937_64;

/// splitmix64 finalizer. Mixes a 64-bit value into a well-distributed one.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic sub-seed for work unit `index` under `base`. Stable contract:
/// changing it invalidates every recorded seed, so it never changes.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Uniform draw in the open interval (0, 1). Never returns 0 or 1, so it is
/// safe under log().
double uniform01(RngEngine& rng);

/// Standard normal via Box-Muller (single value per call, no cached spare,
/// which keeps draw sequences independent of call sites).
double sample_normal(RngEngine& rng);

/// Poisson sampler. Inversion by sequential search for lambda < 30, Hormann's
/// PTRS transformed rejection above. Exact for lambda == 0.
std::int64_t sample_poisson(double lambda, RngEngine& rng);

/// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 handled with the
/// Gamma(shape+1) boost.
double sample_gamma(double shape, RngEngine& rng);

/// Dirichlet draw as normalized Gamma variates. All entries strictly positive,
/// sums to 1 up to rounding.
std::vector<double> sample_dirichlet(const std::vector<double>& alpha, RngEngine& rng);

/// Allocates n units over categories with the given shares by walking the
/// cumulative distribution once per unit. Exact: the result always sums to n.
std::vector<std::int64_t> sample_multinomial(std::int64_t n,
                                             const std::vector<double>& shares,
                                             RngEngine& rng);

/// Normal(mean, sd) truncated to [lo, hi] by rejection. sd == 0 degenerates to
/// mean clamped into the interval.
double sample_truncated_normal(double mean, double sd, double lo, double hi, RngEngine& rng);

/// Lognormal with the given median and log-scale sigma, truncated to [lo, hi]
/// by rejection. sigma == 0 degenerates to the median clamped into bounds.
double sample_truncated_lognormal(double median, double sigma, double lo, double hi,
                                  RngEngine& rng);

}  // namespace flowmaint
