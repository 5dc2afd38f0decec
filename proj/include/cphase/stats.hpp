#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cphase {

/// Median; the mean of the two middle values for even sizes. Empty input -> 0.
double median(std::vector<double> values);

/// ||x_tail(k)||_2^2: energy left after zeroing the k largest-magnitude entries.
double tail_energy(std::span<const double> x, std::size_t k);

/// ||x restricted to the complement of `kept`||_2^2.
double energy_outside(std::span<const double> x, std::span<const std::uint32_t> kept);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Two-sided Clopper-Pearson interval for a binomial proportion.
Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.95);

/// P[X >= successes] for X ~ Binomial(trials, p).
double binomial_upper_tail(std::size_t successes, std::size_t trials, double p);

} // namespace cphase
