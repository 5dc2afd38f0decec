#pragma once

#include "cphase/measurements.hpp"
#include "cphase/random.hpp"
#include "cphase/sparse_sign_matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace cphase {

/// Dyadic bit-testing heavy-hitter sketch (block A).
///
/// Each repetition hashes coordinates into `buckets` buckets with random
/// signs. For every bucket and every bit position j of the coordinate index
/// there are two rows: the signed sum over bucket members whose bit j is 0,
/// and the sum over those whose bit j is 1. A bucket dominated by one
/// coordinate reveals its index bit by bit by comparing the two magnitudes,
/// so no sign information is needed.
struct HeavyHitterSketch {
    std::size_t n = 0;
    std::size_t K = 0;
    std::size_t reps = 0;
    std::size_t buckets = 0;
    std::size_t nbits = 0;
    std::uint64_t seed = 0;

    std::size_t rows() const noexcept { return reps * buckets * 2 * nbits; }

    std::uint32_t bucket_of(std::size_t rep, std::size_t i) const noexcept
    {
        return static_cast<std::uint32_t>(bounded(hash3(seed, rep, i), buckets));
    }
    int sign_of(std::size_t rep, std::size_t i) const noexcept
    {
        return (hash3(seed ^ 0x5bd1e995u, rep, i) >> 63) ? -1 : 1;
    }
    std::size_t row_of(std::size_t rep, std::size_t bucket, std::size_t bit, std::size_t value) const noexcept
    {
        return (rep * buckets + bucket) * 2 * nbits + 2 * bit + value;
    }

    template <class F>
    void for_each_in_column(std::size_t i, F&& f) const
    {
        for (std::size_t r = 0; r < reps; ++r) {
            const std::size_t b = bucket_of(r, i);
            const int s = sign_of(r, i);
            for (std::size_t j = 0; j < nbits; ++j)
                f(row_of(r, b, j, (i >> j) & 1u), s);
        }
    }
};

/// CountSketch block (B): `reps` repetitions of `width` signed hash buckets.
struct CountSketchLayout {
    std::size_t n = 0;
    std::size_t reps = 0;
    std::size_t width = 0;
    std::uint64_t seed = 0;

    std::size_t rows() const noexcept { return reps * width; }

    std::size_t row_of(std::size_t rep, std::size_t i) const noexcept
    {
        return rep * width + bounded(hash3(seed, rep, i), width);
    }
    int sign_of(std::size_t rep, std::size_t i) const noexcept
    {
        return (hash3(seed ^ 0x27d4eb2fu, rep, i) >> 63) ? -1 : 1;
    }

    template <class F>
    void for_each_in_column(std::size_t i, F&& f) const
    {
        for (std::size_t r = 0; r < reps; ++r)
            f(row_of(r, i), sign_of(r, i));
    }
};

struct HeavyHitterResult {
    std::vector<std::uint32_t> candidates; // sorted ascending
    std::map<std::uint32_t, std::size_t> votes;
};

/// Returns a candidate set S0 that contains, with high probability, every i
/// with |x_i|^2 > ||x_tail(K)||^2 / K. Reads each A-block measurement once.
HeavyHitterResult identify_heavy(const HeavyHitterSketch& sketch, const MeasurementSlice& yA);

/// Minimum number of repetitions that must agree on a candidate.
std::size_t heavy_vote_threshold(const HeavyHitterSketch& sketch);

/// Maximum size of S0 relative to K.
inline constexpr std::size_t kHeavyCandidateFactor = 2;

/// Median over repetitions of the magnitude of the bucket holding i.
double estimate_magnitude(const CountSketchLayout& block, const MeasurementSlice& yB, std::size_t i,
                          AccessCounter* touched = nullptr);

/// Same estimator over a materialized B block (one entry per repetition in each column).
double estimate_magnitude(const SparseSignMatrix& block, const MeasurementSlice& yB, std::size_t i);

using MagnitudeEstimates = std::map<std::uint32_t, double>;

} // namespace cphase
