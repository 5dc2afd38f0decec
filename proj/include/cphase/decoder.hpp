#pragma once

#include "cphase/ensemble.hpp"
#include "cphase/measurements.hpp"
#include "cphase/signs.hpp"
#include "cphase/sketch.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace cphase {

struct TailEnergyEstimate {
    double L = 0.0;
    std::vector<double> per_rep;           ///< L_l for every sub-block with usable rows
    std::vector<std::size_t> disjoint_rows; ///< rows missing S1, per sub-block (0 = excluded)
};

struct DecodeDiagnostics {
    std::size_t measurements_read = 0;
    std::size_t entries_touched = 0; ///< matrix entries generated while decoding
    std::size_t pairs_tested = 0;
    std::size_t edges = 0;
    int sign_level = -1;
    std::size_t sign_graphs = 0;
};

struct RecoveryResult {
    std::vector<std::pair<std::uint32_t, double>> x_hat; ///< sorted by index, support = S2
    std::vector<std::uint32_t> S0, S1, S2;               ///< each sorted ascending
    MagnitudeEstimates estimates;                        ///< |x_i| estimates on S0
    TailEnergyEstimate L;
    std::map<std::uint32_t, int> clusters; ///< sign labels on S2 (pre-D orientation)
    bool signs_failed = false;             ///< no usable sign evidence; magnitudes still returned
    bool low_confidence = false;           ///< some vertex had no edges
    DecodeDiagnostics diagnostics;

    std::vector<double> to_dense(std::size_t n) const;
};

/// Per E sub-block: average y_q^2 over rows whose support misses S1, scale by
/// c1; L is the median over sub-blocks. Throws EstimationError if no
/// sub-block has a disjoint row.
TailEnergyEstimate estimate_tail_energy(const SensingEnsemble& ensemble, const Measurements& y,
                                        std::span<const std::uint32_t> s1, AccessCounter* counter = nullptr);

/// Threshold rule: keep coordinates at least as large as the m-th largest
/// estimate, for the largest m with z_m^2 > k L / (C0 2^l0 (log2(5k) - l0 + 2)^2),
/// 2^l0 < m <= 2^(l0+1). `log2_budget` is log2(5k).
std::vector<std::uint32_t> prune(std::span<const std::uint32_t> s1, const MagnitudeEstimates& estimates, double L,
                                 std::size_t k, double C0, double log2_budget);

/// Full recovery from y = |Φx|: heavy hitters, magnitudes, top selection,
/// tail energy, pruning, sign clustering, then undo D.
RecoveryResult decode(const SensingEnsemble& ensemble, const Measurements& y);

/// Majority vote over independent sign replicas. replicas[0] must be a full
/// ensemble (it supplies the candidate sets and magnitudes); the others may
/// be sign-only. Relative signs are taken with respect to the largest
/// estimated coordinate of S2.
RecoveryResult decode_amplified(std::span<const SensingEnsemble> replicas, std::span<const Measurements> ys);

} // namespace cphase
