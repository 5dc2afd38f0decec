#pragma once

#include "cphase/ensemble.hpp"
#include "cphase/measurements.hpp"
#include "cphase/sketch.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace cphase {

struct SignEdge {
    std::uint32_t u = 0; ///< u < v
    std::uint32_t v = 0;
    double weight = 0.0; ///< multiplicity
    friend bool operator==(const SignEdge&, const SignEdge&) = default;
};

/// Graph on the pruned candidate set whose edges are evidence that both
/// endpoints carry the same sign.
struct SignGraph {
    std::vector<std::uint32_t> vertices; ///< sorted coordinate indices
    std::vector<SignEdge> edges;         ///< sorted by (u, v)
    std::vector<SignEdge> tested;        ///< every tested pair, weight = rows testing it (optional)
    int level = 0;                       ///< F level the rows came from
    std::size_t pairs_tested = 0;        ///< rows meeting the vertex set in exactly two places
};

/// l* = min { l : |S| <= 2^l }.
int sign_level_for(std::size_t set_size);

/// Runs the pair test on every row of `blocks` (copies of one F level) that
/// meets S2 in exactly two coordinates.
SignGraph build_sign_graph(std::span<const Block* const> blocks, const Measurements& y,
                           std::span<const std::uint32_t> s2, const MagnitudeEstimates& estimates,
                           AccessCounter* counter = nullptr);

/// The edge test for one row; true adds an edge (same-sign evidence).
bool same_sign_evidence(double y, double mag_u, double mag_v, int sigma_u, int sigma_v);

/// Exports "u v weight" per line.
void write_edge_list(std::ostream& out, const SignGraph& g);

struct ClusterLabels {
    std::map<std::uint32_t, int> labels;   ///< +1 / -1 on every vertex
    std::vector<std::uint32_t> isolated;   ///< vertices with no evidence at all (labelled +1)
    bool low_confidence = false;
};

struct CommunityOptions {
    double tolerance = 1e-8;
    std::size_t max_power_iterations = 5000;
    std::size_t dense_limit = 128; ///< graphs up to this size use a direct eigensolver
    std::size_t max_refine_sweeps = 50;
    std::uint64_t seed = 0x5eed;
};

/// Two-community recovery: bisection by the top eigenvector of the
/// modularity matrix (direct solve for small graphs, shifted power iteration
/// otherwise), then local majority sweeps to a fixpoint. Disconnected graphs
/// are split by component instead. When `tested` is present, pairs tested
/// without producing an edge count as opposite-sign evidence: the labelling
/// is polished by majority sweeps on the signed weights 2·edges − tests, and
/// an all-one-community start competes with the spectral one.
ClusterLabels recover_communities(const SignGraph& g, const CommunityOptions& options = {});

/// x_i = label(i) * |x_i| on S2, returned as (index, value) pairs sorted by index.
std::vector<std::pair<std::uint32_t, double>> assign_signs(const ClusterLabels& labels,
                                                          const MagnitudeEstimates& estimates,
                                                          std::span<const std::uint32_t> s2);

} // namespace cphase
