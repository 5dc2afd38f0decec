#include "cphase/decoder.hpp"

#include "cphase/errors.hpp"
#include "cphase/stats.hpp"

#include <algorithm>
#include <cmath>

namespace cphase {

std::vector<double> RecoveryResult::to_dense(std::size_t n) const
{
    std::vector<double> x(n, 0.0);
    for (const auto& [i, v] : x_hat) {
        if (i >= n)
            throw DimensionError("to_dense: index beyond n");
        x[i] = v;
    }
    return x;
}

TailEnergyEstimate estimate_tail_energy(const SensingEnsemble& ensemble, const Measurements& y,
                                        std::span<const std::uint32_t> s1, AccessCounter* counter)
{
    TailEnergyEstimate out;
    const double c1 = ensemble.config().c1;
    for (const Block* block : ensemble.tail_blocks()) {
        std::vector<char> hit(block->rows(), 0);
        for (std::uint32_t i : s1)
            block->for_each_in_column(i, [&](std::size_t row, int) {
                if (counter)
                    ++counter->entries;
                hit[row] = 1;
            });
        const MeasurementSlice yE = y.slice(block->name(), counter);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t q = 0; q < hit.size(); ++q) {
            if (hit[q])
                continue;
            const double v = yE[q];
            sum += v * v;
            ++count;
        }
        out.disjoint_rows.push_back(count);
        if (count > 0)
            out.per_rep.push_back(c1 * sum / static_cast<double>(count));
    }
    if (out.per_rep.empty())
        throw EstimationError("estimate_tail_energy: no E row misses S1 in any sub-block (C1 too small?)");
    out.L = median(out.per_rep);
    return out;
}

std::vector<std::uint32_t> prune(std::span<const std::uint32_t> s1, const MagnitudeEstimates& estimates, double L,
                                 std::size_t k, double C0, double log2_budget)
{
    std::vector<double> z;
    z.reserve(s1.size());
    for (std::uint32_t i : s1) {
        auto it = estimates.find(i);
        if (it == estimates.end())
            throw DimensionError("prune: no estimate for coordinate " + std::to_string(i));
        z.push_back(it->second);
    }
    std::sort(z.begin(), z.end(), std::greater<>());

    double cut = 0.0;
    bool found = false;
    for (std::size_t m = z.size(); m >= 1; --m) {
        // l0 with 2^l0 < m <= 2^(l0+1); m = 1 gives l0 = -1.
        int l0 = -1;
        while (std::ldexp(1.0, l0 + 1) < static_cast<double>(m))
            ++l0;
        const double q = log2_budget - l0 + 2.0;
        const double threshold = static_cast<double>(k) * L / (C0 * std::ldexp(1.0, l0) * q * q);
        if (z[m - 1] * z[m - 1] > threshold) {
            cut = z[m - 1];
            found = true;
            break;
        }
    }
    std::vector<std::uint32_t> kept;
    if (!found)
        return kept;
    for (std::uint32_t i : s1)
        if (estimates.at(i) >= cut)
            kept.push_back(i);
    std::sort(kept.begin(), kept.end());
    return kept;
}

namespace {

struct MagnitudeStage {
    std::vector<std::uint32_t> S0, S1, S2;
    MagnitudeEstimates estimates;
    TailEnergyEstimate L;
};

MagnitudeStage magnitude_stage(const SensingEnsemble& ensemble, const Measurements& y, AccessCounter& counter)
{
    if (ensemble.composition() != Composition::full)
        throw DimensionError("decode: the primary ensemble must contain A, B and E blocks");
    if (y.size() != ensemble.total_rows())
        throw DimensionError("decode: measurement count does not match the ensemble");

    MagnitudeStage st;
    const HeavyHitterSketch& hh = ensemble.heavy();
    st.S0 = identify_heavy(hh, y.slice("A", &counter)).candidates;

    const CountSketchLayout& cs = ensemble.countsketch();
    const MeasurementSlice yB = y.slice("B", &counter);
    for (std::uint32_t i : st.S0)
        st.estimates[i] = estimate_magnitude(cs, yB, i, &counter);

    // Top-`top_select` by estimated magnitude, ties to the lower index.
    std::vector<std::uint32_t> order = st.S0;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return st.estimates[a] > st.estimates[b]; });
    if (order.size() > ensemble.config().top_select)
        order.resize(ensemble.config().top_select);
    std::sort(order.begin(), order.end());
    st.S1 = std::move(order);

    st.L = estimate_tail_energy(ensemble, y, st.S1, &counter);
    st.S2 = prune(st.S1, st.estimates, st.L.L, ensemble.k(), ensemble.config().C0, ensemble.log2_budget());
    return st;
}

void copy_stage(MagnitudeStage&& st, RecoveryResult& r)
{
    r.S0 = std::move(st.S0);
    r.S1 = std::move(st.S1);
    r.S2 = std::move(st.S2);
    r.estimates = std::move(st.estimates);
    r.L = std::move(st.L);
}

std::uint32_t anchor_of(const std::vector<std::uint32_t>& s2, const MagnitudeEstimates& estimates)
{
    std::uint32_t best = s2.front();
    for (std::uint32_t i : s2)
        if (estimates.at(i) > estimates.at(best))
            best = i;
    return best;
}

} // namespace

RecoveryResult decode(const SensingEnsemble& ensemble, const Measurements& y)
{
    AccessCounter counter;
    RecoveryResult r;
    copy_stage(magnitude_stage(ensemble, y, counter), r);

    ClusterLabels labels;
    if (r.S2.size() >= 2) {
        const int level = std::min(sign_level_for(r.S2.size()), ensemble.max_sign_level());
        const auto blocks = ensemble.sign_blocks(level);
        const SignGraph g = build_sign_graph(blocks, y, r.S2, r.estimates, &counter);
        labels = recover_communities(g);
        r.diagnostics.sign_level = level;
        r.diagnostics.sign_graphs = 1;
        r.diagnostics.pairs_tested = g.pairs_tested;
        r.diagnostics.edges = g.edges.size();
        r.signs_failed = g.edges.empty();
        r.low_confidence = labels.low_confidence;
    } else {
        for (std::uint32_t i : r.S2)
            labels.labels[i] = 1;
    }
    r.clusters = labels.labels;

    const auto signs = ensemble.signs();
    for (auto [i, v] : assign_signs(labels, r.estimates, r.S2))
        r.x_hat.emplace_back(i, signs[i] * v);
    r.diagnostics.measurements_read = counter.reads;
    r.diagnostics.entries_touched = counter.entries;
    return r;
}

RecoveryResult decode_amplified(std::span<const SensingEnsemble> replicas, std::span<const Measurements> ys)
{
    if (replicas.empty() || replicas.size() != ys.size())
        throw DimensionError("decode_amplified: need one measurement vector per replica");
    const SensingEnsemble& primary = replicas.front();
    for (std::size_t r = 0; r < replicas.size(); ++r) {
        if (replicas[r].n() != primary.n() || replicas[r].k() != primary.k())
            throw DimensionError("decode_amplified: replicas disagree on (n, k)");
        if (ys[r].size() != replicas[r].total_rows())
            throw DimensionError("decode_amplified: measurement count does not match replica");
    }

    AccessCounter counter;
    RecoveryResult r;
    copy_stage(magnitude_stage(primary, ys.front(), counter), r);

    if (r.S2.size() < 2) {
        for (std::uint32_t i : r.S2) {
            r.clusters[i] = 1;
            r.x_hat.emplace_back(i, r.estimates.at(i));
        }
        r.diagnostics.measurements_read = counter.reads;
        r.diagnostics.entries_touched = counter.entries;
        return r;
    }

    const std::uint32_t anchor = anchor_of(r.S2, r.estimates);
    const int wanted = sign_level_for(r.S2.size());
    std::map<std::uint32_t, int> votes;
    std::map<std::uint32_t, int> first_opinion;
    bool any_graph = false;
    for (std::size_t rep = 0; rep < replicas.size(); ++rep) {
        const SensingEnsemble& ens = replicas[rep];
        const auto d = ens.signs();
        const int level = std::min(wanted, ens.max_sign_level());
        for (const Block* block : ens.sign_blocks(level)) {
            const Block* one[] = {block};
            const SignGraph g = build_sign_graph(one, ys[rep], r.S2, r.estimates, &counter);
            const ClusterLabels labels = recover_communities(g);
            ++r.diagnostics.sign_graphs;
            r.diagnostics.pairs_tested += g.pairs_tested;
            r.diagnostics.edges += g.edges.size();
            r.diagnostics.sign_level = level;
            const bool anchor_isolated =
                std::find(labels.isolated.begin(), labels.isolated.end(), anchor) != labels.isolated.end();
            const int anchor_sign = labels.labels.at(anchor) * d[anchor];
            for (std::uint32_t i : r.S2) {
                // Relative sign of x_i versus x_anchor, in the original coordinates.
                const int rel = labels.labels.at(i) * d[i] * anchor_sign;
                first_opinion.try_emplace(i, rel);
                const bool isolated =
                    std::find(labels.isolated.begin(), labels.isolated.end(), i) != labels.isolated.end();
                if (!anchor_isolated && !isolated) {
                    votes[i] += rel;
                    any_graph = true;
                }
            }
        }
    }
    r.signs_failed = !any_graph;
    for (std::uint32_t i : r.S2) {
        const int v = votes[i];
        const int s = v > 0 ? 1 : (v < 0 ? -1 : first_opinion.at(i));
        r.low_confidence = r.low_confidence || v == 0;
        r.clusters[i] = s;
        r.x_hat.emplace_back(i, s * r.estimates.at(i));
    }
    r.diagnostics.measurements_read = counter.reads;
    r.diagnostics.entries_touched = counter.entries;
    return r;
}

} // namespace cphase
