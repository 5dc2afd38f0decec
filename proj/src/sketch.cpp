#include "cphase/sketch.hpp"

#include "cphase/errors.hpp"
#include "cphase/stats.hpp"

#include <algorithm>
#include <string>

namespace cphase {

std::size_t heavy_vote_threshold(const HeavyHitterSketch& sketch)
{
    if (sketch.reps <= 2)
        return 1;
    return std::max<std::size_t>(2, (sketch.reps + 2) / 3);
}

HeavyHitterResult identify_heavy(const HeavyHitterSketch& sketch, const MeasurementSlice& yA)
{
    if (yA.size() != sketch.rows())
        throw DimensionError("identify_heavy: A slice has " + std::to_string(yA.size()) + " rows, sketch expects " +
                             std::to_string(sketch.rows()));

    HeavyHitterResult out;
    for (std::size_t r = 0; r < sketch.reps; ++r) {
        for (std::size_t b = 0; b < sketch.buckets; ++b) {
            std::size_t index = 0;
            bool empty = true;
            for (std::size_t j = 0; j < sketch.nbits; ++j) {
                const double low = yA[sketch.row_of(r, b, j, 0)];
                const double high = yA[sketch.row_of(r, b, j, 1)];
                if (low > 0.0 || high > 0.0)
                    empty = false;
                if (high > low)
                    index |= std::size_t{1} << j;
            }
            // A decoded index must hash back into the bucket it came from;
            // this rejects most indices spliced together from collisions.
            if (empty || index >= sketch.n || sketch.bucket_of(r, index) != b)
                continue;
            ++out.votes[static_cast<std::uint32_t>(index)];
        }
    }

    const std::size_t threshold = heavy_vote_threshold(sketch);
    std::vector<std::pair<std::size_t, std::uint32_t>> ranked; // (votes, index)
    for (const auto& [i, v] : out.votes)
        if (v >= threshold)
            ranked.emplace_back(v, i);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const std::size_t cap = kHeavyCandidateFactor * sketch.K;
    if (ranked.size() > cap)
        ranked.resize(cap);
    for (const auto& [v, i] : ranked)
        out.candidates.push_back(i);
    std::sort(out.candidates.begin(), out.candidates.end());
    return out;
}

double estimate_magnitude(const CountSketchLayout& block, const MeasurementSlice& yB, std::size_t i,
                          AccessCounter* touched)
{
    if (yB.size() != block.rows())
        throw DimensionError("estimate_magnitude: B slice size mismatch");
    if (i >= block.n)
        throw DimensionError("estimate_magnitude: index out of range");
    std::vector<double> mags;
    mags.reserve(block.reps);
    block.for_each_in_column(i, [&](std::size_t row, int) {
        if (touched)
            ++touched->entries;
        mags.push_back(yB[row]);
    });
    return median(mags);
}

double estimate_magnitude(const SparseSignMatrix& block, const MeasurementSlice& yB, std::size_t i)
{
    if (yB.size() != block.n_rows())
        throw DimensionError("estimate_magnitude: B slice size mismatch");
    std::vector<double> mags;
    block.for_each_in_column(i, [&](std::size_t row, int) { mags.push_back(yB[row]); });
    return mags.empty() ? 0.0 : median(mags);
}

} // namespace cphase
