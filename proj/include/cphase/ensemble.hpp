#pragma once

#include "cphase/measurements.hpp"
#include "cphase/random.hpp"
#include "cphase/sketch.hpp"
#include "cphase/sparse_sign_matrix.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cphase {

/// Explicit constants behind every O(.) in the sensing construction.
struct EnsembleConfig {
    double C0 = 0.25;            ///< F density constant
    double C1 = 200.0;           ///< rows per E sub-block = ceil(C1 * k)
    double c1 = 0.7;             ///< tail-energy normalizer
    double c_F = 0.7;            ///< F row-count constant
    std::size_t rep_log_n = 6;   ///< E sub-blocks (and medians in the tail estimate)
    std::size_t countsketch_rows = 400;
    std::size_t countsketch_reps = 9;
    std::size_t heavy_K = 100;
    std::size_t heavy_reps = 6;
    std::size_t heavy_buckets = 400;
    std::size_t top_select = 50;
    std::size_t f_copies = 1;    ///< replicas of the low F levels (amplification)
    std::uint64_t seed = 1;

    /// Throws ConstructionError if a count is zero, a constant is not
    /// positive, or heavy_K / top_select are below k.
    void validate(std::size_t k) const;

    /// Calibrated defaults for an (n, k) instance.
    static EnsembleConfig defaults(std::size_t n, std::size_t k);

    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// i.i.d. entries: zero w.p. 1 - density, otherwise a uniform sign.
struct BernoulliLayout {
    std::size_t n_rows = 0;
    double density = 0.0;
    std::uint64_t seed = 0;

    std::size_t rows() const noexcept { return n_rows; }

    template <class F>
    void for_each_in_column(std::size_t col, F&& f) const
    {
        if (density >= 1.0) {
            for (std::size_t r = 0; r < n_rows; ++r)
                f(r, (hash3(seed, col, r) & 1u) ? -1 : 1);
            return;
        }
        // Geometric skipping: the gap to the next nonzero is Geometric(density).
        const double inv_log = 1.0 / std::log1p(-density);
        std::size_t row = 0;
        for (std::uint64_t t = 0;; ++t) {
            const std::uint64_t h = hash3(seed, col, t);
            const double gap = std::floor(std::log(unit_interval(h)) * inv_log);
            if (gap >= static_cast<double>(n_rows - row))
                return;
            row += static_cast<std::size_t>(gap);
            f(row, (h & 1u) ? -1 : 1);
            if (++row >= n_rows)
                return;
        }
    }
};

enum class BlockKind { heavy, countsketch, tail, sign };

/// One named block of the stacked sensing matrix. Entries are a pure
/// function of (block seed, column), so columns are generated on demand.
class Block {
public:
    using Layout = std::variant<HeavyHitterSketch, CountSketchLayout, BernoulliLayout>;

    Block(BlockKind kind, std::string name, int level, int copy, std::size_t offset, Layout layout);

    BlockKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    int level() const noexcept { return level_; } ///< E sub-block index or F level exponent
    int copy() const noexcept { return copy_; }
    std::size_t offset() const noexcept { return offset_; }
    std::size_t rows() const noexcept { return rows_; }
    const Layout& layout() const noexcept { return layout_; }

    /// Density of a Bernoulli block, 0 for hashed blocks.
    double density() const noexcept;

    template <class F>
    void for_each_in_column(std::size_t col, F&& f) const
    {
        std::visit([&](const auto& l) { l.for_each_in_column(col, f); }, layout_);
    }

    SparseSignMatrix materialize(std::size_t n_cols) const;

private:
    BlockKind kind_;
    std::string name_;
    int level_;
    int copy_;
    std::size_t offset_;
    std::size_t rows_;
    Layout layout_;
};

enum class Composition {
    full,       ///< A, B, E and F
    signs_only, ///< F only: an independent sign-recovery replica
};

/// Φ = [A; B; E; F] · D, with D a random ±1 diagonal.
class SensingEnsemble {
public:
    SensingEnsemble(std::size_t n, std::size_t k, EnsembleConfig config, std::uint64_t seed,
                    std::vector<std::int8_t> signs, std::vector<Block> blocks, Composition composition);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    const EnsembleConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    Composition composition() const noexcept { return composition_; }

    std::span<const std::int8_t> signs() const noexcept { return signs_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    const Block& block(std::string_view name) const;
    std::size_t total_rows() const noexcept;

    const HeavyHitterSketch& heavy() const;
    const CountSketchLayout& countsketch() const;
    std::vector<const Block*> tail_blocks() const;
    /// All copies of F_{2^level}.
    std::vector<const Block*> sign_blocks(int level) const;
    int max_sign_level() const noexcept { return max_level_; }
    /// log2 of the candidate budget (log2(5k) by default).
    double log2_budget() const noexcept;

    std::vector<BlockRange> block_table() const;

private:
    std::size_t n_;
    std::size_t k_;
    EnsembleConfig config_;
    std::uint64_t seed_;
    Composition composition_;
    std::vector<std::int8_t> signs_;
    std::vector<Block> blocks_;
    int max_level_ = 0;
};

/// Levels l = 0..ceil(log2(top_select)) of the F family.
int sign_level_count(const EnsembleConfig& config);
double sign_density(const EnsembleConfig& config, int level);
std::size_t sign_rows(const EnsembleConfig& config, int level);
/// Levels that receive f_copies replicas: 1..M with 2^M the first power of two above sqrt(k).
bool is_replicated_level(std::size_t k, int level);

SensingEnsemble build_ensemble(std::size_t n, std::size_t k, const EnsembleConfig& config, std::uint64_t seed,
                               Composition composition = Composition::full);

/// y_q = |Σ_i Φ'_{q,i} D_i x_i|.
Measurements apply_phaseless(const SensingEnsemble& ensemble, std::span<const double> x);

struct RowCounts {
    std::vector<std::pair<std::string, std::size_t>> per_block;
    std::size_t heavy = 0;
    std::size_t countsketch = 0;
    std::size_t tail = 0;
    std::size_t sign = 0;
    std::size_t total = 0;
};

RowCounts row_count(const SensingEnsemble& ensemble);

} // namespace cphase
