#include "cphase/ensemble.hpp"

#include "cphase/errors.hpp"

#include <algorithm>
#include <string>

namespace cphase {

namespace {

std::size_t ceil_log2(std::size_t v)
{
    std::size_t b = 0;
    while ((std::size_t{1} << b) < v)
        ++b;
    return b;
}

} // namespace

void EnsembleConfig::validate(std::size_t k) const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConstructionError(std::string("config: ") + name + " must be a positive finite constant");
    };
    positive(C0, "C0");
    positive(C1, "C1");
    positive(c1, "c1");
    positive(c_F, "c_F");
    auto at_least_one = [](std::size_t v, const char* name) {
        if (v < 1)
            throw ConstructionError(std::string("config: ") + name + " must be >= 1");
    };
    at_least_one(rep_log_n, "rep_log_n");
    at_least_one(countsketch_rows, "countsketch_rows");
    at_least_one(countsketch_reps, "countsketch_reps");
    at_least_one(heavy_K, "heavy_K");
    at_least_one(heavy_reps, "heavy_reps");
    at_least_one(heavy_buckets, "heavy_buckets");
    at_least_one(top_select, "top_select");
    at_least_one(f_copies, "f_copies");
    if (heavy_K < k)
        throw ConstructionError("config: heavy_K must be >= k");
    if (top_select < k)
        throw ConstructionError("config: top_select must be >= k");
}

EnsembleConfig EnsembleConfig::defaults(std::size_t n, std::size_t k)
{
    const std::size_t logn = std::max<std::size_t>(ceil_log2(n), 1);
    EnsembleConfig c;
    c.rep_log_n = std::max<std::size_t>((logn + 1) / 2, 3);
    c.countsketch_rows = 40 * k;
    c.countsketch_reps = std::max<std::size_t>(logn > 3 ? logn - 3 : 1, 5) | 1u; // odd: clean medians
    c.heavy_K = 10 * k;
    c.heavy_reps = std::max<std::size_t>((logn + 1) / 2, 3);
    c.heavy_buckets = 4 * c.heavy_K;
    c.top_select = 5 * k;
    return c;
}

Block::Block(BlockKind kind, std::string name, int level, int copy, std::size_t offset, Layout layout)
    : kind_(kind), name_(std::move(name)), level_(level), copy_(copy), offset_(offset),
      rows_(std::visit([](const auto& l) { return static_cast<std::size_t>(l.rows()); }, layout)),
      layout_(std::move(layout))
{
}

double Block::density() const noexcept
{
    if (const auto* b = std::get_if<BernoulliLayout>(&layout_))
        return std::min(b->density, 1.0);
    return 0.0;
}

SparseSignMatrix Block::materialize(std::size_t n_cols) const
{
    SparseSignMatrix m(rows_, n_cols);
    std::vector<SignedIndex> col;
    for (std::size_t c = 0; c < n_cols; ++c) {
        col.clear();
        for_each_in_column(c, [&](std::size_t row, int sign) {
            col.emplace_back(static_cast<std::uint32_t>(row), sign);
        });
        m.push_column(col);
    }
    return m;
}

int sign_level_count(const EnsembleConfig& config)
{
    return static_cast<int>(ceil_log2(config.top_select)) + 1;
}

namespace {

double level_gap(const EnsembleConfig& config, int level)
{
    // log2(5k) - l + 2; stays >= 2 - (ceil - log2) > 1 on every level.
    return std::log2(static_cast<double>(config.top_select)) - level + 2.0;
}

} // namespace

double sign_density(const EnsembleConfig& config, int level)
{
    const double q = level_gap(config, level);
    return std::min(1.0, 1.0 / (config.C0 * std::ldexp(1.0, level) * q * q));
}

std::size_t sign_rows(const EnsembleConfig& config, int level)
{
    const double q = level_gap(config, level);
    const double rows = config.c_F * std::max(level, 1) * std::ldexp(1.0, level) * q * q * q * q;
    return static_cast<std::size_t>(std::ceil(rows));
}

bool is_replicated_level(std::size_t k, int level)
{
    if (level < 1)
        return false;
    // 2^M is the first power of two strictly above sqrt(k).
    int M = 0;
    while (std::ldexp(1.0, M) <= std::sqrt(static_cast<double>(k)))
        ++M;
    return level <= M;
}

SensingEnsemble::SensingEnsemble(std::size_t n, std::size_t k, EnsembleConfig config, std::uint64_t seed,
                                 std::vector<std::int8_t> signs, std::vector<Block> blocks, Composition composition)
    : n_(n), k_(k), config_(config), seed_(seed), composition_(composition), signs_(std::move(signs)),
      blocks_(std::move(blocks))
{
    std::size_t next = 0;
    for (const auto& b : blocks_) {
        if (b.offset() != next)
            throw ConstructionError("ensemble: block offsets are not consecutive");
        next += b.rows();
        if (b.kind() == BlockKind::sign)
            max_level_ = std::max(max_level_, b.level());
    }
    if (signs_.size() != n_)
        throw ConstructionError("ensemble: sign vector length differs from n");
}

const Block& SensingEnsemble::block(std::string_view name) const
{
    for (const auto& b : blocks_)
        if (b.name() == name)
            return b;
    throw DimensionError("ensemble: no block named " + std::string(name));
}

std::size_t SensingEnsemble::total_rows() const noexcept
{
    return blocks_.empty() ? 0 : blocks_.back().offset() + blocks_.back().rows();
}

const HeavyHitterSketch& SensingEnsemble::heavy() const
{
    for (const auto& b : blocks_)
        if (const auto* h = std::get_if<HeavyHitterSketch>(&b.layout()))
            return *h;
    throw DimensionError("ensemble: no heavy-hitter block (sign-only replica?)");
}

const CountSketchLayout& SensingEnsemble::countsketch() const
{
    for (const auto& b : blocks_)
        if (const auto* c = std::get_if<CountSketchLayout>(&b.layout()))
            return *c;
    throw DimensionError("ensemble: no CountSketch block (sign-only replica?)");
}

std::vector<const Block*> SensingEnsemble::tail_blocks() const
{
    std::vector<const Block*> out;
    for (const auto& b : blocks_)
        if (b.kind() == BlockKind::tail)
            out.push_back(&b);
    return out;
}

std::vector<const Block*> SensingEnsemble::sign_blocks(int level) const
{
    std::vector<const Block*> out;
    for (const auto& b : blocks_)
        if (b.kind() == BlockKind::sign && b.level() == level)
            out.push_back(&b);
    return out;
}

double SensingEnsemble::log2_budget() const noexcept
{
    return std::log2(static_cast<double>(config_.top_select));
}

std::vector<BlockRange> SensingEnsemble::block_table() const
{
    std::vector<BlockRange> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_)
        out.push_back({b.name(), b.offset(), b.rows()});
    return out;
}

SensingEnsemble build_ensemble(std::size_t n, std::size_t k, const EnsembleConfig& config, std::uint64_t seed,
                               Composition composition)
{
    if (n == 0)
        throw ConstructionError("ensemble: n must be positive");
    if (k < 1 || 20 * k > n)
        throw ConstructionError("ensemble: need 1 <= k <= n/20 (n=" + std::to_string(n) + ", k=" +
                                std::to_string(k) + ")");
    if (n > SignedIndex::kMaxIndex)
        throw ConstructionError("ensemble: n too large");
    config.validate(k);

    std::vector<std::int8_t> signs(n);
    const std::uint64_t dseed = derive_seed(seed, "D");
    for (std::size_t i = 0; i < n; ++i)
        signs[i] = (hash3(dseed, i, 0) >> 63) ? -1 : 1;

    std::vector<Block> blocks;
    std::size_t offset = 0;
    auto add = [&](BlockKind kind, std::string name, int level, int copy, Block::Layout layout) {
        blocks.emplace_back(kind, std::move(name), level, copy, offset, std::move(layout));
        offset += blocks.back().rows();
        if (offset > SignedIndex::kMaxIndex)
            throw ConstructionError("ensemble: too many rows");
    };

    if (composition == Composition::full) {
        HeavyHitterSketch hh;
        hh.n = n;
        hh.K = config.heavy_K;
        hh.reps = config.heavy_reps;
        hh.buckets = config.heavy_buckets;
        hh.nbits = std::max<std::size_t>(ceil_log2(n), 1);
        hh.seed = derive_seed(seed, "A");
        add(BlockKind::heavy, "A", 0, 0, hh);

        CountSketchLayout cs;
        cs.n = n;
        cs.reps = config.countsketch_reps;
        cs.width = config.countsketch_rows;
        cs.seed = derive_seed(seed, "B");
        add(BlockKind::countsketch, "B", 0, 0, cs);

        const auto e_rows = static_cast<std::size_t>(std::ceil(config.C1 * static_cast<double>(k)));
        for (std::size_t l = 0; l < config.rep_log_n; ++l) {
            BernoulliLayout e{e_rows, 1.0 / static_cast<double>(k), derive_seed(seed, "E", l)};
            add(BlockKind::tail, "E" + std::to_string(l + 1), static_cast<int>(l), 0, e);
        }
    }

    const int levels = sign_level_count(config);
    for (int l = 0; l < levels; ++l) {
        const std::size_t copies = is_replicated_level(k, l) ? config.f_copies : 1;
        for (std::size_t c = 0; c < copies; ++c) {
            BernoulliLayout f{sign_rows(config, l), sign_density(config, l),
                              derive_seed(seed, "F", (static_cast<std::uint64_t>(l) << 16) | c)};
            std::string name = "F" + std::to_string(std::size_t{1} << l);
            if (c > 0)
                name += "#" + std::to_string(c + 1);
            add(BlockKind::sign, std::move(name), l, static_cast<int>(c), f);
        }
    }

    return SensingEnsemble(n, k, config, seed, std::move(signs), std::move(blocks), composition);
}

Measurements apply_phaseless(const SensingEnsemble& ensemble, std::span<const double> x)
{
    if (x.size() != ensemble.n())
        throw DimensionError("apply_phaseless: signal length " + std::to_string(x.size()) + " != n = " +
                             std::to_string(ensemble.n()));
    std::vector<double> y(ensemble.total_rows(), 0.0);
    const auto signs = ensemble.signs();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]))
            throw DimensionError("apply_phaseless: non-finite signal entry");
        if (x[i] == 0.0)
            continue;
        const double v = signs[i] * x[i];
        for (const auto& b : ensemble.blocks()) {
            double* base = y.data() + b.offset();
            b.for_each_in_column(i, [&](std::size_t row, int s) { base[row] += s * v; });
        }
    }
    for (double& v : y)
        v = std::abs(v);
    return Measurements(std::move(y), ensemble.block_table());
}

RowCounts row_count(const SensingEnsemble& ensemble)
{
    RowCounts rc;
    for (const auto& b : ensemble.blocks()) {
        rc.per_block.emplace_back(b.name(), b.rows());
        switch (b.kind()) {
        case BlockKind::heavy: rc.heavy += b.rows(); break;
        case BlockKind::countsketch: rc.countsketch += b.rows(); break;
        case BlockKind::tail: rc.tail += b.rows(); break;
        case BlockKind::sign: rc.sign += b.rows(); break;
        }
        rc.total += b.rows();
    }
    return rc;
}

} // namespace cphase
