#include "cphase/bench.hpp"
#include "cphase/decoder.hpp"
#include "cphase/errors.hpp"
#include "cphase/random.hpp"
#include "cphase/stats.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cphase;

namespace {

TrialSpec spec(std::size_t n, std::size_t k, SignalModel model)
{
    TrialSpec s;
    s.n = n;
    s.k = k;
    s.model = model;
    s.config = EnsembleConfig::defaults(n, k);
    s.seed = 2024;
    return s;
}

double min_sign_error2(const std::vector<double>& x, const std::vector<double>& x_hat)
{
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        a += (x[i] - x_hat[i]) * (x[i] - x_hat[i]);
        b += (x[i] + x_hat[i]) * (x[i] + x_hat[i]);
    }
    return std::min(a, b);
}

} // namespace

TEST(prune, matches_exhaustive_oracle)
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 1 + rng() % 20;
        const std::size_t size = rng() % (5 * k + 1);
        std::vector<std::uint32_t> s1;
        MagnitudeEstimates est;
        for (std::uint32_t i = 0; i < size; ++i) {
            s1.push_back(3 * i + 1);
            // Discrete values so ties occur.
            est[3 * i + 1] = std::floor(u(rng) * 8.0) / 2.0;
        }
        const double L = u(rng) * 2.0;
        const double lb = std::log2(5.0 * static_cast<double>(k));
        EXPECT_EQ(prune(s1, est, L, k, 0.25, lb), oracle::prune_reference(s1, est, L, k, 0.25, lb));
    }
}

TEST(prune, keeps_ties_and_handles_empty)
{
    MagnitudeEstimates est{{1, 2.0}, {2, 1.0}, {3, 1.0}, {4, 0.0}};
    const std::vector<std::uint32_t> s1{1, 2, 3, 4};
    EXPECT_EQ(prune(s1, est, 0.0, 2, 0.25, std::log2(10.0)), (std::vector<std::uint32_t>{1, 2, 3}));
    EXPECT_TRUE(prune(s1, est, 1e9, 2, 0.25, std::log2(10.0)).empty());
    EXPECT_TRUE(prune({}, est, 1.0, 2, 0.25, std::log2(10.0)).empty());
}

TEST(tail_energy, matches_dense_oracle)
{
    const std::size_t n = 1024, k = 4;
    const auto e = build_ensemble(n, k, EnsembleConfig::defaults(n, k), 17);
    auto s = spec(n, k, SignalModel::spikes_plus_tail);
    const auto x = gen_signal(s, 3);
    const auto y = apply_phaseless(e, x);
    std::vector<std::uint32_t> s1;
    for (std::uint32_t i = 0; i < n; ++i)
        if (std::abs(x[i]) > 0.5)
            s1.push_back(i);
    const auto got = estimate_tail_energy(e, y, s1);

    std::vector<double> per;
    for (const Block* b : e.tail_blocks()) {
        const auto rows = b->materialize(n).rows();
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t q = 0; q < rows.size(); ++q) {
            bool hit = false;
            for (const auto& entry : rows[q])
                hit = hit || std::binary_search(s1.begin(), s1.end(), entry.col);
            if (hit)
                continue;
            const double v = y.values()[b->offset() + q];
            sum += v * v;
            ++count;
        }
        if (count > 0)
            per.push_back(e.config().c1 * sum / static_cast<double>(count));
    }
    ASSERT_EQ(got.per_rep.size(), per.size());
    for (std::size_t l = 0; l < per.size(); ++l)
        EXPECT_NEAR(got.per_rep[l], per[l], 1e-12);
    EXPECT_NEAR(got.L, median(per), 1e-12);
}

TEST(tail_energy, fails_without_disjoint_rows)
{
    const std::size_t n = 200, k = 1;
    EnsembleConfig cfg = EnsembleConfig::defaults(n, k);
    cfg.C1 = 2.0; // two dense rows per sub-block
    const auto e = build_ensemble(n, k, cfg, 3);
    const auto y = apply_phaseless(e, std::vector<double>(n, 1.0));
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i)
        all[i] = i;
    EXPECT_THROW(estimate_tail_energy(e, y, all), EstimationError);
}

TEST(decode, recovers_exact_sparse_signals)
{
    auto s = spec(4096, 10, SignalModel::exact_sparse);
    int exact = 0;
    for (std::size_t t = 0; t < 20; ++t) {
        const auto x = gen_signal(s, t);
        const auto e = build_ensemble(s.n, s.k, s.config, derive_seed(1, "e", t));
        const auto r = decode(e, apply_phaseless(e, x));
        exact += min_sign_error2(x, r.to_dense(s.n)) == 0.0;
    }
    EXPECT_GE(exact, 19);
}

TEST(decode, zero_signal_gives_empty_result)
{
    const auto e = build_ensemble(2048, 8, EnsembleConfig::defaults(2048, 8), 1);
    const auto r = decode(e, apply_phaseless(e, std::vector<double>(2048, 0.0)));
    EXPECT_TRUE(r.x_hat.empty());
    EXPECT_TRUE(r.S0.empty());
    EXPECT_EQ(r.L.L, 0.0);
}

TEST(decode, candidate_sets_are_nested_and_bounded)
{
    auto s = spec(4096, 10, SignalModel::spikes_plus_tail);
    for (std::size_t t = 0; t < 5; ++t) {
        const auto x = gen_signal(s, t);
        const auto e = build_ensemble(s.n, s.k, s.config, t + 100);
        const auto r = decode(e, apply_phaseless(e, x));
        EXPECT_TRUE(std::includes(r.S0.begin(), r.S0.end(), r.S1.begin(), r.S1.end()));
        EXPECT_TRUE(std::includes(r.S1.begin(), r.S1.end(), r.S2.begin(), r.S2.end()));
        EXPECT_LE(r.S0.size(), kHeavyCandidateFactor * s.config.heavy_K);
        EXPECT_LE(r.S1.size(), s.config.top_select);
        EXPECT_EQ(r.x_hat.size(), r.S2.size());
        for (const auto& [i, v] : r.x_hat)
            EXPECT_EQ(std::abs(v), r.estimates.at(i));
    }
}

TEST(decode, is_sign_blind_and_deterministic)
{
    auto s = spec(4096, 8, SignalModel::spikes_plus_tail);
    const auto x = gen_signal(s, 0);
    auto neg = x;
    for (double& v : neg)
        v = -v;
    const auto e = build_ensemble(s.n, s.k, s.config, 5);
    const auto a = decode(e, apply_phaseless(e, x));
    const auto b = decode(e, apply_phaseless(e, neg));
    const auto c = decode(e, apply_phaseless(e, x));
    EXPECT_EQ(a.x_hat, b.x_hat);
    EXPECT_EQ(a.x_hat, c.x_hat);
    EXPECT_EQ(a.diagnostics.measurements_read, c.diagnostics.measurements_read);
}

TEST(decode, rejects_mismatched_measurements)
{
    const auto e = build_ensemble(1024, 4, EnsembleConfig::defaults(1024, 4), 1);
    const auto other = build_ensemble(2048, 4, EnsembleConfig::defaults(2048, 4), 1);
    EXPECT_THROW(decode(e, apply_phaseless(other, std::vector<double>(2048, 0.0))), DimensionError);
    const auto signs_only = build_ensemble(1024, 4, EnsembleConfig::defaults(1024, 4), 1, Composition::signs_only);
    EXPECT_THROW(decode(signs_only, apply_phaseless(signs_only, std::vector<double>(1024, 0.0))), DimensionError);
}

TEST(decode, touches_few_entries)
{
    auto s = spec(1 << 14, 4, SignalModel::exact_sparse);
    const auto x = gen_signal(s, 1);
    const auto e = build_ensemble(s.n, s.k, s.config, 9);
    const auto y = apply_phaseless(e, x);
    const auto r = decode(e, y);
    EXPECT_LT(r.diagnostics.measurements_read, y.size());
    EXPECT_LT(r.diagnostics.entries_touched, s.n);
}

TEST(decode_amplified, agrees_with_decode_on_a_single_replica)
{
    auto s = spec(4096, 10, SignalModel::exact_sparse);
    for (std::size_t t = 0; t < 10; ++t) {
        const auto x = gen_signal(s, t);
        std::vector<SensingEnsemble> reps{build_ensemble(s.n, s.k, s.config, t)};
        std::vector<Measurements> ys{apply_phaseless(reps[0], x)};
        const auto plain = decode(reps[0], ys[0]).to_dense(s.n);
        const auto amp = decode_amplified(reps, ys).to_dense(s.n);
        EXPECT_EQ(min_sign_error2(plain, amp), 0.0) << "trial " << t;
    }
}

TEST(decode_amplified, votes_repair_lean_sign_blocks)
{
    auto s = spec(4096, 16, SignalModel::exact_sparse);
    s.config.c_F = 0.1;
    int plain_errors = 0, amp_errors = 0;
    for (std::size_t t = 0; t < 30; ++t) {
        const auto x = gen_signal(s, t);
        std::vector<SensingEnsemble> reps;
        std::vector<Measurements> ys;
        for (std::size_t r = 0; r < 3; ++r) {
            reps.push_back(build_ensemble(s.n, s.k, s.config, derive_seed(t, "r", r),
                                          r == 0 ? Composition::full : Composition::signs_only));
            ys.push_back(apply_phaseless(reps.back(), x));
        }
        plain_errors += min_sign_error2(x, decode(reps[0], ys[0]).to_dense(s.n)) > 0.0;
        amp_errors += min_sign_error2(x, decode_amplified(reps, ys).to_dense(s.n)) > 0.0;
    }
    EXPECT_LT(amp_errors, plain_errors);
}
