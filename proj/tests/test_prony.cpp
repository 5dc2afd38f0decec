#include "cphase/errors.hpp"
#include "cphase/prony.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <set>

using namespace cphase;

namespace {

ComplexSignal sparse_complex(std::size_t n, std::size_t k, std::mt19937_64& rng, double min_mag = 1.0,
                             double max_mag = 10.0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ComplexSignal x(n);
    std::set<std::size_t> support;
    while (support.size() < k)
        support.insert(rng() % n);
    for (auto t : support) {
        const double mag = min_mag * std::pow(max_mag / min_mag, u(rng));
        x[t] = std::polar(mag, 2.0 * std::numbers::pi * u(rng));
    }
    return x;
}

double max_abs_diff(const ComplexSignal& a, const ComplexSignal& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(det_measure, row_count_is_4k_minus_1)
{
    for (std::size_t k = 1; k <= 8; ++k) {
        const DeterministicScheme s{64, k};
        EXPECT_EQ(s.rows(), 4 * k - 1);
        EXPECT_EQ(det_measure(s, ComplexSignal(64)).size(), 4 * k - 1);
    }
}

TEST(det_measure, trivial_inputs)
{
    const DeterministicScheme s{16, 3};
    for (double v : det_measure(s, ComplexSignal(16)))
        EXPECT_EQ(v, 0.0);
    ComplexSignal impulse(16);
    impulse[0] = 1.0;
    const auto y = det_measure(s, impulse);
    for (std::size_t m = 0; m < 6; ++m)
        EXPECT_NEAR(y[m], 1.0, 1e-15);
    // A-row a (1-based) sums a+1 unit coefficients.
    for (std::size_t a = 1; a <= 5; ++a)
        EXPECT_NEAR(y[6 + a - 1], static_cast<double>(a + 1), 1e-14);
    EXPECT_THROW(det_measure(s, ComplexSignal(15)), DimensionError);
}

TEST(det_measure, matches_dense_matrix_oracle)
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto x = sparse_complex(32, 3, rng);
        const auto y = det_measure({32, 3}, x);
        const auto ref = oracle::dense_det_measure(32, 3, x);
        ASSERT_EQ(y.size(), ref.size());
        for (std::size_t q = 0; q < y.size(); ++q)
            EXPECT_NEAR(y[q], ref[q], 1e-12);
    }
}

TEST(det_measure, global_phase_invariance)
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const auto x = sparse_complex(64, 5, rng);
        auto rotated = x;
        const Complex phase = std::polar(1.0, 0.37 * t);
        for (auto& v : rotated)
            v *= phase;
        const auto a = det_measure({64, 5}, x), b = det_measure({64, 5}, rotated);
        for (std::size_t q = 0; q < a.size(); ++q)
            EXPECT_NEAR(a[q], b[q], 1e-12 * (1.0 + a[q]));
    }
}

TEST(det_measure, conjugate_reversal_is_indistinguishable)
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto x = sparse_complex(64, 4, rng);
        const auto a = det_measure({64, 4}, x), b = det_measure({64, 4}, conj_reversal(x));
        for (std::size_t q = 0; q < a.size(); ++q)
            EXPECT_NEAR(a[q], b[q], 1e-11);
    }
}

TEST(resolve_phase, collinear_cases)
{
    auto c = resolve_phase(1.0, 1.0, 2.0);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(std::abs(c[0] - Complex(1.0, 0.0)), 0.0, 1e-12);
    c = resolve_phase(1.0, 1.0, 0.0);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_NEAR(std::abs(c[0] - Complex(-1.0, 0.0)), 0.0, 1e-12);
}

TEST(resolve_phase, reference_and_reflection)
{
    const Complex a(3.0, 4.0);
    const Complex ref = std::polar(5.0, 0.7);
    const auto c = resolve_phase(5.0, a, std::abs(ref + a));
    ASSERT_EQ(c.size(), 2u);
    // Reflection of ref about the direction of a.
    const Complex dir = a / std::abs(a);
    const Complex reflected = dir * std::conj(ref / dir);
    const bool has_ref = std::abs(c[0] - ref) < 1e-10 || std::abs(c[1] - ref) < 1e-10;
    const bool has_refl = std::abs(c[0] - reflected) < 1e-10 || std::abs(c[1] - reflected) < 1e-10;
    EXPECT_TRUE(has_ref);
    EXPECT_TRUE(has_refl);
}

TEST(resolve_phase, degenerate_inputs)
{
    EXPECT_EQ(resolve_phase(0.0, 1.0, 1.0), std::vector<Complex>{Complex{}});
    EXPECT_THROW(resolve_phase(1.0, 0.0, 1.0), UnderdeterminedError);
    EXPECT_THROW(resolve_phase(1.0, 1.0, 3.5), InconsistencyError);
}

TEST(resolve_phase, candidates_satisfy_both_constraints)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 2000; ++t) {
        const Complex x(u(rng), u(rng)), a(u(rng), u(rng));
        if (std::abs(a) < 1e-3 || std::abs(x) < 1e-3)
            continue;
        for (const Complex& c : resolve_phase(std::abs(x), a, std::abs(x + a))) {
            EXPECT_NEAR(std::abs(c), std::abs(x), 1e-10);
            EXPECT_NEAR(std::abs(c + a), std::abs(x + a), 1e-10);
        }
    }
}

TEST(prony_solve, single_spike)
{
    ComplexSignal x(32);
    x[7] = Complex(2.0, -1.0);
    const auto z = dft_head(x, 4);
    const auto got = prony_solve(z, 32, 2);
    EXPECT_LT(max_abs_diff(got, x), 1e-12);
}

TEST(prony_solve, random_unit_magnitude_4_sparse)
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto x = sparse_complex(64, 4, rng, 1.0, 1.0);
        EXPECT_LT(max_abs_diff(prony_solve(dft_head(x, 8), 64, 4), x), 1e-9);
    }
}

TEST(prony_solve, conditioning_stress)
{
    std::mt19937_64 rng(6);
    for (int t = 0; t < 30; ++t) {
        const auto x = sparse_complex(256, 8, rng, 1.0, 1e4);
        EXPECT_LT(max_abs_diff(prony_solve(dft_head(x, 16), 256, 8), x), 1e-6);
    }
}

TEST(prony_solve, lower_effective_sparsity)
{
    std::mt19937_64 rng(7);
    const auto x = sparse_complex(64, 2, rng);
    EXPECT_LT(max_abs_diff(prony_solve(dft_head(x, 10), 64, 5), x), 1e-9);
    EXPECT_LT(max_abs_diff(prony_solve(std::vector<Complex>(6), 64, 3), ComplexSignal(64)), 0.0 + 1e-300);
    EXPECT_THROW(prony_solve(std::vector<Complex>(5), 64, 3), DimensionError);
}

TEST(prony_solve, matches_brute_force_oracle)
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 4 + rng() % 13, k = 1 + rng() % 3;
        const auto x = sparse_complex(n, 1 + rng() % k, rng);
        const auto z = dft_head(x, 2 * k);
        EXPECT_LT(max_abs_diff(prony_solve(z, n, k), oracle::brute_force_prony(z, n, k)), 1e-10)
            << "n=" << n << " k=" << k;
    }
}

TEST(det_recover, round_trip_up_to_phase_and_reflection)
{
    std::mt19937_64 rng(9);
    for (std::size_t k = 1; k <= 6; ++k)
        for (int t = 0; t < 10; ++t) {
            const auto x = sparse_complex(64, k, rng);
            const DeterministicScheme s{64, k};
            DetRecoverStats stats;
            const auto x_hat = det_recover(s, det_measure(s, x), {}, &stats);
            const double direct = phase_invariant_error(x_hat, x);
            const double mirrored = phase_invariant_error(x_hat, conj_reversal(x));
            EXPECT_LT(std::min(direct, mirrored), 1e-8) << "k=" << k;
            EXPECT_GE(stats.valid_leaves, 1u);
        }
}

TEST(det_recover, real_nonnegative_and_phase_rotated_inputs)
{
    ComplexSignal x(32);
    x[0] = 2.0;
    x[5] = 1.0;
    const DeterministicScheme s{32, 2};
    auto rotated = x;
    for (auto& v : rotated)
        v *= std::polar(1.0, 1.1);
    const auto a = det_recover(s, det_measure(s, x));
    const auto b = det_recover(s, det_measure(s, rotated));
    EXPECT_LT(std::min(phase_invariant_error(a, x), phase_invariant_error(a, conj_reversal(x))), 1e-8);
    EXPECT_LT(max_abs_diff(a, b), 1e-9);
}

TEST(det_recover, zero_and_errors)
{
    const DeterministicScheme s{16, 2};
    EXPECT_EQ(det_recover(s, std::vector<double>(7, 0.0)), ComplexSignal(16));
    EXPECT_THROW(det_recover(s, std::vector<double>(6, 0.0)), DimensionError);
    // Violates the triangle inequality at every step.
    const std::vector<double> bad{1.0, 1.0, 1.0, 1.0, 5.0, 5.0, 5.0};
    EXPECT_THROW(det_recover(s, bad), InconsistencyError);
}

TEST(phase_error, helper_properties)
{
    std::mt19937_64 rng(10);
    const auto x = sparse_complex(16, 3, rng);
    auto r = x;
    for (auto& v : r)
        v *= std::polar(1.0, 2.0);
    EXPECT_LT(phase_invariant_error(r, x), 1e-14);
    EXPECT_NEAR(phase_invariant_error(ComplexSignal(16), x), 1.0, 1e-14);
    EXPECT_EQ(conj_reversal(conj_reversal(x)), x);
}
