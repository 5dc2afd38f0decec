#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed: dense matrices, exhaustive enumeration.

#include "cphase/ensemble.hpp"
#include "cphase/prony.hpp"
#include "cphase/signs.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Dense Φ' (without D) assembled block by block from materialized columns.
inline Eigen::MatrixXd dense_phi(const cphase::SensingEnsemble& e)
{
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(e.total_rows()),
                                                static_cast<Eigen::Index>(e.n()));
    for (const auto& b : e.blocks()) {
        const auto m = b.materialize(e.n());
        for (std::size_t c = 0; c < e.n(); ++c)
            for (const auto& entry : m.column(c))
                phi(static_cast<Eigen::Index>(b.offset() + entry.index()), static_cast<Eigen::Index>(c)) =
                    entry.sign();
    }
    return phi;
}

/// y = |Φ' D x| by dense matrix-vector product.
inline std::vector<double> dense_measure(const cphase::SensingEnsemble& e, const std::vector<double>& x)
{
    Eigen::VectorXd dx(static_cast<Eigen::Index>(e.n()));
    for (std::size_t i = 0; i < e.n(); ++i)
        dx(static_cast<Eigen::Index>(i)) = e.signs()[i] * x[i];
    const Eigen::VectorXd y = dense_phi(e) * dx;
    std::vector<double> out(static_cast<std::size_t>(y.size()));
    for (Eigen::Index q = 0; q < y.size(); ++q)
        out[static_cast<std::size_t>(q)] = std::abs(y(q));
    return out;
}

/// Dense DFT rows 0..count-1 with ω = e^{-2πi/n}.
inline Eigen::MatrixXcd dft_rows(std::size_t n, std::size_t count)
{
    Eigen::MatrixXcd F(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(n));
    for (std::size_t m = 0; m < count; ++m)
        for (std::size_t t = 0; t < n; ++t)
            F(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t)) =
                std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m * t) / static_cast<double>(n));
    return F;
}

/// |B F x| with B = [I_{2k}; prefix-sum rows] built as an explicit matrix.
inline std::vector<double> dense_det_measure(std::size_t n, std::size_t k, const cphase::ComplexSignal& x)
{
    const auto m = static_cast<Eigen::Index>(2 * k);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(4 * k - 1), m);
    for (Eigen::Index i = 0; i < m; ++i)
        B(i, i) = 1.0;
    for (Eigen::Index a = 0; a + 1 < m; ++a)
        for (Eigen::Index i = 0; i <= a + 1; ++i)
            B(m + a, i) = 1.0;
    Eigen::VectorXcd xv(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t)
        xv(static_cast<Eigen::Index>(t)) = x[t];
    const Eigen::VectorXcd y = B.cast<std::complex<double>>() * (dft_rows(n, 2 * k) * xv);
    std::vector<double> out;
    for (Eigen::Index q = 0; q < y.size(); ++q)
        out.push_back(std::abs(y(q)));
    return out;
}

/// Brute-force Prony: try every support of size <= k in order of size and
/// keep the first whose least-squares fit reproduces the coefficients.
inline cphase::ComplexSignal brute_force_prony(const std::vector<std::complex<double>>& z, std::size_t n,
                                               std::size_t k, double tol = 1e-9)
{
    const Eigen::MatrixXcd F = dft_rows(n, z.size());
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(z.size()));
    for (std::size_t m = 0; m < z.size(); ++m)
        rhs(static_cast<Eigen::Index>(m)) = z[m];
    double scale = rhs.norm();
    cphase::ComplexSignal best(n);
    if (scale == 0.0)
        return best;
    for (std::size_t s = 1; s <= k; ++s) {
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(s), true);
        do {
            std::vector<std::size_t> support;
            for (std::size_t t = 0; t < n; ++t)
                if (pick[t])
                    support.push_back(t);
            Eigen::MatrixXcd V(F.rows(), static_cast<Eigen::Index>(s));
            for (std::size_t j = 0; j < s; ++j)
                V.col(static_cast<Eigen::Index>(j)) = F.col(static_cast<Eigen::Index>(support[j]));
            const Eigen::VectorXcd c = V.colPivHouseholderQr().solve(rhs);
            if ((V * c - rhs).norm() <= tol * scale) {
                for (std::size_t j = 0; j < s; ++j)
                    best[support[j]] = c(static_cast<Eigen::Index>(j));
                return best;
            }
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    return best;
}

/// Pruning rule evaluated the long way: for every candidate count m, find the
/// dyadic l0 by checking the interval definition directly.
inline std::vector<std::uint32_t> prune_reference(const std::vector<std::uint32_t>& s1,
                                                  const cphase::MagnitudeEstimates& est, double L, std::size_t k,
                                                  double C0, double log2_budget)
{
    std::vector<double> z;
    for (auto i : s1)
        z.push_back(est.at(i));
    std::sort(z.rbegin(), z.rend());
    std::size_t best_m = 0;
    for (std::size_t m = 1; m <= z.size(); ++m) {
        int l0 = -1;
        for (int cand = -1; cand < 40; ++cand)
            if (std::pow(2.0, cand) < static_cast<double>(m) && static_cast<double>(m) <= std::pow(2.0, cand + 1)) {
                l0 = cand;
                break;
            }
        const double q = log2_budget - l0 + 2.0;
        if (z[m - 1] * z[m - 1] > static_cast<double>(k) * L / (C0 * std::pow(2.0, l0) * q * q))
            best_m = m;
    }
    std::vector<std::uint32_t> out;
    if (best_m == 0)
        return out;
    for (auto i : s1)
        if (est.at(i) >= z[best_m - 1])
            out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

/// SBM(N, a, b) with edge probabilities a ln N / N inside and b ln N / N
/// across; planted labels are +1 for even vertex ids, -1 for odd.
inline cphase::SignGraph sbm(std::size_t N, double a, double b, std::mt19937_64& rng)
{
    cphase::SignGraph g;
    const double ln = std::log(static_cast<double>(N));
    const double p_in = std::min(1.0, a * ln / static_cast<double>(N));
    const double p_out = std::min(1.0, b * ln / static_cast<double>(N));
    std::bernoulli_distribution in(p_in), out(p_out);
    for (std::uint32_t v = 0; v < N; ++v)
        g.vertices.push_back(v);
    for (std::uint32_t u = 0; u < N; ++u)
        for (std::uint32_t v = u + 1; v < N; ++v)
            if ((u % 2 == v % 2) ? in(rng) : out(rng))
                g.edges.push_back({u, v, 1.0});
    return g;
}

inline int planted_label(std::uint32_t v) { return v % 2 == 0 ? 1 : -1; }

/// Overlap of a labelling with the planted partition, in [0, 1], maximized over a global flip.
inline double overlap(const cphase::ClusterLabels& labels)
{
    std::size_t agree = 0, total = 0;
    for (const auto& [v, l] : labels.labels) {
        agree += (l == planted_label(v));
        ++total;
    }
    const double f = static_cast<double>(agree) / static_cast<double>(total);
    return std::max(f, 1.0 - f);
}

} // namespace oracle
