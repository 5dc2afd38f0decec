#include "cphase/prony.hpp"

#include "cphase/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cphase {

namespace {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

Complex root_of_unity(std::size_t n, std::size_t e)
{
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(e % n) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

double inf_norm(std::span<const double> y)
{
    double m = 0.0;
    for (double v : y)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace

std::vector<Complex> dft_head(std::span<const Complex> x, std::size_t count)
{
    const std::size_t n = x.size();
    std::vector<Complex> z(count, Complex{});
    for (std::size_t t = 0; t < n; ++t) {
        if (x[t] == Complex{})
            continue;
        for (std::size_t m = 0; m < count; ++m)
            z[m] += x[t] * root_of_unity(n, m * t);
    }
    return z;
}

std::vector<double> det_measure(const DeterministicScheme& scheme, std::span<const Complex> x)
{
    if (x.size() != scheme.n)
        throw DimensionError("det_measure: signal length differs from n");
    if (scheme.k == 0)
        throw DimensionError("det_measure: k must be positive");
    const std::size_t m = 2 * scheme.k;
    const auto z = dft_head(x, m);
    std::vector<double> y;
    y.reserve(scheme.rows());
    for (const Complex& c : z)
        y.push_back(std::abs(c));
    Complex sum = z[0];
    for (std::size_t a = 1; a < m; ++a) {
        sum += z[a];
        y.push_back(std::abs(sum));
    }
    return y;
}

std::vector<Complex> resolve_phase(double mag_x, Complex a, double mag_sum, double tol)
{
    if (mag_x == 0.0)
        return {Complex{}};
    const double mag_a = std::abs(a);
    if (mag_a == 0.0)
        throw UnderdeterminedError("resolve_phase: a = 0 leaves the phase free");
    double c = (mag_sum * mag_sum - mag_x * mag_x - mag_a * mag_a) / (2.0 * mag_x * mag_a);
    if (std::abs(c) > 1.0 + tol)
        throw InconsistencyError("resolve_phase: magnitudes violate the triangle inequality");
    c = std::clamp(c, -1.0, 1.0);
    const double psi = std::arg(a);
    const double delta = std::acos(c);
    const Complex first = std::polar(mag_x, psi + delta);
    if (delta == 0.0 || delta == std::numbers::pi)
        return {first};
    return {first, std::polar(mag_x, psi - delta)};
}

ComplexSignal prony_solve(std::span<const Complex> coeffs, std::size_t n, std::size_t k, const PronyOptions& options)
{
    if (k == 0 || coeffs.size() != 2 * k)
        throw DimensionError("prony_solve: need exactly 2k coefficients");
    if (k > n)
        throw DimensionError("prony_solve: k exceeds n");
    ComplexSignal x(n, Complex{});

    MatrixXc H(k, k + 1);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= k; ++j)
            H(i, j) = coeffs[i + j];
    const Eigen::JacobiSVD<MatrixXc> rank_svd(H);
    const auto& sv = rank_svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return x;
    std::size_t s = 0;
    while (s < static_cast<std::size_t>(sv.size()) && sv(s) > options.rank_tol * sv(0))
        ++s;

    // Annihilating filter of degree s: null vector of the (2k-s) x (s+1) Hankel matrix.
    MatrixXc Hs(2 * k - s, s + 1);
    for (std::size_t i = 0; i < 2 * k - s; ++i)
        for (std::size_t j = 0; j <= s; ++j)
            Hs(i, j) = coeffs[i + j];
    const Eigen::JacobiSVD<MatrixXc> null_svd(Hs, Eigen::ComputeFullV);
    const VectorXc h = null_svd.matrixV().col(s);
    if (std::abs(h(s)) < 1e-12 * h.norm())
        throw NumericalError("prony_solve: annihilating polynomial has degenerate leading coefficient");

    MatrixXc companion = MatrixXc::Zero(s, s);
    for (std::size_t i = 1; i < s; ++i)
        companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < s; ++i)
        companion(i, s - 1) = -h(i) / h(s);
    const Eigen::ComplexEigenSolver<MatrixXc> eig(companion, false);
    if (eig.info() != Eigen::Success)
        throw NumericalError("prony_solve: eigenvalue iteration did not converge");

    std::vector<std::size_t> support;
    for (Eigen::Index r = 0; r < eig.eigenvalues().size(); ++r) {
        const Complex root = eig.eigenvalues()(r);
        const Complex on_circle = root / std::abs(root);
        const double turns = -std::arg(on_circle) * static_cast<double>(n) / (2.0 * std::numbers::pi);
        const long long nearest = std::llround(turns);
        const std::size_t t =
            static_cast<std::size_t>(((nearest % static_cast<long long>(n)) + static_cast<long long>(n)) %
                                     static_cast<long long>(n));
        if (std::abs(root - root_of_unity(n, t)) > options.snap_tol)
            throw NumericalError("prony_solve: root is not close to an n-th root of unity");
        support.push_back(t);
    }
    std::sort(support.begin(), support.end());
    if (std::adjacent_find(support.begin(), support.end()) != support.end())
        throw NumericalError("prony_solve: two roots snapped to the same grid point");

    MatrixXc V(2 * k, s);
    VectorXc rhs(2 * k);
    for (std::size_t m = 0; m < 2 * k; ++m) {
        rhs(m) = coeffs[m];
        for (std::size_t j = 0; j < s; ++j)
            V(m, j) = root_of_unity(n, m * support[j]);
    }
    const VectorXc values = V.colPivHouseholderQr().solve(rhs);
    for (std::size_t j = 0; j < s; ++j)
        x[support[j]] = values(j);
    return x;
}

namespace {

/// Does z_0..z_{2k-1} look like the spectrum head of an s-sparse signal on
/// the n-point grid? Cheap screen run on every leaf of the branch search.
bool plausible_spectrum(const std::vector<Complex>& z, std::size_t n, std::size_t k, double scale,
                        const PronyOptions& options)
{
    MatrixXc H(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            H(i, j) = z[i + j];
    Eigen::FullPivLU<MatrixXc> lu(H);
    lu.setThreshold(options.rank_tol * 10.0);
    const std::size_t s = static_cast<std::size_t>(lu.rank());
    if (s == 0)
        return false;

    // Monic recurrence of order s from the leading s x s block.
    MatrixXc Hs = H.topLeftCorner(s, s);
    VectorXc rhs(s);
    for (std::size_t i = 0; i < s; ++i)
        rhs(i) = -z[i + s];
    const Eigen::PartialPivLU<MatrixXc> block_lu(Hs);
    const VectorXc c = block_lu.solve(rhs);
    double c_norm = 1.0;
    for (std::size_t j = 0; j < s; ++j)
        c_norm += std::abs(c(j));

    const double tol = options.branch_tol * scale * c_norm;
    for (std::size_t i = 0; i + s < 2 * k; ++i) {
        Complex r = z[i + s];
        for (std::size_t j = 0; j < s; ++j)
            r += c(j) * z[i + j];
        if (std::abs(r) > tol)
            return false;
    }

    std::size_t roots = 0;
    for (std::size_t t = 0; t < n && roots <= s; ++t) {
        const Complex w = root_of_unity(n, t);
        Complex p = 1.0;
        for (std::size_t j = s; j-- > 0;)
            p = p * w + c(j);
        if (std::abs(p) < 1e-6 * c_norm)
            ++roots;
    }
    return roots == s;
}

struct BranchSearch {
    const DeterministicScheme& scheme;
    std::span<const double> y;
    const PronyOptions& options;
    double scale;
    DetRecoverStats stats;
    std::vector<Complex> z;
    bool side_fixed = false;
    ComplexSignal found;
    bool done = false;

    double coeff_mag(std::size_t j) const { return y[j]; }
    double prefix_mag(std::size_t j) const { return y[2 * scheme.k + j - 1]; } // |z_0 + ... + z_j|, j >= 1

    void leaf()
    {
        ++stats.leaves;
        if (!plausible_spectrum(z, scheme.n, scheme.k, scale, options))
            return;
        ++stats.valid_leaves;
        ComplexSignal x;
        try {
            x = prony_solve(z, scheme.n, scheme.k, options);
        } catch (const NumericalError&) {
            return;
        }
        const auto again = det_measure(scheme, x);
        for (std::size_t q = 0; q < again.size(); ++q)
            if (std::abs(again[q] - y[q]) > options.branch_tol * scale)
                return;
        found = std::move(x);
        done = true;
    }

    void extend(std::size_t j, Complex prefix)
    {
        if (done)
            return;
        if (j == z.size()) {
            leaf();
            return;
        }
        const double mag = coeff_mag(j);
        if (mag <= options.zero_tol * scale) {
            z[j] = Complex{};
            extend(j + 1, prefix);
            return;
        }
        if (std::abs(prefix) <= options.zero_tol * scale)
            throw UnderdeterminedError("det_recover: vanishing partial sum leaves a phase free");
        std::vector<Complex> candidates;
        try {
            candidates = resolve_phase(mag, prefix, prefix_mag(j), options.branch_tol * scale / mag);
        } catch (const InconsistencyError&) {
            return;
        }
        // Collapse candidates that agree to within tolerance.
        if (candidates.size() == 2 && std::abs(candidates[0] - candidates[1]) <= options.branch_tol * scale)
            candidates.resize(1);
        // The two branches at the first genuine split are mirror images
        // (global conjugation), so only one needs exploring.
        const bool fix_here = !side_fixed && candidates.size() == 2;
        if (fix_here) {
            candidates.resize(1);
            side_fixed = true;
        }
        for (const Complex& c : candidates) {
            z[j] = c;
            extend(j + 1, prefix + c);
            if (done)
                return;
        }
    }
};

} // namespace

ComplexSignal det_recover(const DeterministicScheme& scheme, std::span<const double> y, const PronyOptions& options,
                          DetRecoverStats* stats)
{
    if (scheme.k == 0 || scheme.k > scheme.n)
        throw DimensionError("det_recover: need 1 <= k <= n");
    if (y.size() != scheme.rows())
        throw DimensionError("det_recover: expected 4k-1 measurements");
    for (double v : y)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DimensionError("det_recover: measurements must be finite and nonnegative");

    const double scale = inf_norm(y);
    const std::size_t m = 2 * scheme.k;
    std::size_t first = m;
    for (std::size_t j = 0; j < m; ++j)
        if (y[j] > options.zero_tol * scale) {
            first = j;
            break;
        }
    if (scale == 0.0 || first == m)
        return ComplexSignal(scheme.n, Complex{});

    BranchSearch search{scheme, y, options, scale, {}, std::vector<Complex>(m, Complex{}), false, {}, false};
    search.z[first] = y[first];
    search.extend(first + 1, search.z[first]);
    if (stats)
        *stats = search.stats;
    if (!search.done)
        throw InconsistencyError("det_recover: no branch is consistent with the measurements");
    return search.found;
}

double phase_invariant_error(std::span<const Complex> x_hat, std::span<const Complex> x)
{
    if (x_hat.size() != x.size())
        throw DimensionError("phase_invariant_error: length mismatch");
    Complex inner{};
    double norm2 = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        inner += std::conj(x_hat[t]) * x[t];
        norm2 += std::norm(x[t]);
    }
    const Complex rot = std::abs(inner) > 0.0 ? inner / std::abs(inner) : Complex{1.0, 0.0};
    double err2 = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t)
        err2 += std::norm(rot * x_hat[t] - x[t]);
    return norm2 > 0.0 ? std::sqrt(err2 / norm2) : std::sqrt(err2);
}

ComplexSignal conj_reversal(std::span<const Complex> x)
{
    const std::size_t n = x.size();
    ComplexSignal out(n);
    for (std::size_t t = 0; t < n; ++t)
        out[t] = std::conj(x[(n - t) % n]);
    return out;
}

} // namespace cphase
