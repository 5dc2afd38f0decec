#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cphase {

using Complex = std::complex<double>;
using ComplexSignal = std::vector<Complex>;

/// Φ = B·F: B stacks I_{2k} on top of the (2k-1)-row prefix-sum matrix,
/// F is the DFT z_m = Σ_t x_t ω^{mt}, ω = e^{-2πi/n}, rows m = 0..2k-1.
struct DeterministicScheme {
    std::size_t n = 0;
    std::size_t k = 0;

    std::size_t rows() const noexcept { return 4 * k - 1; }
};

struct PronyOptions {
    double zero_tol = 1e-9;   ///< relative to ||y||_inf: coefficient treated as zero
    double branch_tol = 1e-6; ///< relative to ||y||_inf: leaf validation / re-measure tolerance
    double rank_tol = 1e-10;  ///< relative singular-value cutoff for the Hankel rank
    double snap_tol = 1e-3;   ///< max distance of a root to its n-th root of unity
};

/// First `count` DFT coefficients of x.
std::vector<Complex> dft_head(std::span<const Complex> x, std::size_t count);

/// y = |Φx|: 2k coefficient magnitudes followed by 2k-1 prefix-sum magnitudes.
std::vector<double> det_measure(const DeterministicScheme& scheme, std::span<const Complex> x);

/// The x with |x| = mag_x and |x + a| = mag_sum (at most two).
std::vector<Complex> resolve_phase(double mag_x, Complex a, double mag_sum, double tol = 1e-9);

/// Recovers an s-sparse x (s <= k) from its first 2k DFT coefficients.
ComplexSignal prony_solve(std::span<const Complex> coeffs, std::size_t n, std::size_t k,
                          const PronyOptions& options = {});

struct DetRecoverStats {
    std::size_t leaves = 0;       ///< complete coefficient sequences examined
    std::size_t valid_leaves = 0; ///< of those, consistent with an s-sparse signal on the grid
};

/// Inverts det_measure up to a global phase.
ComplexSignal det_recover(const DeterministicScheme& scheme, std::span<const double> y,
                          const PronyOptions& options = {}, DetRecoverStats* stats = nullptr);

/// min_φ ||e^{iφ} x_hat - x|| / ||x|| (absolute error if x = 0).
double phase_invariant_error(std::span<const Complex> x_hat, std::span<const Complex> x);

/// t -> conj(x[-t mod n]). Produces the same measurements as x.
ComplexSignal conj_reversal(std::span<const Complex> x);

} // namespace cphase
