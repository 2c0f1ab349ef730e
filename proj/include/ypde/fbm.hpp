#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ypde/besov.hpp"
#include "ypde/rng.hpp"
#include "ypde/time_grid.hpp"

namespace ypde {

namespace detail {

/// Iterative radix-2 complex FFT, in place. Size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = (inverse ? 2.0 : -2.0) * 3.14159265358979323846 / static_cast<double>(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                auto u = a[i + k];
                auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// Autocovariance of fractional Gaussian noise increments at spacing dt.
inline double fgn_cov(std::size_t j, double hurst, double dt) {
    double jd = static_cast<double>(j);
    double t2h = 2.0 * hurst;
    return 0.5 * std::pow(dt, t2h) *
           (std::pow(jd + 1.0, t2h) - 2.0 * std::pow(jd, t2h) + std::pow(std::abs(jd - 1.0), t2h));
}

}  // namespace detail

inline double fbm_covariance(double s, double t, double hurst) {
    double t2h = 2.0 * hurst;
    return 0.5 * (std::pow(s, t2h) + std::pow(t, t2h) - std::pow(std::abs(t - s), t2h));
}

/// Exact-covariance fractional Brownian motion on the grid, pinned to zero at
/// t0. Circulant embedding of the increment covariance; falls back to a dense
/// Cholesky factorization if the embedding is not nonnegative definite.
/// Deterministic for a fixed seed.
inline SampledPath generate_fbm(std::uint64_t seed, double hurst, const TimeGrid& grid) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("generate_fbm: Hurst parameter must lie in (0,1)");
    const std::size_t n = grid.n;
    const double dt = grid.dt();
    Rng rng(seed);

    std::vector<double> increments(n);
    bool done = false;

    std::size_t m = 1;
    while (m < 2 * n) m <<= 1;
    for (int attempt = 0; attempt < 3 && !done; ++attempt, m <<= 1) {
        std::vector<std::complex<double>> c(m);
        for (std::size_t j = 0; j <= m / 2; ++j) c[j] = detail::fgn_cov(j, hurst, dt);
        for (std::size_t j = 1; j < m / 2; ++j) c[m - j] = c[j];
        detail::fft(c, false);
        double lam_min = 0.0, lam_max = 0.0;
        for (auto& z : c) {
            lam_min = std::min(lam_min, z.real());
            lam_max = std::max(lam_max, z.real());
        }
        if (lam_min < -1e-9 * lam_max) continue;  // embedding failed, enlarge or fall back

        std::vector<std::complex<double>> a(m);
        const double md = static_cast<double>(m);
        a[0] = std::sqrt(std::max(0.0, c[0].real()) / md) * rng.next_gaussian();
        a[m / 2] = std::sqrt(std::max(0.0, c[m / 2].real()) / md) * rng.next_gaussian();
        for (std::size_t j = 1; j < m / 2; ++j) {
            double r = std::sqrt(std::max(0.0, c[j].real()) / (2.0 * md));
            double x = rng.next_gaussian();
            double y = rng.next_gaussian();
            a[j] = std::complex<double>(r * x, r * y);
            a[m - j] = std::conj(a[j]);
        }
        detail::fft(a, false);
        for (std::size_t k = 0; k < n; ++k) increments[k] = a[k].real();
        done = true;
    }

    if (!done) {
        // Dense Cholesky of the fGn covariance. Quadratic storage, kept for
        // the rare grids where the embedding has negative modes.
        if (n > 4096)
            throw std::runtime_error("generate_fbm: embedding failed and grid too large for Cholesky");
        std::vector<double> L(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = detail::fgn_cov(i >= j ? i - j : j - i, hurst, dt);
                for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
                if (i == j) {
                    if (s <= 0.0) throw std::runtime_error("generate_fbm: covariance not SPD");
                    L[i * n + i] = std::sqrt(s);
                } else {
                    L[i * n + j] = s / L[j * n + j];
                }
            }
        }
        std::vector<double> z(n);
        for (auto& x : z) x = rng.next_gaussian();
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k <= i; ++k) s += L[i * n + k] * z[k];
            increments[i] = s;
        }
    }

    SampledPath path(grid, 1);
    path.scalar(0) = 0.0;
    for (std::size_t k = 0; k < n; ++k) path.scalar(k + 1) = path.scalar(k) + increments[k];
    return path;
}

/// Coloring data for space-colored fractional noise: W_t = sum_k lambda_k e_k beta^k_t
/// with independent scalar fBms beta^k.
struct HurstSpec {
    double hurst;
    std::vector<double> coloring;

    HurstSpec(double h, std::vector<double> lambdas) : hurst(h), coloring(std::move(lambdas)) {
        if (!(hurst > 0.0 && hurst < 1.0))
            throw std::invalid_argument("HurstSpec: Hurst parameter must lie in (0,1)");
        for (double l : coloring)
            if (!std::isfinite(l)) throw std::invalid_argument("HurstSpec: coloring must be finite");
    }
};

/// basis[k] is the k-th H-orthonormal mode, length d each.
inline SampledPath generate_colored_fbm(std::uint64_t seed, const TimeGrid& grid,
                                        const HurstSpec& spec,
                                        const std::vector<std::vector<double>>& basis) {
    if (basis.size() != spec.coloring.size())
        throw std::invalid_argument("generate_colored_fbm: coloring and basis counts differ");
    if (basis.empty()) throw std::invalid_argument("generate_colored_fbm: need at least one mode");
    const std::size_t d = basis.front().size();
    for (const auto& e : basis)
        if (e.size() != d) throw std::invalid_argument("generate_colored_fbm: ragged basis");

    SampledPath out(grid, d);
    for (std::size_t mode = 0; mode < basis.size(); ++mode) {
        if (spec.coloring[mode] == 0.0) continue;
        SampledPath beta = generate_fbm(Rng::derive(seed, mode), spec.hurst, grid);
        for (std::size_t k = 0; k < out.num_nodes(); ++k) {
            auto row = out.at(k);
            double w = spec.coloring[mode] * beta.scalar(k);
            for (std::size_t i = 0; i < d; ++i) row[i] += w * basis[mode][i];
        }
    }
    return out;
}

/// First d Dirichlet sine modes on (0,1), orthonormal under the lumped-mass
/// inner product with weight dx = 1/(d+1).
inline std::vector<std::vector<double>> sine_basis(std::size_t d, std::size_t modes) {
    std::vector<std::vector<double>> basis(modes, std::vector<double>(d));
    const double dx = 1.0 / static_cast<double>(d + 1);
    for (std::size_t k = 0; k < modes; ++k)
        for (std::size_t i = 0; i < d; ++i)
            basis[k][i] = std::sqrt(2.0) *
                          std::sin(static_cast<double>(k + 1) * 3.14159265358979323846 *
                                   static_cast<double>(i + 1) * dx);
    return basis;
}

}  // namespace ypde
