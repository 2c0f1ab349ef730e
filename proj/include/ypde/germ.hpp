#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ypde/time_grid.hpp"

namespace ypde {

/// A two-parameter map A_{s,t} on the simplex {s < t}, the input of the
/// sewing operator. Evaluators must be pure: sew refines them on nested
/// dyadic sub-partitions, so the same (s,t) pair may be requested from
/// different contexts. declared_gamma is the regularity of the three-point
/// defect deltaA and must exceed 1 for sew eligibility.
///
/// The path-backed helpers below close over their arguments by reference;
/// the caller keeps the paths alive for the lifetime of the germ.
struct Germ {
    std::size_t dim = 1;
    double declared_alpha = 0.5;
    double declared_gamma = 2.0;
    std::function<void(double s, double t, std::span<double> out)> eval;

    void operator()(double s, double t, std::span<double> out) const {
        if (!(s < t)) {
            for (auto& x : out) x = 0.0;
            return;
        }
        eval(s, t, out);
    }
};

/// Additive germ f_t - f_s; sews to f - f_{t0} exactly.
inline Germ additive_germ(const SampledPath& f, double alpha = 1.0, double gamma = 2.0) {
    Germ g;
    g.dim = f.dim();
    g.declared_alpha = alpha;
    g.declared_gamma = gamma;
    g.eval = [&f, d = f.dim()](double s, double t, std::span<double> out) {
        std::vector<double> a(d), b(d);
        f.value_at(s, a);
        f.value_at(t, b);
        for (std::size_t i = 0; i < d; ++i) out[i] = b[i] - a[i];
    };
    return g;
}

/// Scalar germ built from closed-form functions, A_{s,t} = u(s) (f(t) - f(s)).
inline Germ product_germ(std::function<double(double)> u, std::function<double(double)> f,
                         double alpha = 1.0, double gamma = 2.0) {
    Germ g;
    g.dim = 1;
    g.declared_alpha = alpha;
    g.declared_gamma = gamma;
    g.eval = [u = std::move(u), f = std::move(f)](double s, double t, std::span<double> out) {
        out[0] = u(s) * (f(t) - f(s));
    };
    return g;
}

/// Left-point pairing germ on sampled scalar paths, u_s (f_t - f_s), with
/// sub-grid times read off the linear interpolants.
inline Germ sampled_product_germ(const SampledPath& u, const SampledPath& f, double alpha,
                                 double gamma) {
    if (!u.grid().same_as(f.grid())) throw std::invalid_argument("sampled_product_germ: grid mismatch");
    if (u.dim() != 1 || f.dim() != 1)
        throw std::invalid_argument("sampled_product_germ: scalar paths required");
    Germ g;
    g.dim = 1;
    g.declared_alpha = alpha;
    g.declared_gamma = gamma;
    g.eval = [&u, &f](double s, double t, std::span<double> out) {
        out[0] = u.scalar_at(s) * (f.scalar_at(t) - f.scalar_at(s));
    };
    return g;
}

inline Germ linear_combination(double a, const Germ& A, double b, const Germ& B) {
    if (A.dim != B.dim) throw std::invalid_argument("linear_combination: germ dimensions differ");
    Germ g;
    g.dim = A.dim;
    g.declared_alpha = std::min(A.declared_alpha, B.declared_alpha);
    g.declared_gamma = std::min(A.declared_gamma, B.declared_gamma);
    g.eval = [a, &A, b, &B, d = A.dim](double s, double t, std::span<double> out) {
        std::vector<double> tmp(d);
        A(s, t, {tmp.data(), d});
        B(s, t, out);
        for (std::size_t i = 0; i < d; ++i) out[i] = a * tmp[i] + b * out[i];
    };
    return g;
}

inline Germ difference_germ(const Germ& A, const Germ& B) { return linear_combination(1.0, A, -1.0, B); }

/// Discrete Omega_p / delta-norm estimates of a germ on the grid.
struct GermNorms {
    std::vector<double> omega_table;        // Omega_p(A, k*dt), k = 1..n, nondecreasing
    std::vector<double> delta_omega_table;  // Omega-bar_p(deltaA, k*dt), theta-sampled
    double norm_alpha = 0.0;                // sup_tau tau^-alpha Omega_p(A, tau)
    double norm_delta_gamma = 0.0;          // sup_tau tau^-gamma Omega-bar_p(deltaA, tau)
};

namespace detail {

inline double p_accumulate_finish(double acc, double dt, double p, bool is_inf) {
    if (is_inf) return acc;
    return std::pow(dt * acc, 1.0 / p);
}

inline double euclid(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace detail

/// Omega_p(A, tau) over node lags, the scaled sup norm ||A||_{B^alpha_{p,inf}},
/// and the delta-norm ||deltaA||_{Bbar^gamma_{p,inf}} with the theta-sup taken
/// over a uniform sample of [0,1]. For the additive germ the delta norm is
/// exactly zero.
inline GermNorms germ_norms(const Germ& germ, const TimeGrid& grid, double p, double alpha,
                            double gamma, std::size_t theta_samples = 5, bool dyadic_lags = false) {
    if (!(p >= 1.0)) throw std::invalid_argument("germ_norms: p must be >= 1");
    if (theta_samples < 3) throw std::invalid_argument("germ_norms: need at least 3 theta samples");
    const std::size_t n = grid.n;
    const double dt = grid.dt();
    const bool is_inf = (p == std::numeric_limits<double>::infinity());
    const std::size_t d = germ.dim;

    std::vector<double> a(d), b(d), c(d), delta(d);
    std::vector<double> lag_omega(n + 1, 0.0);
    std::vector<double> lag_delta(n + 1, 0.0);
    std::vector<bool> lag_used(n + 1, false);

    auto eval_at = [&](double s, double t, std::span<double> out) {
        try {
            germ(s, t, out);
        } catch (const std::exception& e) {
            throw std::runtime_error("germ evaluation failed at (s,t)=(" + std::to_string(s) + "," +
                                     std::to_string(t) + "): " + e.what());
        }
    };

    for (std::size_t lag = 1; lag <= n; dyadic_lags ? lag *= 2 : ++lag) {
        lag_used[lag] = true;
        const double h = static_cast<double>(lag) * dt;
        // left-endpoint Riemann sum over r in [0, T-h); p = inf takes the max
        // over every start node instead.
        const std::size_t r_end = is_inf ? n - lag + 1 : n - lag;
        double acc = 0.0;
        for (std::size_t r = 0; r < r_end; ++r) {
            eval_at(grid.node(r), grid.node(r + lag), a);
            double nv = detail::euclid(a);
            acc = is_inf ? std::max(acc, nv) : acc + std::pow(nv, p);
        }
        lag_omega[lag] = detail::p_accumulate_finish(acc, dt, p, is_inf);

        double dacc_max = 0.0;
        for (std::size_t ti = 0; ti < theta_samples; ++ti) {
            double theta = static_cast<double>(ti) / static_cast<double>(theta_samples - 1);
            if (theta <= 0.0 || theta >= 1.0) continue;  // degenerate splits vanish
            double dacc = 0.0;
            for (std::size_t r = 0; r < r_end; ++r) {
                double s = grid.node(r);
                double t = grid.node(r + lag);
                double mid = s + theta * h;
                eval_at(s, t, a);
                eval_at(s, mid, b);
                eval_at(mid, t, c);
                for (std::size_t i = 0; i < d; ++i) delta[i] = a[i] - b[i] - c[i];
                double nv = detail::euclid(delta);
                dacc = is_inf ? std::max(dacc, nv) : dacc + std::pow(nv, p);
            }
            dacc_max = std::max(dacc_max, detail::p_accumulate_finish(dacc, dt, p, is_inf));
        }
        lag_delta[lag] = dacc_max;
    }

    GermNorms out;
    out.omega_table.resize(n);
    out.delta_omega_table.resize(n);
    double run = 0.0, run_d = 0.0;
    for (std::size_t lag = 1; lag <= n; ++lag) {
        run = std::max(run, lag_omega[lag]);
        run_d = std::max(run_d, lag_delta[lag]);
        out.omega_table[lag - 1] = run;
        out.delta_omega_table[lag - 1] = run_d;
        if (!lag_used[lag]) continue;
        double tau = static_cast<double>(lag) * dt;
        out.norm_alpha = std::max(out.norm_alpha, run / std::pow(tau, alpha));
        out.norm_delta_gamma = std::max(out.norm_delta_gamma, run_d / std::pow(tau, gamma));
    }
    return out;
}

}  // namespace ypde
