#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ypde/inner_product.hpp"
#include "ypde/time_grid.hpp"

namespace ypde {

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// (alpha, p, q) descriptor of B^alpha_{p,q}. Estimators work on the
/// Nikolskii scale, so q is pinned to infinity.
struct BesovIndex {
    double alpha;
    double p;
    double q = kInfExponent;

    BesovIndex(double alpha_, double p_, double q_ = kInfExponent) : alpha(alpha_), p(p_), q(q_) {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw std::invalid_argument("BesovIndex: alpha must lie in (0,1]");
        if (!(p >= 1.0)) throw std::invalid_argument("BesovIndex: p must be >= 1");
        if (q != kInfExponent)
            throw std::invalid_argument("BesovIndex: estimators support q = infinity only");
    }
};

namespace detail {

/// Gram-transformed copy of a path: increment H-norms become plain dots.
inline SampledPath gram_path(const SampledPath& u, const InnerProduct& ip) {
    SampledPath y(u.grid(), u.dim());
    for (std::size_t k = 0; k < u.num_nodes(); ++k) ip.gram(u.at(k), y.at(k));
    return y;
}

inline double increment_norm(const SampledPath& u, const SampledPath& y, std::size_t a,
                             std::size_t b) {
    auto ua = u.at(a), ub = u.at(b);
    auto ya = y.at(a), yb = y.at(b);
    double s = 0.0;
    for (std::size_t i = 0; i < ua.size(); ++i) s += (ub[i] - ua[i]) * (yb[i] - ya[i]);
    return std::sqrt(std::max(0.0, s));
}

/// p-mean of increment norms at a fixed lag, left-endpoint Riemann sum in t
/// over node range [k0, k1]. Lag is given in nodes.
inline double lag_mean(const SampledPath& u, const SampledPath& y, std::size_t k0, std::size_t k1,
                       std::size_t lag, double p, double dt) {
    if (p == kInfExponent) {
        double m = 0.0;
        for (std::size_t j = k0; j + lag <= k1; ++j)
            m = std::max(m, increment_norm(u, y, j, j + lag));
        return m;
    }
    double s = 0.0;
    for (std::size_t j = k0; j + lag < k1; ++j) {
        double v = increment_norm(u, y, j, j + lag);
        s += std::pow(v, p);
    }
    return std::pow(dt * s, 1.0 / p);
}

}  // namespace detail

/// Discrete Nikolskii seminorm on the node window [k0, k1]:
///   sup_{h = k*dt} h^{-alpha} (dt * sum_t ||u_{t+h} - u_t||_H^p)^{1/p},
/// with the t-sum a left-endpoint Riemann sum over [t_{k0}, t_{k1} - h].
/// p = infinity replaces the mean by a max over t.
inline double besov_seminorm_window(const SampledPath& u, const BesovIndex& idx,
                                    const InnerProduct& ip, std::size_t k0, std::size_t k1) {
    if (ip.dim() != u.dim()) throw std::invalid_argument("besov_seminorm: dimension mismatch");
    if (k1 <= k0 || k1 >= u.num_nodes())
        throw std::invalid_argument("besov_seminorm: bad node window");
    if (k1 - k0 < 1) throw std::invalid_argument("besov_seminorm: seminorm undefined");
    const double dt = u.grid().dt();
    SampledPath y = detail::gram_path(u, ip);
    double best = 0.0;
    for (std::size_t lag = 1; lag <= k1 - k0; ++lag) {
        double h = static_cast<double>(lag) * dt;
        double m = detail::lag_mean(u, y, k0, k1, lag, idx.p, dt);
        best = std::max(best, m / std::pow(h, idx.alpha));
    }
    return best;
}

inline double besov_seminorm(const SampledPath& u, const BesovIndex& idx, const InnerProduct& ip) {
    if (u.grid().n == 0) throw std::invalid_argument("besov_seminorm: seminorm undefined");
    return besov_seminorm_window(u, idx, ip, 0, u.grid().n);
}

/// Same estimator but the sup runs over dyadic lags only (h = 2^j dt). Cheap
/// enough for per-level convergence diagnostics inside the sewing loop; it
/// under-estimates the all-lag sup by at most 2^alpha.
inline double besov_seminorm_dyadic(const SampledPath& u, double alpha, double p,
                                    const InnerProduct& ip) {
    if (u.grid().n == 0) throw std::invalid_argument("besov_seminorm: seminorm undefined");
    const double dt = u.grid().dt();
    const std::size_t n = u.grid().n;
    SampledPath y = detail::gram_path(u, ip);
    double best = 0.0;
    for (std::size_t lag = 1; lag <= n; lag *= 2) {
        double h = static_cast<double>(lag) * dt;
        double m = detail::lag_mean(u, y, 0, n, lag, p, dt);
        best = std::max(best, m / std::pow(h, alpha));
    }
    return best;
}

/// C^alpha estimator: sup over all grid pairs of ||u_t - u_s||_H / |t-s|^alpha.
inline double holder_seminorm(const SampledPath& u, double alpha, const InnerProduct& ip) {
    if (ip.dim() != u.dim()) throw std::invalid_argument("holder_seminorm: dimension mismatch");
    if (u.grid().n == 0) throw std::invalid_argument("holder_seminorm: seminorm undefined");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("holder_seminorm: alpha must lie in (0,1]");
    const double dt = u.grid().dt();
    const std::size_t n = u.grid().n;
    SampledPath y = detail::gram_path(u, ip);
    double best = 0.0;
    for (std::size_t lag = 1; lag <= n; ++lag) {
        double denom = std::pow(static_cast<double>(lag) * dt, alpha);
        for (std::size_t j = 0; j + lag <= n; ++j)
            best = std::max(best, detail::increment_norm(u, y, j, j + lag) / denom);
    }
    return best;
}

inline double sup_norm(const SampledPath& u, const InnerProduct& ip) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.num_nodes(); ++k) m = std::max(m, ip.norm(u.at(k)));
    return m;
}

inline double sup_norm_window(const SampledPath& u, const InnerProduct& ip, std::size_t k0,
                              std::size_t k1) {
    double m = 0.0;
    for (std::size_t k = k0; k <= k1; ++k) m = std::max(m, ip.norm(u.at(k)));
    return m;
}

/// L^2-in-time H-norm by the trapezoid rule.
inline double l2_norm(const SampledPath& u, const InnerProduct& ip) {
    const double dt = u.grid().dt();
    double s = 0.0;
    for (std::size_t k = 0; k <= u.grid().n; ++k) {
        double w = (k == 0 || k == u.grid().n) ? 0.5 : 1.0;
        double nk = ip.norm(u.at(k));
        s += w * nk * nk;
    }
    return std::sqrt(dt * s);
}

/// Gluing bound for the B^{1/2}_{2,infty} seminorm on a partitioned interval:
///   sqrt( sum_k sub_k^2 + Linf^2 * 2 (N - 1 + |J| / h_min) ).
/// The global seminorm of the glued path never exceeds it.
inline double nikolskii_glue_bound(std::span<const double> sub_seminorms, double linf_norm,
                                   std::size_t N, double h_min, double interval_len) {
    if (N < 1) throw std::invalid_argument("nikolskii_glue_bound: N must be >= 1");
    if (!(h_min > 0.0)) throw std::invalid_argument("nikolskii_glue_bound: h_min must be positive");
    double s = 0.0;
    for (double x : sub_seminorms) s += x * x;
    s += linf_norm * linf_norm * 2.0 * (static_cast<double>(N - 1) + interval_len / h_min);
    return std::sqrt(s);
}

/// Constant of the shift bound
///   sup_s (int_J ||u_t - u_s||^q dt)^{1/q} <= C_{gamma,q} |J|^gamma [u]_{B^gamma_{q,infty}},
/// valid for gamma > 1/q.
inline double shift_bound_constant(double gamma, double q) {
    double r = gamma - 1.0 / q;
    if (!(r > 0.0)) throw std::invalid_argument("shift_bound_constant: need gamma > 1/q");
    return std::pow(3.0, 2.0 - r) / r;
}

/// Discrete left-hand side of the shift bound on the full grid.
inline double shift_bound_lhs(const SampledPath& u, double q, const InnerProduct& ip) {
    const double dt = u.grid().dt();
    const std::size_t n = u.grid().n;
    SampledPath y = detail::gram_path(u, ip);
    double best = 0.0;
    for (std::size_t s = 0; s <= n; ++s) {
        double acc = 0.0;
        for (std::size_t t = 0; t <= n; ++t)
            acc += std::pow(detail::increment_norm(u, y, s, t), q);
        best = std::max(best, std::pow(dt * acc, 1.0 / q));
    }
    return best;
}

}  // namespace ypde
