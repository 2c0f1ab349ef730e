#pragma once

#include <functional>
#include <vector>

#include "ypde/besov.hpp"
#include "ypde/path_ops.hpp"
#include "ypde/sewing.hpp"

namespace ypde {

/// Regularity declaration for the pairing (u, dI): u in B^alpha_{p,inf},
/// I in B^beta_{q,inf}. Eligibility requires alpha + beta > 1 v 1/mu with
/// 1/mu = 1/p + 1/q. Declared by the caller; estimated seminorms are
/// reported by diagnostics but never gate (finite samples cannot certify
/// membership).
struct YoungIndices {
    double alpha = 0.5;
    double p = 2.0;
    double beta = 0.75;
    double q = 4.0;

    double mu() const {
        double inv = (p == kInfExponent ? 0.0 : 1.0 / p) + (q == kInfExponent ? 0.0 : 1.0 / q);
        return inv > 0.0 ? 1.0 / inv : kInfExponent;
    }

    bool eligible() const {
        double m = mu();
        double bar = std::max(1.0, m == kInfExponent ? 0.0 : 1.0 / m);
        return alpha + beta > bar;
    }
};

/// Young pairing S_t(u, dI) = int_0^t (u_s, dI_s)_H: the sewing of the germ
/// (u_s, I_t - I_s)_H. Starts at zero, bilinear in (u, I).
inline SampledPath young_pairing(const SampledPath& u, const SampledPath& I,
                                 const InnerProduct& ip, YoungIndices idx = {},
                                 int max_level = 14, double tol = -1.0) {
    if (!u.grid().same_as(I.grid())) throw std::invalid_argument("young_pairing: grid mismatch");
    if (u.dim() != I.dim() || ip.dim() != u.dim())
        throw std::invalid_argument("young_pairing: dimension mismatch");
    if (!idx.eligible())
        throw std::invalid_argument("young_pairing: indices outside Young-eligibility");

    const std::size_t d = u.dim();
    Germ germ;
    germ.dim = 1;
    germ.declared_alpha = idx.beta;
    germ.declared_gamma = idx.alpha + idx.beta;
    std::vector<double> us(d), is(d), it(d);
    germ.eval = [&u, &I, &ip, us, is, it](double s, double t, std::span<double> out) mutable {
        u.value_at(s, us);
        I.value_at(s, is);
        I.value_at(t, it);
        for (std::size_t i = 0; i < us.size(); ++i) it[i] -= is[i];
        out[0] = ip.dot(us, it);
    };
    return sew(germ, u.grid(), max_level, tol).sewn;
}

/// Pointwise map on H-vectors with declared linear-growth and Lipschitz
/// constants, ||sigma(u)|| <= C(1+||u||), ||sigma(u)-sigma(v)|| <= L||u-v||.
struct NemytskiiMap {
    std::function<void(std::span<const double>, std::span<double>)> map;
    double growth = 1.0;
    double lipschitz = 1.0;

    static NemytskiiMap scalar(std::function<double(double)> f, double growth_c, double lip_l) {
        NemytskiiMap m;
        m.map = [f = std::move(f)](std::span<const double> in, std::span<double> out) {
            for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
        };
        m.growth = growth_c;
        m.lipschitz = lip_l;
        return m;
    }

    static NemytskiiMap identity() {
        return scalar([](double x) { return x; }, 1.0, 1.0);
    }
};

/// Bilinear product H x E -> H with ||h.e||_H <= C ||h||_H ||e||_E.
struct MultiplierProduct {
    std::size_t e_dim = 1;
    double bound = 1.0;
    std::function<void(std::span<const double> h, std::span<const double> e, std::span<double> out)>
        apply;

    /// E = R, scalar scaling.
    static MultiplierProduct scalar() {
        MultiplierProduct p;
        p.e_dim = 1;
        p.bound = 1.0;
        p.apply = [](std::span<const double> h, std::span<const double> e, std::span<double> out) {
            for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] * e[0];
        };
        return p;
    }

    /// H = L^2 over nodes, E = bounded functions over the same nodes.
    static MultiplierProduct pointwise(std::size_t d) {
        MultiplierProduct p;
        p.e_dim = d;
        p.bound = 1.0;
        p.apply = [](std::span<const double> h, std::span<const double> e, std::span<double> out) {
            for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] * e[i];
        };
        return p;
    }
};

/// Abstract Young integral I(u)_t = int_0^t sigma(u_s) dX_s, built by sewing
/// the averaged germ <sigma(u)>_{s,t} . (X_t - X_s). Requires gamma + 1/q > 1.
inline SampledPath abstract_young(const NemytskiiMap& sigma, const SampledPath& u,
                                  const SampledPath& X, const MultiplierProduct& prod, double q,
                                  double gamma, int max_level = 14, double tol = -1.0) {
    if (!u.grid().same_as(X.grid())) throw std::invalid_argument("abstract_young: grid mismatch");
    if (X.dim() != prod.e_dim) throw std::invalid_argument("abstract_young: multiplier dimension mismatch");
    double qinv = (q == kInfExponent) ? 0.0 : 1.0 / q;
    if (!(gamma + qinv > 1.0))
        throw std::invalid_argument("abstract_young: outside Young-eligibility");

    const std::size_t d = u.dim();
    // apply sigma at the nodes once, average its interpolant afterwards
    std::vector<double> su((u.grid().n + 1) * d);
    for (std::size_t k = 0; k <= u.grid().n; ++k)
        sigma.map(u.at(k), {su.data() + k * d, d});
    PathAverager averager(u.grid(), std::move(su), d);

    Germ germ;
    germ.dim = d;
    germ.declared_alpha = gamma;
    germ.declared_gamma = gamma + qinv;
    std::vector<double> mean(d), xs(X.dim()), xt(X.dim());
    germ.eval = [&averager, &X, &prod, mean, xs, xt](double s, double t,
                                                     std::span<double> out) mutable {
        averager.average(s, t, mean);
        X.value_at(s, xs);
        X.value_at(t, xt);
        for (std::size_t i = 0; i < xt.size(); ++i) xt[i] -= xs[i];
        prod.apply(mean, xt, out);
    };
    return sew(germ, u.grid(), max_level, tol).sewn;
}

namespace detail {

/// Centered differences inside, one-sided at the endpoints.
inline SampledPath differentiate(const SampledPath& I) {
    const std::size_t n = I.grid().n;
    const std::size_t d = I.dim();
    const double dt = I.grid().dt();
    SampledPath out(I.grid(), d);
    for (std::size_t i = 0; i < d; ++i) {
        out.at(0)[i] = (I.at(1)[i] - I.at(0)[i]) / dt;
        out.at(n)[i] = (I.at(n)[i] - I.at(n - 1)[i]) / dt;
    }
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = 0; i < d; ++i)
            out.at(k)[i] = (I.at(k + 1)[i] - I.at(k - 1)[i]) / (2.0 * dt);
    return out;
}

inline std::vector<double> cumulative_trapezoid(std::span<const double> g, double dt) {
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t k = 1; k < g.size(); ++k) out[k] = out[k - 1] + 0.5 * dt * (g[k - 1] + g[k]);
    return out;
}

}  // namespace detail

/// Consistency of the Young pairing with the Bochner integral for a
/// piecewise-C^1 integrator: max_t |S_t(u,dI) - int_0^t (u, dI/ds) ds|.
struct BochnerGapReport {
    double max_gap;
    SampledPath young;      // S(u, dI)
    SampledPath quadrature;  // cumulative trapezoid of (u, dI/dt)_H
};

inline BochnerGapReport bochner_identify(const SampledPath& u, const SampledPath& I,
                                         const InnerProduct& ip, YoungIndices idx = {}) {
    SampledPath young = young_pairing(u, I, ip, idx);
    SampledPath dI = detail::differentiate(I);
    std::vector<double> g(u.num_nodes());
    for (std::size_t k = 0; k < u.num_nodes(); ++k) g[k] = ip.dot(u.at(k), dI.at(k));
    auto q = detail::cumulative_trapezoid(g, u.grid().dt());
    SampledPath quad(u.grid(), 1, std::move(q));
    double gap = 0.0;
    for (std::size_t k = 0; k < u.num_nodes(); ++k)
        gap = std::max(gap, std::abs(young.scalar(k) - quad.scalar(k)));
    return {gap, std::move(young), std::move(quad)};
}

/// Residual of the squared-norm identity for X_t = X_0 + int_0^t Y ds + I_t:
///   r_t = ||X_t||_H^2 - ||X_0||_H^2 - 2 int_0^t <Y_s, X_s> ds - 2 S_t(X, dI).
/// The duality pairing is supplied by the caller (it differs from (.,.)_H
/// when Y only lives in V*).
inline SampledPath energy_identity_residual(
    std::span<const double> X0, const SampledPath& Y, const SampledPath& I, const SampledPath& X,
    const std::function<double(std::span<const double>, std::span<const double>)>& pairing,
    const InnerProduct& ip, YoungIndices idx = {}) {
    if (!X.grid().same_as(Y.grid()) || !X.grid().same_as(I.grid()))
        throw std::invalid_argument("energy_identity_residual: grid mismatch");
    SampledPath young = young_pairing(X, I, ip, idx);
    std::vector<double> g(X.num_nodes());
    for (std::size_t k = 0; k < X.num_nodes(); ++k) g[k] = pairing(Y.at(k), X.at(k));
    auto quad = detail::cumulative_trapezoid(g, X.grid().dt());
    double e0 = ip.dot(X0, X0);
    SampledPath res(X.grid(), 1);
    for (std::size_t k = 0; k < X.num_nodes(); ++k) {
        double ek = ip.dot(X.at(k), X.at(k));
        res.scalar(k) = ek - e0 - 2.0 * quad[k] - 2.0 * young.scalar(k);
    }
    return res;
}

/// Scalar transformation F(t,y) with its two partial derivatives. The local
/// bounds required by the chain rule are the caller's responsibility; the
/// residual evaluator checks them only along the realized solution range.
struct ScalarField {
    std::function<double(double, double)> value;
    std::function<double(double, double)> dt;
    std::function<double(double, double)> dy;
};

/// Chain-rule residual for y_t = y_0 + int_0^t b ds + S_t(u, dI):
///   r_t = F(t,y_t) - F(0,y_0) - int dtF(s,y_s) ds - int dyF(s,y_s) b_s ds
///         - S_t(dyF(y) u, dI).
inline SampledPath chain_rule_residual(const ScalarField& F, double y0, const SampledPath& b,
                                       const SampledPath& u, const SampledPath& I,
                                       const InnerProduct& ip, YoungIndices idx = {}) {
    if (!u.grid().same_as(I.grid()) || !u.grid().same_as(b.grid()))
        throw std::invalid_argument("chain_rule_residual: grid mismatch");
    if (b.dim() != 1) throw std::invalid_argument("chain_rule_residual: b must be scalar");
    double qinv = (idx.q == kInfExponent) ? 0.0 : 1.0 / idx.q;
    if (!(idx.q > 2.0) || !(idx.beta > 0.5 + qinv))
        throw std::invalid_argument("chain_rule_residual: need q > 2 and gamma > 1/2 + 1/q");

    const std::size_t n = u.grid().n;
    const double dt = u.grid().dt();
    SampledPath young = young_pairing(u, I, ip, idx);

    std::vector<double> y(n + 1);
    {
        std::vector<double> bb(n + 1);
        for (std::size_t k = 0; k <= n; ++k) bb[k] = b.scalar(k);
        auto ib = detail::cumulative_trapezoid(bb, dt);
        for (std::size_t k = 0; k <= n; ++k) y[k] = y0 + ib[k] + young.scalar(k);
    }

    std::vector<double> gt(n + 1), gb(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        double t = u.grid().node(k);
        gt[k] = F.dt(t, y[k]);
        gb[k] = F.dy(t, y[k]) * b.scalar(k);
    }
    auto it = detail::cumulative_trapezoid(gt, dt);
    auto ib2 = detail::cumulative_trapezoid(gb, dt);

    SampledPath weighted(u.grid(), u.dim());
    for (std::size_t k = 0; k <= n; ++k) {
        double w = F.dy(u.grid().node(k), y[k]);
        auto src = u.at(k);
        auto dst = weighted.at(k);
        for (std::size_t i = 0; i < u.dim(); ++i) dst[i] = w * src[i];
    }
    SampledPath young_w = young_pairing(weighted, I, ip, idx);

    SampledPath res(u.grid(), 1);
    double f0 = F.value(u.grid().t0, y0);
    for (std::size_t k = 0; k <= n; ++k)
        res.scalar(k) =
            F.value(u.grid().node(k), y[k]) - f0 - it[k] - ib2[k] - young_w.scalar(k);
    return res;
}

/// Weighted-pairing stability audit: realized constant of
///   sup_t int_0^t e^{lambda(t-s)} (dI/ds, u_s)_H ds
///     <= C (||u||_inf + [u]_{B^{1/2}_{2,inf}}) [I]_{B^gamma_{q,inf}}.
struct WeightedPairingReport {
    double lhs_sup;
    double rhs;
    double realized_constant;
    std::vector<double> trace;  // running weighted integral per node
};

inline WeightedPairingReport weighted_pairing_bound(const SampledPath& u, const SampledPath& I,
                                                    const InnerProduct& ip, double lambda, double q,
                                                    double gamma) {
    if (!u.grid().same_as(I.grid()))
        throw std::invalid_argument("weighted_pairing_bound: grid mismatch");
    if (lambda < 0.0) throw std::invalid_argument("weighted_pairing_bound: lambda must be >= 0");
    const std::size_t n = u.grid().n;
    const double dt = u.grid().dt();
    SampledPath dI = detail::differentiate(I);
    std::vector<double> g(n + 1);
    for (std::size_t k = 0; k <= n; ++k) g[k] = ip.dot(dI.at(k), u.at(k));

    WeightedPairingReport rep{};
    rep.trace.assign(n + 1, 0.0);
    const double decay = std::exp(lambda * dt);
    for (std::size_t k = 1; k <= n; ++k)
        rep.trace[k] = decay * rep.trace[k - 1] + 0.5 * dt * (decay * g[k - 1] + g[k]);
    rep.lhs_sup = 0.0;
    for (double v : rep.trace) rep.lhs_sup = std::max(rep.lhs_sup, v);

    double unorm = sup_norm(u, ip) + besov_seminorm(u, BesovIndex(0.5, 2.0), ip);
    double inorm = besov_seminorm(I, BesovIndex(gamma, q), ip);
    rep.rhs = unorm * inorm;
    rep.realized_constant = rep.rhs > 1e-300 ? rep.lhs_sup / rep.rhs : 0.0;
    return rep;
}

}  // namespace ypde
