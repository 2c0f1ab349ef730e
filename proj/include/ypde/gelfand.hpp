#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ypde/inner_product.hpp"
#include "ypde/rng.hpp"

namespace ypde {

/// Constants of the structural conditions on the monotone operator:
/// local monotonicity 2<A(u)-A(v), u-v> <= (h_t + eta(u)) ||u-v||_H^2,
/// coercivity <A(u),u> <= -c1 ||u||_V^alpha + c2 ||u||_H^2 + f_t, and
/// boundedness ||A(u)||_{V*} <= g_t + c3 ||u||_V^{alpha-1}.
struct AssumptionConstants {
    double alpha = 2.0;
    double c1 = 1.0;
    double c2 = 0.0;
    std::function<double(double)> f = [](double) { return 0.0; };
    double c3 = 1.0;
    std::function<double(double)> g = [](double) { return 0.0; };
    std::function<double(double)> h = [](double) { return 0.0; };
    std::function<double(std::span<const double>)> eta = [](std::span<const double>) { return 0.0; };
    bool strictly_monotone = false;
};

/// Pointwise conditions on the porous-medium nonlinearity Psi:
/// monotone, s Psi(s) >= a|s|^p - c, |Psi(s)| <= growth_c4 + growth_c3 |s|^{p-1}.
struct PsiConditions {
    std::function<double(double)> psi;
    double a = 1.0;
    double c = 0.0;
    double growth_c3 = 1.0;
    double growth_c4 = 0.0;
    double p = 3.0;
};

/// Discrete Gelfand triple on the unit interval with Dirichlet boundary:
/// dim interior nodes, spacing dx = 1/(dim+1). Arrays represent V-, H- and
/// V*-vectors alike; the duality functional of an array F is v -> (F, v)_H.
struct GelfandDiscretization {
    std::string name;
    std::size_t dim = 0;
    double dx = 0.0;
    InnerProduct ip{};
    std::function<double(std::span<const double>)> v_norm;
    // computable upper bound for ||A(u)||_{V*}, used by the (H4) audit
    std::function<double(std::span<const double>)> dual_norm_bound;
    std::function<double(std::span<const double>, std::span<const double>)> duality;
    std::function<void(double, std::span<const double>, std::span<double>)> op;
    // tridiagonal dA/du at a state; bands sized dim-1/dim/dim-1
    std::function<void(double, std::span<const double>, std::vector<double>&, std::vector<double>&,
                       std::vector<double>&)>
        jacobian;
    AssumptionConstants constants;
    PsiConditions psi;  // populated for the porous-medium triple only
    bool has_psi = false;
    bool zero_op = false;
};

namespace detail {

inline double signed_power(double x, double expo) {
    if (x == 0.0) return 0.0;
    return (x > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), expo);
}

}  // namespace detail

/// Discrete p-Laplace evolution triple: V = W^{1,p}_0, H = L^2, forward
/// difference gradients, flux form A(u)_i = (Phi(g_i) - Phi(g_{i-1}))/dx with
/// Phi(g) = |g|^{p-2} g. Satisfies (H2') and (H3)/(H4) with c1 = c3 = 1,
/// c2 = 0, f = g = 0 exactly at the discrete level.
inline GelfandDiscretization make_p_laplace(std::size_t dim, double p_exp) {
    if (!(p_exp > 1.0)) throw std::invalid_argument("make_p_laplace: need p > 1");
    GelfandDiscretization t;
    t.name = "p_laplace";
    t.dim = dim;
    t.dx = 1.0 / static_cast<double>(dim + 1);
    t.ip = InnerProduct::lumped_mass(dim, t.dx);
    const double dx = t.dx;

    auto gradients = [dim, dx](std::span<const double> u, std::vector<double>& g) {
        g.resize(dim + 1);
        g[0] = u[0] / dx;
        for (std::size_t i = 1; i < dim; ++i) g[i] = (u[i] - u[i - 1]) / dx;
        g[dim] = -u[dim - 1] / dx;
    };

    t.v_norm = [gradients, p_exp, dx](std::span<const double> u) {
        std::vector<double> g;
        gradients(u, g);
        double s = 0.0;
        for (double gv : g) s += std::pow(std::abs(gv), p_exp);
        return std::pow(dx * s, 1.0 / p_exp);
    };
    // ||A(u)||_{V*} <= ||Phi(grad u)||_{L^{p'}} = ||u||_V^{p-1} via the flux form
    t.dual_norm_bound = [gradients, p_exp, dx](std::span<const double> u) {
        std::vector<double> g;
        gradients(u, g);
        double pp = p_exp / (p_exp - 1.0);
        double s = 0.0;
        for (double gv : g) s += std::pow(std::abs(gv), (p_exp - 1.0) * pp);
        return std::pow(dx * s, 1.0 / pp);
    };
    t.duality = [dx](std::span<const double> F, std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < F.size(); ++i) s += F[i] * v[i];
        return dx * s;
    };
    t.op = [gradients, p_exp, dim, dx](double, std::span<const double> u, std::span<double> out) {
        std::vector<double> g;
        gradients(u, g);
        for (double& gv : g) gv = detail::signed_power(gv, p_exp - 1.0);
        for (std::size_t i = 0; i < dim; ++i) out[i] = (g[i + 1] - g[i]) / dx;
    };
    t.jacobian = [gradients, p_exp, dim, dx](double, std::span<const double> u,
                                             std::vector<double>& lo, std::vector<double>& di,
                                             std::vector<double>& up) {
        std::vector<double> g;
        gradients(u, g);
        std::vector<double> phi(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            double a = std::abs(g[i]);
            if (p_exp < 2.0 && a < 1e-12) a = 1e-12;  // flat gradients: capped slope
            phi[i] = (p_exp - 1.0) * std::pow(a, p_exp - 2.0);
        }
        lo.assign(dim - 1, 0.0);
        di.assign(dim, 0.0);
        up.assign(dim - 1, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            di[i] = -(phi[i] + phi[i + 1]) / (dx * dx);
            if (i + 1 < dim) up[i] = phi[i + 1] / (dx * dx);
            if (i > 0) lo[i - 1] = phi[i] / (dx * dx);
        }
    };
    t.constants.alpha = p_exp;
    t.constants.c1 = 1.0;
    t.constants.c3 = 1.0;
    t.constants.strictly_monotone = true;
    return t;
}

/// Porous-medium triple: V = L^p, H = W^{-1,2} realized through the inverse
/// Dirichlet stiffness, A(u) = discrete Laplacian of Psi(u). The H-pairing
/// turns the duality into <A(u), v> = -(Psi(u), v) dx exactly.
inline GelfandDiscretization make_porous_medium(std::size_t dim, PsiConditions psi) {
    GelfandDiscretization t;
    t.name = "porous_medium";
    t.dim = dim;
    t.dx = 1.0 / static_cast<double>(dim + 1);
    const double dx = t.dx;
    t.ip = InnerProduct::inverse_stiffness(TriDiag::dirichlet_stiffness(dim, dx), dx);
    t.psi = psi;
    t.has_psi = true;

    const double p = psi.p;
    t.v_norm = [p, dx](std::span<const double> u) {
        double s = 0.0;
        for (double v : u) s += std::pow(std::abs(v), p);
        return std::pow(dx * s, 1.0 / p);
    };
    t.dual_norm_bound = [psi, p, dx](std::span<const double> u) {
        double pp = p / (p - 1.0);
        double s = 0.0;
        for (double v : u) s += std::pow(std::abs(psi.psi(v)), pp);
        return std::pow(dx * s, 1.0 / pp);
    };
    // arrays pair through H; Gelfand compatibility is then automatic
    InnerProduct ip_copy = t.ip;
    t.duality = [ip_copy](std::span<const double> F, std::span<const double> v) {
        return ip_copy.dot(F, v);
    };
    t.op = [psi, dim, dx](double, std::span<const double> u, std::span<double> out) {
        std::vector<double> w(dim);
        for (std::size_t i = 0; i < dim; ++i) w[i] = psi.psi(u[i]);
        for (std::size_t i = 0; i < dim; ++i) {
            double left = (i > 0) ? w[i - 1] : 0.0;
            double right = (i + 1 < dim) ? w[i + 1] : 0.0;
            out[i] = (left - 2.0 * w[i] + right) / (dx * dx);
        }
    };
    t.jacobian = [psi, dim, dx](double, std::span<const double> u, std::vector<double>& lo,
                                std::vector<double>& di, std::vector<double>& up) {
        // finite-difference slope of Psi at each state entry
        std::vector<double> dpsi(dim);
        const double eps = 1e-7;
        for (std::size_t i = 0; i < dim; ++i)
            dpsi[i] = (psi.psi(u[i] + eps) - psi.psi(u[i] - eps)) / (2.0 * eps);
        lo.assign(dim - 1, 0.0);
        di.assign(dim, 0.0);
        up.assign(dim - 1, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            di[i] = -2.0 * dpsi[i] / (dx * dx);
            if (i + 1 < dim) up[i] = dpsi[i + 1] / (dx * dx);
            if (i > 0) lo[i - 1] = dpsi[i - 1] / (dx * dx);
        }
    };
    t.constants.alpha = p;
    t.constants.c1 = psi.a;
    t.constants.f = [psi](double) { return psi.c; };  // c |Lambda|, |Lambda| = 1
    t.constants.c3 = psi.growth_c3;
    t.constants.g = [psi](double) { return psi.growth_c4; };
    t.constants.strictly_monotone = true;
    return t;
}

inline PsiConditions power_psi(double m_exp) {
    PsiConditions c;
    c.psi = [m_exp](double s) { return detail::signed_power(s, m_exp); };
    c.a = 1.0;
    c.c = 0.0;
    c.growth_c3 = 1.0;
    c.growth_c4 = 0.0;
    c.p = m_exp + 1.0;
    return c;
}

/// A = 0 on the L^2 triple; solves reduce to pure driver accumulation.
inline GelfandDiscretization make_zero_operator(std::size_t dim) {
    GelfandDiscretization t;
    t.name = "zero";
    t.dim = dim;
    t.dx = 1.0 / static_cast<double>(dim + 1);
    t.ip = InnerProduct::lumped_mass(dim, t.dx);
    const double dx = t.dx;
    t.v_norm = [dx](std::span<const double> u) {
        double s = 0.0;
        for (double v : u) s += v * v;
        return std::sqrt(dx * s);
    };
    t.dual_norm_bound = [](std::span<const double>) { return 0.0; };
    t.duality = [dx](std::span<const double> F, std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < F.size(); ++i) s += F[i] * v[i];
        return dx * s;
    };
    t.op = [](double, std::span<const double>, std::span<double> out) {
        for (double& v : out) v = 0.0;
    };
    t.constants.alpha = 2.0;
    t.constants.c1 = 0.0;  // coercivity audit skipped
    t.constants.strictly_monotone = true;
    t.zero_op = true;
    return t;
}

/// Inequality audit of (H1)-(H4) (and the pointwise Psi conditions when
/// present) on random states. (H1) compares the continuity modulus of
/// lambda -> <A(u + lambda v), w> across two lambda-grid resolutions; the
/// rest are direct inequality checks with the declared constants and 1e-10
/// slack. Violations carry a short witness string.
struct AuditReport {
    int samples = 0;
    int violations_h1 = 0;
    int violations_h2 = 0;
    int violations_h3 = 0;
    int violations_h4 = 0;
    int violations_psi = 0;
    bool coercivity_skipped = false;
    std::vector<std::string> witnesses;

    int total_violations() const {
        return violations_h1 + violations_h2 + violations_h3 + violations_h4 + violations_psi;
    }
    bool pass() const { return total_violations() == 0; }
};

inline AuditReport audit_assumptions(const GelfandDiscretization& triple, int sample_count,
                                     std::uint64_t seed) {
    AuditReport rep;
    rep.samples = sample_count;
    Rng rng(seed);
    const std::size_t d = triple.dim;
    const double slack = 1e-10;

    auto random_state = [&](double amp) {
        std::vector<double> u(d);
        for (double& x : u) x = amp * rng.next_gaussian();
        return u;
    };

    auto witness = [&rep](const std::string& s) {
        if (rep.witnesses.size() < 8) rep.witnesses.push_back(s);
    };

    std::vector<double> Au(d), Av(d), diff(d);
    for (int s = 0; s < sample_count; ++s) {
        double t = 0.5 * (1.0 + std::sin(0.37 * s));
        auto u = random_state(1.0);
        auto v = random_state(1.0);

        // (H2)/(H2'): 2<A(u)-A(v), u-v> <= (h + eta(u)) ||u-v||_H^2
        triple.op(t, u, Au);
        triple.op(t, v, Av);
        for (std::size_t i = 0; i < d; ++i) {
            diff[i] = u[i] - v[i];
            Au[i] -= Av[i];
        }
        double lhs = 2.0 * triple.duality(Au, diff);
        double nd = triple.ip.norm(diff);
        double rhs = (triple.constants.h(t) + triple.constants.eta(u)) * nd * nd;
        double scale2 = 1.0 + std::abs(lhs) + nd * nd;
        if (lhs > rhs + slack * scale2) {
            ++rep.violations_h2;
            witness("(H2) lhs=" + std::to_string(lhs) + " rhs=" + std::to_string(rhs));
        }

        // (H3): <A(u), u> <= -c1 ||u||_V^alpha + c2 ||u||_H^2 + f_t
        triple.op(t, u, Au);
        double coer = triple.duality(Au, u);
        double vn = triple.v_norm(u);
        double hn = triple.ip.norm(u);
        double bound = -triple.constants.c1 * std::pow(vn, triple.constants.alpha) +
                       triple.constants.c2 * hn * hn + triple.constants.f(t);
        double scale3 = 1.0 + std::abs(coer) + std::pow(vn, triple.constants.alpha);
        if (triple.zero_op || triple.constants.c1 == 0.0) {
            rep.coercivity_skipped = true;
        } else if (coer > bound + slack * scale3) {
            ++rep.violations_h3;
            witness("(H3) pairing=" + std::to_string(coer) + " bound=" + std::to_string(bound));
        }

        // (H4): computable dual-norm bound <= g_t + c3 ||u||_V^{alpha-1}
        double dual = triple.dual_norm_bound(u);
        double h4 = triple.constants.g(t) +
                    triple.constants.c3 * std::pow(vn, triple.constants.alpha - 1.0);
        if (dual > h4 + slack * (1.0 + dual)) {
            ++rep.violations_h4;
            witness("(H4) dual=" + std::to_string(dual) + " bound=" + std::to_string(h4));
        }

        // pointwise Psi conditions
        if (triple.has_psi) {
            double x = 2.0 * rng.next_gaussian();
            double y = 2.0 * rng.next_gaussian();
            const auto& c = triple.psi;
            if ((c.psi(x) - c.psi(y)) * (x - y) < -slack) ++rep.violations_psi;
            if (x * c.psi(x) < c.a * std::pow(std::abs(x), c.p) - c.c - slack)
                ++rep.violations_psi;
            if (std::abs(c.psi(x)) > c.growth_c4 + c.growth_c3 * std::pow(std::abs(x), c.p - 1.0) +
                                         slack)
                ++rep.violations_psi;
        }
    }

    // (H1): hemicontinuity via the lambda-grid modulus on a handful of triples
    std::vector<double> Auw(d);
    for (int s = 0; s < std::max(4, sample_count / 25); ++s) {
        auto u = random_state(1.0);
        auto v = random_state(1.0);
        auto w = random_state(1.0);
        auto modulus = [&](int grid_pts) {
            double prev = 0.0, worst = 0.0;
            std::vector<double> uv(d);
            for (int j = 0; j <= grid_pts; ++j) {
                double lam = -1.0 + 2.0 * static_cast<double>(j) / grid_pts;
                for (std::size_t i = 0; i < d; ++i) uv[i] = u[i] + lam * v[i];
                triple.op(0.5, uv, Auw);
                double val = triple.duality(Auw, w);
                if (j > 0) worst = std::max(worst, std::abs(val - prev));
                prev = val;
            }
            return worst;
        };
        double coarse = modulus(16);
        double fine = modulus(32);
        if (fine > 0.8 * coarse + 1e-8 * (1.0 + coarse)) {
            ++rep.violations_h1;
            witness("(H1) modulus coarse=" + std::to_string(coarse) +
                    " fine=" + std::to_string(fine));
        }
    }
    return rep;
}

}  // namespace ypde
