#include <doctest.h>

#include <cmath>

#include "ypde/fbm.hpp"
#include "ypde/path_ops.hpp"
#include "ypde/sewing.hpp"

using namespace ypde;

namespace {

SampledPath sample_function(const TimeGrid& g, double (*f)(double)) {
    SampledPath p(g, 1);
    for (std::size_t k = 0; k <= g.n; ++k) p.scalar(k) = f(g.node(k));
    return p;
}

// fine left-point Riemann sum of int_0^t w(s) ds
double left_riemann(double (*w)(double), double t, std::size_t n) {
    double dt = t / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += w(static_cast<double>(k) * dt);
    return acc * dt;
}

}  // namespace

TEST_CASE("germ_norms: additive germ has vanishing delta norm") {
    TimeGrid g(0.0, 1.0, 64);
    auto f = sample_function(g, [](double t) { return std::sin(3.0 * t) + t; });
    Germ a = additive_germ(f);
    GermNorms norms = germ_norms(a, g, 2.0, 0.5, 2.0);
    CHECK(norms.norm_delta_gamma == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(norms.norm_alpha > 0.0);
    for (std::size_t i = 1; i < norms.omega_table.size(); ++i)
        CHECK(norms.omega_table[i] >= norms.omega_table[i - 1]);  // Omega monotone in tau
}

TEST_CASE("germ_norms: increment germ (t-s) has unit B^1_{inf,inf} norm") {
    TimeGrid g(0.0, 1.0, 32);
    Germ a;
    a.dim = 1;
    a.declared_gamma = 2.0;
    a.eval = [](double s, double t, std::span<double> out) { out[0] = t - s; };
    GermNorms norms = germ_norms(a, g, kInfExponent, 1.0, 2.0);
    CHECK(norms.norm_alpha == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("germ_norms: smooth product germ delta norm vs direct triple max") {
    TimeGrid g(0.0, 1.0, 64);
    auto uf = [](double t) { return std::sin(2.0 * t); };
    auto ff = [](double t) { return std::cos(3.0 * t); };
    Germ a = product_germ(uf, ff, 1.0, 2.0);
    GermNorms norms = germ_norms(a, g, kInfExponent, 1.0, 2.0);
    CHECK(norms.norm_delta_gamma > 0.0);
    CHECK(std::isfinite(norms.norm_delta_gamma));

    // oracle: max over all grid triples of |deltaA| / (t-s)^2
    double direct = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = i + 1; j < g.n; ++j)
            for (std::size_t k = j + 1; k <= g.n; ++k) {
                double s = g.node(i), u = g.node(j), t = g.node(k);
                double dA = uf(s) * (ff(t) - ff(s)) - uf(s) * (ff(u) - ff(s)) - uf(u) * (ff(t) - ff(u));
                direct = std::max(direct, std::abs(dA) / ((t - s) * (t - s)));
            }
    CHECK(norms.norm_delta_gamma <= direct * 1.0000001);  // theta-sampled sup cannot exceed it
    CHECK(norms.norm_delta_gamma >= 0.5 * direct);        // and catches it within factor 2
}

TEST_CASE("germ_norms: Omega-bar(deltaA, tau) <= 3^{1 v 1/p} Omega(A, tau) per lag") {
    TimeGrid g(0.0, 1.0, 32);
    auto u = generate_fbm(3, 0.75, g);
    auto f = generate_fbm(4, 0.75, g);
    Germ a = sampled_product_germ(u, f, 0.75, 1.5);
    for (double p : {1.0, 2.0, kInfExponent}) {
        GermNorms n2 = germ_norms(a, g, p, 0.5, 1.5);
        // small slack: the theta split lands off the node-lag Omega sampling
        for (std::size_t lag = 0; lag < n2.omega_table.size(); ++lag)
            CHECK(n2.delta_omega_table[lag] <= 3.0 * n2.omega_table[lag] * 1.05 + 1e-12);
    }
}

TEST_CASE("sew: additive germ reproduces the path exactly at level 0") {
    TimeGrid g(0.0, 1.0, 64);
    auto f = sample_function(g, [](double t) { return std::exp(t) * std::sin(5.0 * t); });
    Germ a = additive_germ(f);
    SewingResult r = sew(a, g);
    CHECK(r.converged);
    for (std::size_t k = 0; k <= g.n; ++k)
        CHECK(r.sewn.scalar(k) == doctest::Approx(f.scalar(k) - f.scalar(0)).epsilon(1e-13));
}

TEST_CASE("sew: Riemann germ s*(t-s) integrates s ds") {
    TimeGrid g(0.0, 1.0, 1024);
    Germ a;
    a.dim = 1;
    a.declared_alpha = 1.0;
    a.declared_gamma = 2.0;
    a.eval = [](double s, double t, std::span<double> out) { out[0] = s * (t - s); };
    SewingResult r = sew(a, g);
    double oracle = left_riemann([](double s) { return s; }, 1.0, 1 << 20);
    CHECK(std::abs(r.sewn.scalar(g.n) - oracle) <= 1e-6);
}

TEST_CASE("sew: quadratic germ annihilates") {
    TimeGrid g(0.0, 1.0, 256);
    Germ a;
    a.dim = 1;
    a.declared_alpha = 1.0;
    a.declared_gamma = 2.0;
    a.eval = [](double s, double t, std::span<double> out) { out[0] = (t - s) * (t - s); };
    SewingResult r = sew(a, g);
    double m = 0.0;
    for (double v : r.sewn.raw()) m = std::max(m, std::abs(v));
    CHECK(m <= 1e-12);
}

TEST_CASE("sew: zero germ sews to zero exactly") {
    TimeGrid g(0.0, 1.0, 32);
    Germ a;
    a.dim = 2;
    a.declared_gamma = 2.0;
    a.eval = [](double, double, std::span<double> out) { out[0] = out[1] = 0.0; };
    SewingResult r = sew(a, g);
    for (double v : r.sewn.raw()) CHECK(v == 0.0);
}

TEST_CASE("sew: validation errors") {
    TimeGrid g(0.0, 1.0, 100);  // not a power of two
    Germ a;
    a.dim = 1;
    a.declared_gamma = 2.0;
    a.eval = [](double s, double t, std::span<double> out) { out[0] = t - s; };
    CHECK_THROWS(sew(a, g));
    TimeGrid g2(0.0, 1.0, 64);
    a.declared_gamma = 0.9;
    CHECK_THROWS(sew(a, g2));
}

TEST_CASE("sew: linearity") {
    TimeGrid g(0.0, 1.0, 128);
    auto u = generate_fbm(5, 0.9, g);
    auto f = generate_fbm(6, 0.9, g);
    auto v = generate_fbm(7, 0.9, g);
    Germ A = sampled_product_germ(u, f, 0.75, 1.6);
    Germ B = sampled_product_germ(v, f, 0.75, 1.6);
    Germ C = linear_combination(2.0, A, -3.0, B);
    auto ra = sew(A, g), rb = sew(B, g), rc = sew(C, g);
    for (std::size_t k = 0; k <= g.n; ++k)
        CHECK(rc.sewn.scalar(k) ==
              doctest::Approx(2.0 * ra.sewn.scalar(k) - 3.0 * rb.sewn.scalar(k)).epsilon(1e-9));
}

TEST_CASE("sew: increment consistency on dyadic subintervals") {
    TimeGrid g(0.0, 1.0, 256);
    Germ a;
    a.dim = 1;
    a.declared_alpha = 1.0;
    a.declared_gamma = 2.0;
    a.eval = [](double s, double t, std::span<double> out) {
        out[0] = std::sin(s) * (std::cos(t) - std::cos(s));
    };
    SewingResult whole = sew(a, g);
    TimeGrid sub(0.25, 0.75, 128);
    SewingResult part = sew(a, sub);
    double diff = (whole.sewn.scalar(192) - whole.sewn.scalar(64)) - part.sewn.scalar(sub.n);
    CHECK(std::abs(diff) <= 1e-9 + whole.cauchy_gap + part.cauchy_gap);
}

TEST_CASE("sew: left-point partition sums converge at first order") {
    TimeGrid g(0.0, 1.0, 256);
    Germ a;
    a.dim = 1;
    a.declared_alpha = 1.0;
    a.declared_gamma = 2.0;
    a.eval = [](double s, double t, std::span<double> out) {
        out[0] = std::exp(s) * (std::sin(t) - std::sin(s));
    };
    SewingResult r = sew(a, g);
    double limit = r.sewn.scalar(g.n);
    std::vector<double> errs;
    std::vector<double> val(1);
    for (std::size_t m : {8, 16, 32, 64, 128}) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            a.eval(static_cast<double>(j) / static_cast<double>(m),
                   static_cast<double>(j + 1) / static_cast<double>(m), val);
            acc += val[0];
        }
        errs.push_back(std::abs(acc - limit));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        double slope = std::log2(errs[i - 1] / errs[i]);
        CHECK(slope >= 0.9);
    }
}

TEST_CASE("remainder_norm: additive germ has zero remainder") {
    TimeGrid g(0.0, 1.0, 64);
    auto f = sample_function(g, [](double t) { return std::cos(4.0 * t); });
    Germ a = additive_germ(f);
    SewingResult r = sew(a, g);
    RemainderReport rep = remainder_norm(a, r, 2.0, 1.5);
    CHECK(rep.remainder_norm <= 1e-10);
}

TEST_CASE("remainder_norm: smooth product germ, remainder <= 10 * delta norm") {
    TimeGrid g(0.0, 1.0, 256);
    Germ a = product_germ([](double t) { return std::sin(2.0 * t); },
                          [](double t) { return std::cos(3.0 * t); }, 1.0, 2.0);
    SewingResult r = sew(a, g);
    RemainderReport rep = remainder_norm(a, r, 2.0, 2.0);
    CHECK(rep.remainder_norm > 0.0);
    CHECK(rep.ratio <= 10.0);
}

TEST_CASE("remainder_norm: pure (t-s)^1.5 germ sews to zero, remainder equals its own norm") {
    TimeGrid g(0.0, 1.0, 128);
    Germ a;
    a.dim = 1;
    a.declared_alpha = 1.0;
    a.declared_gamma = 1.5;
    a.eval = [](double s, double t, std::span<double> out) { out[0] = std::pow(t - s, 1.5); };
    SewingResult r = sew(a, g, 18);
    double m = 0.0;
    for (double v : r.sewn.raw()) m = std::max(m, std::abs(v));
    CHECK(m <= 1e-8);
    RemainderReport rep = remainder_norm(a, r, kInfExponent, 1.5);
    // closed form: ||A||_{B^{1.5}_{inf,inf}} = sup_h h^{-1.5} h^{1.5} = 1
    CHECK(rep.remainder_norm == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sewing_convergence: identical sequence is the exact regime") {
    TimeGrid g(0.0, 1.0, 64);
    auto u = generate_fbm(8, 0.9, g);
    auto f = generate_fbm(9, 0.9, g);
    std::vector<Germ> seq;
    for (int i = 0; i < 4; ++i) seq.push_back(sampled_product_germ(u, f, 0.75, 1.6));
    Germ lim = sampled_product_germ(u, f, 0.75, 1.6);
    auto rep = sewing_convergence(seq, lim, g, 2.0, 0.75, 2.0, 1.6);
    CHECK(rep.exact_regime);
}

TEST_CASE("sewing_convergence: mollified integrator family") {
    TimeGrid g(0.0, 1.0, 256);
    auto u = sample_function(g, [](double t) { return std::sin(2.0 * t) + 1.5; });
    auto f = generate_fbm(10, 0.9, g);
    std::vector<SampledPath> mollified;
    for (unsigned level = 3; level <= 8; ++level) mollified.push_back(mollify_path(f, level));
    std::vector<Germ> seq;
    for (auto& fm : mollified) seq.push_back(sampled_product_germ(u, fm, 0.75, 2.0));
    Germ lim = sampled_product_germ(u, f, 0.75, 2.0);
    auto rep = sewing_convergence(seq, lim, g, 2.0, 0.75, 2.0, 2.0);
    REQUIRE(!rep.exact_regime);
    for (std::size_t i = 1; i < rep.sewn_gap.size(); ++i)
        CHECK(rep.sewn_gap[i] <= rep.sewn_gap[i - 1] * 1.05);
    CHECK(rep.predicted_exponent == doctest::Approx((2.0 - 1.0) / (2.0 - 0.75)));
    MESSAGE("fitted slope: ", rep.fitted_slope);
    CHECK(rep.fitted_slope >= 0.6);
    CHECK(rep.fitted_slope <= 1.1);
}

TEST_CASE("germ_equivalence: left-point vs averaged Young germ") {
    TimeGrid g(0.0, 1.0, 4096);
    auto u = sample_function(g, [](double t) { return std::sin(3.0 * t) + 0.5 * t; });
    auto f = generate_fbm(11, 0.8, g);
    Germ left = sampled_product_germ(u, f, 0.75, 1.55);
    PathAverager avg(u);
    Germ averaged;
    averaged.dim = 1;
    averaged.declared_alpha = 0.75;
    averaged.declared_gamma = 1.55;
    averaged.eval = [&](double s, double t, std::span<double> out) {
        double m;
        avg.average(s, t, {&m, 1});
        out[0] = m * (f.scalar_at(t) - f.scalar_at(s));
    };
    auto rep = germ_equivalence(left, averaged, 1.55, 2.0, g, 1e-6);
    CHECK(rep.equivalent);
    CHECK(rep.max_pointwise_gap <= 1e-6);
}

TEST_CASE("germ_equivalence: trivial and quadratic-shift cases") {
    TimeGrid g(0.0, 1.0, 128);
    Germ a = product_germ([](double t) { return std::cos(t); }, [](double t) { return t * t; },
                          1.0, 2.0);
    SUBCASE("A' = A") {
        Germ b = product_germ([](double t) { return std::cos(t); },
                              [](double t) { return t * t; }, 1.0, 2.0);
        auto rep = germ_equivalence(a, b, 2.0, 2.0, g);
        CHECK(rep.equivalent);
        CHECK(rep.max_pointwise_gap == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("A' = A + (t-s)^2") {
        Germ q;
        q.dim = 1;
        q.declared_alpha = 1.0;
        q.declared_gamma = 2.0;
        q.eval = [](double s, double t, std::span<double> out) { out[0] = (t - s) * (t - s); };
        Germ b = linear_combination(1.0, a, 1.0, q);
        auto rep = germ_equivalence(a, b, 2.0, 2.0, g);
        CHECK(rep.max_pointwise_gap <= 1e-10);
    }
    SUBCASE("beta <= 1 rejected") { CHECK_THROWS(germ_equivalence(a, a, 1.0, 2.0, g)); }
}
