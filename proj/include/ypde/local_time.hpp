#pragma once

#include <functional>
#include <vector>

#include "ypde/path_ops.hpp"
#include "ypde/sewing.hpp"
#include "ypde/time_grid.hpp"

namespace ypde {

/// Uniform bins discretizing the z-variable of the local time L^w_t(z).
struct SpatialBins {
    double z_min;
    double z_max;
    std::size_t m;

    SpatialBins(double lo, double hi, std::size_t count) : z_min(lo), z_max(hi), m(count) {
        if (m < 1) throw std::invalid_argument("SpatialBins: need at least one bin");
        if (!(z_max > z_min)) throw std::invalid_argument("SpatialBins: empty range");
    }

    double width() const { return (z_max - z_min) / static_cast<double>(m); }
    double center(std::size_t k) const { return z_min + (static_cast<double>(k) + 0.5) * width(); }

    std::size_t index(double z) const {
        if (z < z_min || z > z_max)
            throw std::out_of_range("SpatialBins: value " + std::to_string(z) + " outside [" +
                                    std::to_string(z_min) + ", " + std::to_string(z_max) + "]");
        auto k = static_cast<std::size_t>((z - z_min) / width());
        return k >= m ? m - 1 : k;
    }

    /// Bins wide enough to cover the sample range of a scalar path, with margin.
    static SpatialBins covering(const SampledPath& w, std::size_t count, double margin = 0.05) {
        double lo = w.scalar(0), hi = w.scalar(0);
        for (std::size_t k = 0; k <= w.grid().n; ++k) {
            lo = std::min(lo, w.scalar(k));
            hi = std::max(hi, w.scalar(k));
        }
        double pad = margin * std::max(1e-12, hi - lo) + 1e-12;
        return SpatialBins(lo - pad, hi + pad, count);
    }
};

/// Histogram local time: L[t][k] = dt * #{grid times s < t with w_s in bin k} / width.
/// Cumulative in t; the occupation measure of the whole line is the elapsed
/// time, width * sum_k L[t][k] = t - t0 exactly at the grid nodes.
class LocalTimeField {
public:
    LocalTimeField(SpatialBins bins, TimeGrid grid, std::vector<double> values)
        : bins_(bins), grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.num_nodes() * bins_.m)
            throw std::invalid_argument("LocalTimeField: value size mismatch");
    }

    const SpatialBins& bins() const { return bins_; }
    const TimeGrid& grid() const { return grid_; }

    double at(std::size_t t_index, std::size_t bin) const {
        return values_[t_index * bins_.m + bin];
    }
    std::span<const double> row(std::size_t t_index) const {
        return {values_.data() + t_index * bins_.m, bins_.m};
    }

    double total_mass(std::size_t t_index) const {
        double s = 0.0;
        for (double v : row(t_index)) s += v;
        return s * bins_.width();
    }

private:
    SpatialBins bins_;
    TimeGrid grid_;
    std::vector<double> values_;
};

inline LocalTimeField local_time(const SampledPath& w, const SpatialBins& bins) {
    if (w.dim() != 1) throw std::invalid_argument("local_time: scalar path required");
    const std::size_t n = w.grid().n;
    const std::size_t m = bins.m;
    const double scale = w.grid().dt() / bins.width();
    std::vector<double> values((n + 1) * m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t k = bins.index(w.scalar(j));
        const double* prev = values.data() + j * m;
        double* next = values.data() + (j + 1) * m;
        for (std::size_t i = 0; i < m; ++i) next[i] = prev[i];
        next[k] += scale;
    }
    return LocalTimeField(bins, w.grid(), std::move(values));
}

inline void write_local_time_csv(const LocalTimeField& L, std::ostream& os) {
    os << "t,z,value\n";
    for (std::size_t j = 0; j <= L.grid().n; ++j)
        for (std::size_t k = 0; k < L.bins().m; ++k)
            os << detail::format_full(L.grid().node(j)) << ","
               << detail::format_full(L.bins().center(k)) << ","
               << detail::format_full(L.at(j, k)) << "\n";
}

/// Occupation-times check at node t_index: compares the time sum
/// dt * sum_{s<t} f(w_s) against the space sum width * sum_k f(z_k) L_t[k].
/// The gap is pure quantization, bounded by Lip(f) * width + O(dt).
struct OccupationGap {
    double time_side;
    double space_side;
    double gap;
};

inline OccupationGap occupation_formula_check(const std::function<double(double)>& f,
                                              const SampledPath& w, std::size_t t_index,
                                              const SpatialBins& bins) {
    if (w.dim() != 1) throw std::invalid_argument("occupation_formula_check: scalar path required");
    if (t_index > w.grid().n)
        throw std::invalid_argument("occupation_formula_check: node out of range");
    const double dt = w.grid().dt();
    const double width = bins.width();

    double time_side = 0.0;
    std::vector<double> counts(bins.m, 0.0);
    for (std::size_t s = 0; s < t_index; ++s) {
        time_side += f(w.scalar(s));
        counts[bins.index(w.scalar(s))] += 1.0;
    }
    time_side *= dt;

    double space_side = 0.0;
    for (std::size_t k = 0; k < bins.m; ++k)
        space_side += f(bins.center(k)) * (dt * counts[k] / width);
    space_side *= width;

    return {time_side, space_side, std::abs(time_side - space_side)};
}

/// A scalar drift b with declared growth/Lipschitz constant; possibly one
/// member of a mollified approximant family b^n for a singular limit.
struct DriftSpec {
    std::function<double(double)> b;
    double constant;   // C with |b| <= C(1+|x|) and |b(x)-b(y)| <= C|x-y|
    double eps = 0.0;  // mollification parameter, 0 when b itself is regular

    double operator()(double x) const { return b(x); }
};

/// Gaussian mollification of the Dirac drift, b_eps(x) = exp(-x^2/2eps^2)/sqrt(2 pi eps^2).
inline DriftSpec mollified_delta(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollified_delta: mollification must be positive");
    const double norm = 1.0 / (eps * std::sqrt(2.0 * 3.14159265358979323846));
    DriftSpec spec;
    spec.b = [eps, norm](double x) { return norm * std::exp(-0.5 * x * x / (eps * eps)); };
    // sup|b'| = norm * exp(-1/2)/eps at x = eps, plus the sup of b itself
    spec.constant = norm * std::exp(-0.5) / eps + norm;
    spec.eps = eps;
    return spec;
}

/// Evaluations of (b * L^w_{s,t}) on the bin centers, linearly interpolated
/// in between. Queries outside the covered center range throw.
class ConvolvedDrift {
public:
    ConvolvedDrift(SpatialBins bins, std::vector<double> values)
        : bins_(bins), values_(std::move(values)) {}

    double operator()(double u) const {
        const double lo = bins_.center(0);
        const double hi = bins_.center(bins_.m - 1);
        if (u < lo || u > hi)
            throw std::out_of_range("ConvolvedDrift: query " + std::to_string(u) +
                                    " outside representable range");
        double x = (u - lo) / bins_.width();
        auto k = static_cast<std::size_t>(x);
        if (k + 1 >= bins_.m) return values_.back();
        double w = x - static_cast<double>(k);
        return (1.0 - w) * values_[k] + w * values_[k + 1];
    }

    std::span<const double> values() const { return values_; }
    const SpatialBins& bins() const { return bins_; }

private:
    SpatialBins bins_;
    std::vector<double> values_;
};

/// (b * L^w_{s,t})(u) = width * sum_k b(u - z_k) (L_t[k] - L_s[k]) on bin centers.
inline ConvolvedDrift convolve_local_time(const DriftSpec& drift, const LocalTimeField& L,
                                          std::size_t s_index, std::size_t t_index) {
    if (s_index >= t_index) throw std::invalid_argument("convolve_local_time: need s < t");
    const std::size_t m = L.bins().m;
    const double width = L.bins().width();
    std::vector<double> out(m, 0.0);
    // u_c - z_k = (c - k) * width: one table of b on the lag grid serves all centers
    std::vector<double> btab(2 * m - 1);
    for (std::size_t i = 0; i < 2 * m - 1; ++i)
        btab[i] =
            drift((static_cast<double>(i) - static_cast<double>(m) + 1.0) * width);
    for (std::size_t k = 0; k < m; ++k) {
        double dL = L.at(t_index, k) - L.at(s_index, k);
        if (dL == 0.0) continue;
        for (std::size_t c = 0; c < m; ++c) out[c] += btab[c + m - 1 - k] * dL;
    }
    for (double& v : out) v *= width;
    return ConvolvedDrift(L.bins(), std::move(out));
}

/// Regularized drift integral I(u)_t = sewing of the germ
///   G_{s,t}(x) = (b * L^w_{s,t})(<u(x)>_{s,t}),
/// applied pointwise over the spatial nodes of u. Path samples of w are
/// snapped to bin centers, which realizes the histogram convolution exactly.
/// For Lipschitz b this agrees with the direct Bochner sum of b(u_s - w_s)
/// up to Lip(b) * width + O(dt^gamma).
inline SampledPath regularized_drift_integral(const DriftSpec& drift, const SampledPath& w,
                                              const SampledPath& u, const SpatialBins& bins,
                                              double q, double gamma, int max_level = 8,
                                              double tol = -1.0) {
    if (!u.grid().same_as(w.grid()))
        throw std::invalid_argument("regularized_drift_integral: grid mismatch");
    if (w.dim() != 1) throw std::invalid_argument("regularized_drift_integral: scalar w required");
    double qinv = (q == kInfExponent) ? 0.0 : 1.0 / q;
    if (!(gamma + qinv > 1.0))
        throw std::invalid_argument("regularized_drift_integral: outside Young-eligibility");

    const std::size_t n = u.grid().n;
    const std::size_t d = u.dim();
    const double dt = u.grid().dt();

    // snapped samples: b evaluated against bin centers realizes b * L^w
    std::vector<double> snapped(n + 1);
    for (std::size_t k = 0; k <= n; ++k) snapped[k] = bins.center(bins.index(w.scalar(k)));

    PathAverager averager(u);
    Germ germ;
    germ.dim = d;
    germ.declared_alpha = gamma;
    germ.declared_gamma = gamma + qinv;
    std::vector<double> mean(d);
    germ.eval = [&, mean](double s, double t, std::span<double> out) mutable {
        averager.average(s, t, mean);
        for (std::size_t i = 0; i < d; ++i) out[i] = 0.0;
        // integrate b(<u> - w_r) dr along the sample chain in [s,t]; partial
        // end cells enter with their covered fraction
        double a_idx = (s - u.grid().t0) / dt;
        double b_idx = (t - u.grid().t0) / dt;
        auto first = static_cast<std::size_t>(a_idx);
        auto last = static_cast<std::size_t>(std::ceil(b_idx));
        if (last > n) last = n;
        for (std::size_t r = first; r < last; ++r) {
            double cover = std::min(b_idx, static_cast<double>(r + 1)) -
                           std::max(a_idx, static_cast<double>(r));
            if (cover <= 0.0) continue;
            double wr = snapped[r];
            for (std::size_t i = 0; i < d; ++i) out[i] += cover * drift(mean[i] - wr);
        }
        for (std::size_t i = 0; i < d; ++i) out[i] *= dt;
    };
    return sew(germ, u.grid(), max_level, tol).sewn;
}

}  // namespace ypde
