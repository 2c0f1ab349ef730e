#pragma once

#include <stdexcept>
#include <vector>

#include "ypde/time_grid.hpp"

namespace ypde {

/// Piecewise-linear coarsening: sample the path at 2^level + 1 equispaced
/// nodes and resample linearly back to the original grid. The output is
/// discretely C^1 and converges to the input in every C^gamma estimator with
/// gamma below the path regularity.
inline SampledPath mollify_path(const SampledPath& path, unsigned level) {
    const std::size_t n = path.grid().n;
    const std::size_t coarse = std::size_t{1} << level;
    if (coarse > n) throw std::invalid_argument("mollify_path: level exceeds grid resolution");

    const TimeGrid& g = path.grid();
    const std::size_t d = path.dim();
    std::vector<double> knots((coarse + 1) * d);
    std::vector<double> buf(d);
    for (std::size_t j = 0; j <= coarse; ++j) {
        double t = g.t0 + g.length() * static_cast<double>(j) / static_cast<double>(coarse);
        path.value_at(t, buf);
        for (std::size_t i = 0; i < d; ++i) knots[j * d + i] = buf[i];
    }

    SampledPath out(g, d);
    for (std::size_t k = 0; k <= n; ++k) {
        double x = static_cast<double>(k) * static_cast<double>(coarse) / static_cast<double>(n);
        auto j = static_cast<std::size_t>(x);
        if (j >= coarse) j = coarse - 1;
        double w = x - static_cast<double>(j);
        auto row = out.at(k);
        for (std::size_t i = 0; i < d; ++i)
            row[i] = (1.0 - w) * knots[j * d + i] + w * knots[(j + 1) * d + i];
    }
    return out;
}

/// Trapezoid mean of the path over [node s, node t]. Exact for constants and
/// linear-in-time paths.
inline std::vector<double> time_average(const SampledPath& path, std::size_t s, std::size_t t) {
    if (s >= t || t >= path.num_nodes())
        throw std::invalid_argument("time_average: need grid nodes s < t");
    const std::size_t d = path.dim();
    std::vector<double> acc(d, 0.0);
    for (std::size_t k = s; k <= t; ++k) {
        double w = (k == s || k == t) ? 0.5 : 1.0;
        auto row = path.at(k);
        for (std::size_t i = 0; i < d; ++i) acc[i] += w * row[i];
    }
    double inv = 1.0 / static_cast<double>(t - s);
    for (double& x : acc) x *= inv;
    return acc;
}

/// Constant-time averages <w>_{s,t} of the piecewise-linear interpolant of
/// nodal values, via a prefix integral. Exact for the interpolant; collapses
/// to the nodal trapezoid rule when s and t are grid nodes. Sub-grid germs
/// query this millions of times, hence the precomputation.
class PathAverager {
public:
    PathAverager(const TimeGrid& grid, std::vector<double> nodal_values, std::size_t dim)
        : grid_(grid), dim_(dim), values_(std::move(nodal_values)) {
        if (values_.size() != grid.num_nodes() * dim_)
            throw std::invalid_argument("PathAverager: nodal value size mismatch");
        cum_.assign(values_.size(), 0.0);
        const double dt = grid_.dt();
        for (std::size_t k = 0; k < grid_.n; ++k)
            for (std::size_t i = 0; i < dim_; ++i)
                cum_[(k + 1) * dim_ + i] = cum_[k * dim_ + i] +
                                           0.5 * dt * (values_[k * dim_ + i] + values_[(k + 1) * dim_ + i]);
    }

    explicit PathAverager(const SampledPath& path) : PathAverager(path.grid(), path.raw(), path.dim()) {}

    /// Prefix integral of the interpolant from t0 to real time t, per component.
    void integral_to(double t, std::span<double> out) const {
        const double dt = grid_.dt();
        double x = (t - grid_.t0) / dt;
        if (x <= 0.0) {
            for (std::size_t i = 0; i < dim_; ++i) out[i] = 0.0;
            return;
        }
        if (x >= static_cast<double>(grid_.n)) {
            for (std::size_t i = 0; i < dim_; ++i) out[i] = cum_[grid_.n * dim_ + i];
            return;
        }
        auto k = static_cast<std::size_t>(x);
        double w = x - static_cast<double>(k);
        const double* lo = values_.data() + k * dim_;
        const double* hi = values_.data() + (k + 1) * dim_;
        for (std::size_t i = 0; i < dim_; ++i) {
            double vmid = (1.0 - w) * lo[i] + w * hi[i];
            out[i] = cum_[k * dim_ + i] + 0.5 * (w * dt) * (lo[i] + vmid);
        }
    }

    /// <w>_{s,t} = (t-s)^{-1} int_s^t of the interpolant.
    void average(double s, double t, std::span<double> out) const {
        std::vector<double> a(dim_), b(dim_);
        integral_to(s, a);
        integral_to(t, b);
        double inv = 1.0 / (t - s);
        for (std::size_t i = 0; i < dim_; ++i) out[i] = (b[i] - a[i]) * inv;
    }

    std::size_t dim() const { return dim_; }

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> values_;
    std::vector<double> cum_;
};

}  // namespace ypde
