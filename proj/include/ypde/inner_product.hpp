#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace ypde {

/// Symmetric positive definite tridiagonal matrix with a cached LDL^T factor.
/// Factored once, then solve() runs the usual two sweeps.
class TriDiag {
public:
    TriDiag() = default;

    TriDiag(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
        : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
        if (diag_.empty() || lower_.size() != diag_.size() - 1 || upper_.size() != diag_.size() - 1)
            throw std::invalid_argument("TriDiag: inconsistent band sizes");
    }

    static TriDiag dirichlet_stiffness(std::size_t d, double dx) {
        // -Laplacian on d interior nodes, zero boundary
        std::vector<double> lo(d - 1, -1.0 / (dx * dx));
        std::vector<double> di(d, 2.0 / (dx * dx));
        std::vector<double> up(d - 1, -1.0 / (dx * dx));
        return TriDiag(std::move(lo), std::move(di), std::move(up));
    }

    std::size_t size() const { return diag_.size(); }
    double lower(std::size_t i) const { return lower_[i]; }
    double diag(std::size_t i) const { return diag_[i]; }
    double upper(std::size_t i) const { return upper_[i]; }
    double& lower(std::size_t i) { factored_ = false; return lower_[i]; }
    double& diag(std::size_t i) { factored_ = false; return diag_[i]; }
    double& upper(std::size_t i) { factored_ = false; return upper_[i]; }

    void apply(std::span<const double> x, std::span<double> y) const {
        const std::size_t d = size();
        for (std::size_t i = 0; i < d; ++i) {
            double v = diag_[i] * x[i];
            if (i > 0) v += lower_[i - 1] * x[i - 1];
            if (i + 1 < d) v += upper_[i] * x[i + 1];
            y[i] = v;
        }
    }

    /// Thomas solve; throws on a vanishing pivot.
    void solve(std::span<const double> rhs, std::span<double> x) const {
        const std::size_t d = size();
        if (!factored_) factor();
        x[0] = rhs[0];
        for (std::size_t i = 1; i < d; ++i) x[i] = rhs[i] - l_[i - 1] * x[i - 1];
        x[d - 1] /= u_[d - 1];
        for (std::size_t i = d - 1; i-- > 0;) x[i] = (x[i] - upper_[i] * x[i + 1]) / u_[i];
    }

private:
    void factor() const {
        const std::size_t d = size();
        u_.assign(d, 0.0);
        l_.assign(d > 0 ? d - 1 : 0, 0.0);
        u_[0] = diag_[0];
        for (std::size_t i = 1; i < d; ++i) {
            if (std::abs(u_[i - 1]) < 1e-300) throw std::runtime_error("TriDiag: singular pivot");
            l_[i - 1] = lower_[i - 1] / u_[i - 1];
            u_[i] = diag_[i] - l_[i - 1] * upper_[i - 1];
        }
        if (std::abs(u_[d - 1]) < 1e-300) throw std::runtime_error("TriDiag: singular pivot");
        factored_ = true;
    }

    std::vector<double> lower_, diag_, upper_;
    mutable std::vector<double> l_, u_;
    mutable bool factored_ = false;
};

/// Discrete realization of the H inner product. Two kinds are supported:
///  - weighted-l2:      (u,v) = sum_i m_i u_i v_i          (H = L^2, m_i = dx)
///  - inverse-stiffness: (u,v) = mass * sum_i u_i (K^-1 v)_i  (H = W^{-1,2}, K = -Laplacian)
/// Instances keep a solve workspace, so concurrent callers use one copy per
/// thread (copies are cheap).
class InnerProduct {
public:
    static InnerProduct weighted(std::vector<double> masses) {
        for (double m : masses)
            if (!(m > 0.0)) throw std::invalid_argument("InnerProduct: weights must be positive");
        InnerProduct ip;
        ip.dim_ = masses.size();
        ip.masses_ = std::move(masses);
        return ip;
    }

    static InnerProduct euclidean(std::size_t d) {
        return weighted(std::vector<double>(d, 1.0));
    }

    static InnerProduct lumped_mass(std::size_t d, double dx) {
        return weighted(std::vector<double>(d, dx));
    }

    static InnerProduct inverse_stiffness(TriDiag stiffness, double mass_weight) {
        InnerProduct ip;
        ip.dim_ = stiffness.size();
        ip.stiffness_ = std::move(stiffness);
        ip.mass_weight_ = mass_weight;
        ip.inverse_ = true;
        ip.work_.resize(ip.dim_);
        return ip;
    }

    std::size_t dim() const { return dim_; }
    bool is_inverse_stiffness() const { return inverse_; }

    double dot(std::span<const double> u, std::span<const double> v) const {
        if (u.size() != dim_ || v.size() != dim_)
            throw std::invalid_argument("InnerProduct: dimension mismatch");
        if (!inverse_) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) s += masses_[i] * u[i] * v[i];
            return s;
        }
        stiffness_.solve(v, work_);
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += u[i] * work_[i];
        return mass_weight_ * s;
    }

    double norm(std::span<const double> u) const { return std::sqrt(std::max(0.0, dot(u, u))); }

    /// Gram transform G u with (u,v)_H = sum_i u_i (G v)_i. Increment norms of
    /// whole paths reduce to plain dot products against the transformed path,
    /// which keeps the O(n^2) seminorm loops at O(d) per pair even for the
    /// inverse-stiffness form.
    void gram(std::span<const double> u, std::span<double> out) const {
        if (!inverse_) {
            for (std::size_t i = 0; i < dim_; ++i) out[i] = masses_[i] * u[i];
            return;
        }
        stiffness_.solve(u, out);
        for (std::size_t i = 0; i < dim_; ++i) out[i] *= mass_weight_;
    }

    double norm_diff(std::span<const double> u, std::span<const double> v) const {
        if (u.size() != dim_ || v.size() != dim_)
            throw std::invalid_argument("InnerProduct: dimension mismatch");
        if (!inverse_) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                double w = u[i] - v[i];
                s += masses_[i] * w * w;
            }
            return std::sqrt(s);
        }
        if (diff_.size() != dim_) diff_.resize(dim_);
        for (std::size_t i = 0; i < dim_; ++i) diff_[i] = u[i] - v[i];
        return norm(diff_);
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> masses_;
    TriDiag stiffness_;
    double mass_weight_ = 1.0;
    bool inverse_ = false;
    mutable std::vector<double> work_;
    mutable std::vector<double> diff_;
};

}  // namespace ypde
