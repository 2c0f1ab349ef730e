#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ypde {

/// Uniform partition of [t0, T] into n intervals. Node k sits at t0 + k*dt.
struct TimeGrid {
    double t0 = 0.0;
    double T = 1.0;
    std::size_t n = 1;

    TimeGrid() = default;
    TimeGrid(double t0_, double T_, std::size_t n_) : t0(t0_), T(T_), n(n_) {
        if (n == 0) throw std::invalid_argument("TimeGrid: need at least one interval");
        if (!(T > t0)) throw std::invalid_argument("TimeGrid: T must exceed t0");
    }

    double dt() const { return (T - t0) / static_cast<double>(n); }
    double node(std::size_t k) const { return t0 + static_cast<double>(k) * dt(); }
    std::size_t num_nodes() const { return n + 1; }
    double length() const { return T - t0; }

    bool same_as(const TimeGrid& other, double tol = 1e-12) const {
        return n == other.n && std::abs(t0 - other.t0) <= tol && std::abs(T - other.T) <= tol;
    }

    bool power_of_two() const { return (n & (n - 1)) == 0; }
};

/// A path of d-vectors sampled on a uniform time grid. Storage is row-major:
/// node k occupies values[k*d .. (k+1)*d).
class SampledPath {
public:
    SampledPath() = default;

    SampledPath(TimeGrid grid, std::size_t space_dim)
        : grid_(grid), dim_(space_dim), values_(grid.num_nodes() * space_dim, 0.0) {
        if (space_dim == 0) throw std::invalid_argument("SampledPath: space_dim must be positive");
    }

    SampledPath(TimeGrid grid, std::size_t space_dim, std::vector<double> values)
        : grid_(grid), dim_(space_dim), values_(std::move(values)) {
        if (space_dim == 0) throw std::invalid_argument("SampledPath: space_dim must be positive");
        if (values_.size() != grid_.num_nodes() * dim_)
            throw std::invalid_argument("SampledPath: values size does not match grid");
    }

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t num_nodes() const { return grid_.num_nodes(); }

    std::span<double> at(std::size_t k) { return {values_.data() + k * dim_, dim_}; }
    std::span<const double> at(std::size_t k) const { return {values_.data() + k * dim_, dim_}; }

    double& scalar(std::size_t k) { return values_[k * dim_]; }
    double scalar(std::size_t k) const { return values_[k * dim_]; }

    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

    /// Linear interpolation at an off-node time. Used when a germ refines
    /// below the grid: the path is identified with its piecewise-linear
    /// interpolant.
    void value_at(double t, std::span<double> out) const {
        const double dt = grid_.dt();
        double x = (t - grid_.t0) / dt;
        if (x <= 0.0) {
            auto v = at(0);
            for (std::size_t i = 0; i < dim_; ++i) out[i] = v[i];
            return;
        }
        if (x >= static_cast<double>(grid_.n)) {
            auto v = at(grid_.n);
            for (std::size_t i = 0; i < dim_; ++i) out[i] = v[i];
            return;
        }
        auto k = static_cast<std::size_t>(x);
        double w = x - static_cast<double>(k);
        auto a = at(k);
        auto b = at(k + 1);
        for (std::size_t i = 0; i < dim_; ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
    }

    double scalar_at(double t) const {
        double v = 0.0;
        value_at(t, {&v, 1});
        return v;
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    TimeGrid grid_;
    std::size_t dim_ = 1;
    std::vector<double> values_;
};

namespace detail {
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

/// CSV layout: header `t,v0,...,v{d-1}`, one row per node, 17 significant digits.
inline void write_path_csv(const SampledPath& path, std::ostream& os) {
    os << "t";
    for (std::size_t i = 0; i < path.dim(); ++i) os << ",v" << i;
    os << "\n";
    for (std::size_t k = 0; k < path.num_nodes(); ++k) {
        os << detail::format_full(path.grid().node(k));
        auto v = path.at(k);
        for (std::size_t i = 0; i < path.dim(); ++i) os << "," << detail::format_full(v[i]);
        os << "\n";
    }
}

inline void write_path_csv(const SampledPath& path, const std::string& filename) {
    std::ofstream os(filename);
    if (!os) throw std::runtime_error("write_path_csv: cannot open " + filename);
    write_path_csv(path, os);
}

inline SampledPath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_path_csv: empty input");
    std::size_t dim = 0;
    for (char c : line)
        if (c == ',') ++dim;
    if (dim == 0) throw std::runtime_error("read_path_csv: malformed header");
    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        for (std::size_t col = 0; col <= dim; ++col) {
            std::size_t next = line.find(',', pos);
            std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
            double x = std::stod(tok);
            if (col == 0)
                times.push_back(x);
            else
                values.push_back(x);
            if (next == std::string::npos) break;
            pos = next + 1;
        }
    }
    if (times.size() < 2) throw std::runtime_error("read_path_csv: need at least two rows");
    TimeGrid grid(times.front(), times.back(), times.size() - 1);
    return SampledPath(grid, dim, std::move(values));
}

/// JSON descriptor written alongside a path CSV: {t0,T,n,d,seed?,kind}.
inline void write_path_descriptor(const SampledPath& path, const std::string& kind,
                                  const std::string& filename, long long seed = -1) {
    std::ofstream os(filename);
    if (!os) throw std::runtime_error("write_path_descriptor: cannot open " + filename);
    os << "{\"t0\":" << detail::format_full(path.grid().t0)
       << ",\"T\":" << detail::format_full(path.grid().T) << ",\"n\":" << path.grid().n
       << ",\"d\":" << path.dim();
    if (seed >= 0) os << ",\"seed\":" << seed;
    os << ",\"kind\":\"" << kind << "\"}\n";
}

}  // namespace ypde
