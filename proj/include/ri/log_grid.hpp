#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "ri/errors.hpp"

namespace ri {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Logarithmically uniform grid on [tmin, tmax].
struct LogGrid {
    double tmin = 1e-8;
    double tmax = 1e8;
    int points_per_decade = 32;

    LogGrid() = default;
    LogGrid(double lo, double hi, int ppd) : tmin(lo), tmax(hi), points_per_decade(ppd) {
        assert(tmin > 0.0 && tmin < tmax && points_per_decade > 0);
    }

    std::size_t size() const {
        const double decades = std::log10(tmax / tmin);
        return static_cast<std::size_t>(std::lround(decades * points_per_decade)) + 1;
    }

    double point(std::size_t i) const {
        return tmin * std::pow(10.0, static_cast<double>(i) / points_per_decade);
    }

    /// Step of the grid in the variable x = ln t.
    double log_step() const { return std::log(10.0) / points_per_decade; }

    /// Fractional index of t (clamped to nothing; may be out of range).
    double locate(double t) const {
        return std::log10(t / tmin) * points_per_decade;
    }

    std::vector<double> points() const {
        std::vector<double> p(size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = point(i);
        return p;
    }

    LogGrid refined(int factor = 2) const { return {tmin, tmax, points_per_decade * factor}; }

    bool operator==(const LogGrid&) const = default;
};

/// One-sided asymptotic model  g(t) ~ scale * t^power * (1 + |ln t|)^log_power.
struct TailDescriptor {
    double power = 0.0;
    double log_power = 0.0;
    double scale = 0.0;  // scale == 0 means the function vanishes in the tail

    bool vanishes() const { return scale == 0.0; }
};

/// Sampled non-negative function on a LogGrid with power-log tails.
/// Interpolation between grid points is linear in x = ln t.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(LogGrid grid, std::vector<double> samples)
        : grid_(grid), samples_(std::move(samples)) {
        assert(samples_.size() == grid_.size());
    }

    template <class F>
    static GridFunction sample(const LogGrid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
        return GridFunction(grid, std::move(v));
    }

    const LogGrid& grid() const { return grid_; }
    const std::vector<double>& samples() const { return samples_; }
    std::vector<double>& samples() { return samples_; }

    const TailDescriptor& lower_tail() const { return lower_; }
    const TailDescriptor& upper_tail() const { return upper_; }
    void set_lower_tail(TailDescriptor d) { lower_ = d; }
    void set_upper_tail(TailDescriptor d) { upper_ = d; }

    static double tail_value(const TailDescriptor& d, double t) {
        if (d.vanishes()) return 0.0;
        const double l = std::log(t);
        return d.scale * std::pow(t, d.power) * std::pow(1.0 + std::fabs(l), d.log_power);
    }

    double operator()(double t) const {
        if (samples_.empty()) return 0.0;
        if (t <= grid_.tmin) {
            if (t == grid_.tmin) return samples_.front();
            return tail_value(lower_, t);
        }
        if (t >= grid_.tmax) {
            if (t == grid_.tmax) return samples_.back();
            return tail_value(upper_, t);
        }
        const double x = grid_.locate(t);
        const std::size_t i = static_cast<std::size_t>(x);
        const double w = x - static_cast<double>(i);
        return samples_[i] * (1.0 - w) + samples_[i + 1] * w;
    }

    /// Fit tail descriptors by least squares over the outermost two decades,
    /// anchored so the model is continuous at the grid boundary.
    void fit_tails() {
        lower_ = fit_side(true);
        upper_ = fit_side(false);
    }

    void to_csv(std::ostream& os) const {
        os << "t,value\n";
        for (std::size_t i = 0; i < samples_.size(); ++i)
            os << grid_.point(i) << "," << samples_[i] << "\n";
    }

    nlohmann::json to_json() const {
        return {{"grid", {{"tmin", grid_.tmin}, {"tmax", grid_.tmax},
                          {"points_per_decade", grid_.points_per_decade}}},
                {"samples", samples_},
                {"lower_tail", {{"power", lower_.power}, {"log_power", lower_.log_power},
                                {"scale", lower_.scale}}},
                {"upper_tail", {{"power", upper_.power}, {"log_power", upper_.log_power},
                                {"scale", upper_.scale}}}};
    }

    static GridFunction from_json(const nlohmann::json& j) {
        LogGrid g(j.at("grid").at("tmin").get<double>(), j.at("grid").at("tmax").get<double>(),
                  j.at("grid").at("points_per_decade").get<int>());
        GridFunction f(g, j.at("samples").get<std::vector<double>>());
        auto tail = [](const nlohmann::json& t) {
            return TailDescriptor{t.at("power").get<double>(), t.at("log_power").get<double>(),
                                  t.at("scale").get<double>()};
        };
        f.set_lower_tail(tail(j.at("lower_tail")));
        f.set_upper_tail(tail(j.at("upper_tail")));
        return f;
    }

private:
    TailDescriptor fit_side(bool lower) const {
        const std::size_t n = samples_.size();
        const std::size_t span = std::min<std::size_t>(2 * grid_.points_per_decade + 1, n);
        const std::size_t begin = lower ? 0 : n - span;
        // Least squares for ln v = ln c + p*x + gamma*ln(1+|x|), x = ln t.
        double A[3][3] = {};
        double rhs[3] = {};
        std::size_t used = 0;
        for (std::size_t k = 0; k < span; ++k) {
            const std::size_t i = begin + k;
            const double v = samples_[i];
            if (!(v > 0.0) || !std::isfinite(v)) continue;
            const double x = std::log(grid_.point(i));
            const double b[3] = {1.0, x, std::log(1.0 + std::fabs(x))};
            const double y = std::log(v);
            for (int r = 0; r < 3; ++r) {
                rhs[r] += b[r] * y;
                for (int c = 0; c < 3; ++c) A[r][c] += b[r] * b[c];
            }
            ++used;
        }
        const double boundary = lower ? samples_.front() : samples_.back();
        if (used < 4 || boundary <= 0.0) return TailDescriptor{0.0, 0.0, 0.0};
        // Solve the 3x3 normal equations by Gaussian elimination.
        double M[3][4] = {{A[0][0], A[0][1], A[0][2], rhs[0]},
                          {A[1][0], A[1][1], A[1][2], rhs[1]},
                          {A[2][0], A[2][1], A[2][2], rhs[2]}};
        for (int c = 0; c < 3; ++c) {
            int piv = c;
            for (int r = c + 1; r < 3; ++r)
                if (std::fabs(M[r][c]) > std::fabs(M[piv][c])) piv = r;
            for (int k = 0; k < 4; ++k) std::swap(M[c][k], M[piv][k]);
            if (std::fabs(M[c][c]) < 1e-12) return TailDescriptor{0.0, 0.0, boundary};
            for (int r = 0; r < 3; ++r) {
                if (r == c) continue;
                const double fac = M[r][c] / M[c][c];
                for (int k = c; k < 4; ++k) M[r][k] -= fac * M[c][k];
            }
        }
        TailDescriptor d;
        d.power = M[1][3] / M[1][1];
        d.log_power = M[2][3] / M[2][2];
        // Anchor the scale so the model matches the boundary sample.
        const double tb = lower ? grid_.tmin : grid_.tmax;
        const double lb = std::log(tb);
        d.scale = boundary / (std::pow(tb, d.power) * std::pow(1.0 + std::fabs(lb), d.log_power));
        return d;
    }

    LogGrid grid_;
    std::vector<double> samples_;
    TailDescriptor lower_;
    TailDescriptor upper_;
};

}  // namespace ri
