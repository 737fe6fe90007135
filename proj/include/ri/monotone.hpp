#pragma once

#include <cmath>
#include <vector>

#include "ri/errors.hpp"
#include "ri/log_grid.hpp"
#include "ri/sv.hpp"

namespace ri {

/// Strictly increasing surrogate sigma(t) ~ t^lambda * a(t), tabulated in
/// log-log coordinates on the working grid, with a binary-search inverse.
/// Outside the grid sigma follows the pure power t^lambda.
class MonotoneMap {
public:
    MonotoneMap() = default;
    MonotoneMap(LogGrid grid, double lambda, std::vector<double> log_values,
                double ratio_bound)
        : grid_(grid), lambda_(lambda), y_(std::move(log_values)), ratio_(ratio_bound) {}

    double lambda() const { return lambda_; }
    double ratio_bound() const { return ratio_; }
    const LogGrid& grid() const { return grid_; }
    const std::vector<double>& log_values() const { return y_; }

    double operator()(double t) const {
        if (!(t > 0.0)) throw RangeError("MonotoneMap evaluated outside (0,inf)");
        if (t <= grid_.tmin) return std::exp(y_.front() + lambda_ * std::log(t / grid_.tmin));
        if (t >= grid_.tmax) return std::exp(y_.back() + lambda_ * std::log(t / grid_.tmax));
        const double x = grid_.locate(t);
        const std::size_t i = static_cast<std::size_t>(x);
        const double w = x - static_cast<double>(i);
        return std::exp(y_[i] * (1.0 - w) + y_[i + 1] * w);
    }

    double inverse(double v) const {
        if (!(v > 0.0)) throw RangeError("MonotoneMap inverse outside (0,inf)");
        const double w = std::log(v);
        if (w <= y_.front()) return grid_.tmin * std::exp((w - y_.front()) / lambda_);
        if (w >= y_.back()) return grid_.tmax * std::exp((w - y_.back()) / lambda_);
        std::size_t lo = 0, hi = y_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (y_[mid] <= w ? lo : hi) = mid;
        }
        const double frac = (w - y_[lo]) / (y_[hi] - y_[lo]);
        const double x = (static_cast<double>(lo) + frac) * grid_.log_step();
        return grid_.tmin * std::exp(x);
    }

private:
    LogGrid grid_;
    double lambda_ = 1.0;
    std::vector<double> y_;
    double ratio_ = 1.0;
};

/// Monotone envelope of rho(t) = t^lambda * a(t): pool-adjacent-violators on
/// ln rho over the grid, then a minimal-slope strictification.  The reported
/// ratio bound is max over the grid of max(sigma/rho, rho/sigma).
inline MonotoneMap sigma_surrogate(double lambda, const Sv& a,
                                   const LogGrid& grid = LogGrid{}) {
    if (!(lambda > 0.0)) throw RangeError("sigma_surrogate requires lambda > 0");
    const std::size_t n = grid.size();
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = grid.point(i);
        raw[i] = lambda * std::log(t) + std::log(a(t));
    }
    // PAVA with unit weights: pool blocks whose means violate monotonicity.
    std::vector<double> mean;
    std::vector<std::size_t> count;
    for (std::size_t i = 0; i < n; ++i) {
        mean.push_back(raw[i]);
        count.push_back(1);
        while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
            const double m = (mean[mean.size() - 2] * count[count.size() - 2] +
                              mean.back() * count.back()) /
                             static_cast<double>(count[count.size() - 2] + count.back());
            count[count.size() - 2] += count.back();
            mean[mean.size() - 2] = m;
            mean.pop_back();
            count.pop_back();
        }
    }
    std::vector<double> y;
    y.reserve(n);
    for (std::size_t b = 0; b < mean.size(); ++b)
        for (std::size_t k = 0; k < count[b]; ++k) y.push_back(mean[b]);
    // strictify: enforce a tiny positive slope so the inverse is well defined
    const double min_slope = lambda * 1e-6 * grid.log_step();
    for (std::size_t i = 1; i < n; ++i) y[i] = std::max(y[i], y[i - 1] + min_slope);
    double ratio = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        ratio = std::max(ratio, std::exp(std::fabs(y[i] - raw[i])));
    return MonotoneMap(grid, lambda, std::move(y), ratio);
}

}  // namespace ri
