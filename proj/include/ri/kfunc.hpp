#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ri/errors.hpp"
#include "ri/log_grid.hpp"

namespace ri {

/// Non-increasing staircase on (0,inf): value values_[i] on (edges_[i-1], edges_[i]),
/// zero beyond the last edge.
class DecreasingProfile {
public:
    DecreasingProfile() = default;
    DecreasingProfile(std::vector<double> edges, std::vector<double> values)
        : edges_(std::move(edges)), values_(std::move(values)) {
        normalize();
    }

    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& values() const { return values_; }
    bool is_zero() const { return values_.empty(); }
    double support_bound() const { return edges_.empty() ? 0.0 : edges_.back(); }

    double operator()(double t) const {
        if (t <= 0.0) throw RangeError("profile evaluated at t <= 0");
        auto it = std::lower_bound(edges_.begin(), edges_.end(), t);
        if (it == edges_.end()) return 0.0;
        return values_[static_cast<std::size_t>(it - edges_.begin())];
    }

    /// Exact integral over (0,t).
    double integral(double t) const {
        double acc = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const double hi = std::min(t, edges_[i]);
            if (hi <= prev) break;
            acc += values_[i] * (hi - prev);
            prev = edges_[i];
        }
        return acc;
    }

    double total_mass() const { return is_zero() ? 0.0 : integral(edges_.back()); }

    DecreasingProfile scaled(double c) const {
        DecreasingProfile p = *this;
        for (double& v : p.values_) v *= c;
        p.normalize();
        return p;
    }

    nlohmann::json to_json() const {
        std::vector<double> bp(edges_);
        return {{"breakpoints", bp}, {"values", values_}};
    }
    static DecreasingProfile from_json(const nlohmann::json& j) {
        return DecreasingProfile(j.at("breakpoints").get<std::vector<double>>(),
                                 j.at("values").get<std::vector<double>>());
    }

private:
    void normalize() {
        // drop trailing zero-valued pieces, merge equal neighbours
        while (!values_.empty() && values_.back() == 0.0) {
            values_.pop_back();
            edges_.pop_back();
        }
        std::vector<double> e, v;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!v.empty() && v.back() == values_[i]) {
                e.back() = edges_[i];
            } else {
                e.push_back(edges_[i]);
                v.push_back(values_[i]);
            }
        }
        edges_ = std::move(e);
        values_ = std::move(v);
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            if (values_[i] < values_[i + 1]) throw RangeError("profile values must be non-increasing");
    }

    std::vector<double> edges_;
    std::vector<double> values_;
};

/// Non-increasing rearrangement of finitely many (value, measure) pieces.
/// Idempotent: rearranging a staircase reproduces it.
inline DecreasingProfile rearrange(std::vector<std::pair<double, double>> pieces) {
    for (const auto& [v, m] : pieces) {
        if (v < 0.0) throw RangeError("rearrange: negative value");
        if (m <= 0.0) throw RangeError("rearrange: nonpositive measure");
    }
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> edges, values;
    double acc = 0.0;
    for (const auto& [v, m] : pieces) {
        acc += m;
        edges.push_back(acc);
        values.push_back(v);
    }
    return DecreasingProfile(std::move(edges), std::move(values));
}

/// K(t,f) for a fixed couple and f, sampled on a grid with exact tails.
struct KProfile {
    GridFunction fn;
    std::string couple_tag;

    double operator()(double t) const { return fn(t); }
};

/// K(t, f; L1, Linf) = int_0^t f*(u) du, exact on the staircase.
inline KProfile k_l1_linf(const DecreasingProfile& fstar,
                          const LogGrid& grid = LogGrid{}) {
    GridFunction fn = GridFunction::sample(grid, [&](double t) { return fstar.integral(t); });
    if (fstar.is_zero()) {
        fn.set_lower_tail({0.0, 0.0, 0.0});
        fn.set_upper_tail({0.0, 0.0, 0.0});
    } else {
        // K(t) = v0 t below the first edge; K = total mass above the last edge
        const double first_edge = fstar.edges().front();
        if (grid.tmin <= first_edge)
            fn.set_lower_tail({1.0, 0.0, fstar.values().front()});
        else
            fn.fit_tails();  // grid starts inside the staircase; fall back to the fit
        if (grid.tmax >= fstar.support_bound())
            fn.set_upper_tail({0.0, 0.0, fstar.total_mass()});
        else {
            GridFunction tmp = fn;
            tmp.fit_tails();
            fn.set_upper_tail(tmp.upper_tail());
        }
    }
    return KProfile{std::move(fn), "(L1,Linf)"};
}

/// f**(t) = (1/t) int_0^t f*; identical to K(t)/t.
inline GridFunction maximal(const DecreasingProfile& fstar, const LogGrid& grid = LogGrid{}) {
    GridFunction fn =
        GridFunction::sample(grid, [&](double t) { return fstar.integral(t) / t; });
    if (fstar.is_zero()) {
        fn.set_lower_tail({0.0, 0.0, 0.0});
        fn.set_upper_tail({0.0, 0.0, 0.0});
    } else {
        if (grid.tmin <= fstar.edges().front())
            fn.set_lower_tail({0.0, 0.0, fstar.values().front()});
        else
            fn.fit_tails();
        if (grid.tmax >= fstar.support_bound())
            fn.set_upper_tail({-1.0, 0.0, fstar.total_mass()});
        else {
            GridFunction tmp = fn;
            tmp.fit_tails();
            fn.set_upper_tail(tmp.upper_tail());
        }
    }
    return fn;
}

/// Finite couple model: R^n with weighted p-norms on each side.
struct DiscreteCouple {
    std::vector<double> w0;
    std::vector<double> w1;
    double p0 = 1.0;  // norm index of side 0
    double p1 = 1.0;
    static constexpr std::size_t kMaxDim = 64;

    std::size_t dim() const { return w0.size(); }

    void validate() const {
        if (w0.size() != w1.size()) throw RangeError("weight sequences differ in length");
        if (w0.size() > kMaxDim) throw RangeError("couple dimension exceeds bound");
        for (double w : w0)
            if (!(w > 0.0)) throw RangeError("weights must be positive");
        for (double w : w1)
            if (!(w > 0.0)) throw RangeError("weights must be positive");
    }

    double norm(int side, const std::vector<double>& f) const {
        const auto& w = side == 0 ? w0 : w1;
        const double p = side == 0 ? p0 : p1;
        if (f.size() != w.size()) throw RangeError("dimension mismatch");
        if (std::isinf(p)) {
            double m = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, w[i] * std::fabs(f[i]));
            return m;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(w[i] * std::fabs(f[i]), p);
        return std::pow(s, 1.0 / p);
    }

    /// Swapped couple (A1, A0).
    DiscreteCouple swapped() const { return {w1, w0, p1, p0}; }
};

/// Exact K-functional for a weighted-l1 pair:
///   K(t,f) = sum_i min(w0_i, t w1_i) |f_i|.
inline double k_weighted_l1(const DiscreteCouple& c, const std::vector<double>& f, double t,
                            std::vector<double>* opt_g0 = nullptr) {
    c.validate();
    if (c.p0 != 1.0 || c.p1 != 1.0) throw RangeError("k_weighted_l1 requires l1 on both sides");
    if (f.size() != c.dim()) throw RangeError("dimension mismatch");
    if (opt_g0) opt_g0->assign(f.size(), 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = c.w0[i], b = t * c.w1[i];
        s += std::min(a, b) * std::fabs(f[i]);
        if (opt_g0 && a <= b) (*opt_g0)[i] = f[i];  // cheap side goes to A0
    }
    return s;
}

/// Convex norm evaluator for the oracle; min_index tracks the smallest
/// quasi-norm index anywhere inside the evaluation (must be >= 1).
struct ConvexNorm {
    std::function<double(const std::vector<double>&)> fn;
    double min_index = 1.0;

    double operator()(const std::vector<double>& g) const { return fn(g); }
};

struct OracleOptions {
    double tol = 1e-6;     // first-order/progress tolerance (relative)
    int max_passes = 80;   // coordinate-descent sweeps
    bool throw_on_limit = false;
};

namespace detail {

// Golden-section minimization of a convex function on [lo, hi].
template <class F>
inline double golden_min(F&& f, double lo, double hi, double tol) {
    constexpr double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

}  // namespace detail

/// Numerically minimizes ||g||_0 + t ||f-g||_1 over g in R^n.
/// Both evaluators must be absolute norms (depend on |g_i| monotonically), so
/// the optimum lies in the box 0 <= g_i <= |f_i| with the sign pattern of f.
/// Cyclic coordinate descent with exact (golden-section) line searches from a
/// small multi-start family; convexity makes any stationary point global.
inline double k_oracle_value(const ConvexNorm& n0, const ConvexNorm& n1,
                             const std::vector<double>& f, double t,
                             std::vector<double>* warm = nullptr,
                             const OracleOptions& opt = {}) {
    if (n0.min_index < 1.0 || n1.min_index < 1.0)
        throw NonConvexIndices("oracle requires all norm indices >= 1");
    const std::size_t n = f.size();
    std::vector<double> fa(n);
    std::vector<double> sgn(n);
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = std::fabs(f[i]);
        sgn[i] = f[i] < 0.0 ? -1.0 : 1.0;
        if (fa[i] != 0.0) zero = false;
    }
    if (zero) return 0.0;

    std::vector<double> tmp(n), rem(n);
    auto objective = [&](const std::vector<double>& g) {
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = sgn[i] * g[i];
            rem[i] = sgn[i] * (fa[i] - g[i]);
        }
        return n0(tmp) + t * n1(rem);
    };

    // starting points: all-A1, all-A0, midpoint, optional warm start
    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(n, 0.0));
    starts.push_back(fa);
    {
        std::vector<double> half(n);
        for (std::size_t i = 0; i < n; ++i) half[i] = 0.5 * fa[i];
        starts.push_back(std::move(half));
    }
    if (warm && warm->size() == n) {
        std::vector<double> w = *warm;
        for (std::size_t i = 0; i < n; ++i) w[i] = std::clamp(std::fabs(w[i]), 0.0, fa[i]);
        starts.push_back(std::move(w));
    }

    std::vector<double> best_g;
    double best = kInf;
    for (auto& g : starts) {
        const double v = objective(g);
        if (v < best) {
            best = v;
            best_g = g;
        }
    }

    std::vector<double> g = best_g;
    double cur = best;
    int pass = 0;
    for (; pass < opt.max_passes; ++pass) {
        const double before = cur;
        for (std::size_t i = 0; i < n; ++i) {
            if (fa[i] == 0.0) continue;
            const double gi =
                detail::golden_min([&](double x) { g[i] = x; return objective(g); }, 0.0,
                                   fa[i], opt.tol * fa[i] * 1e-2);
            g[i] = gi;
        }
        cur = objective(g);
        if (before - cur <= opt.tol * (std::fabs(cur) + 1e-300)) break;
    }
    if (pass == opt.max_passes && opt.throw_on_limit) throw MaxIterations(cur, cur - best);
    if (warm) *warm = g;
    return std::min(cur, best);
}

/// K-profile of the derived couple over a t-grid, with exact saturation tails
/// K ~ t ||f||_1 near 0 and K ~ ||f||_0 near inf.
inline KProfile k_oracle(const ConvexNorm& n0, const ConvexNorm& n1,
                         const std::vector<double>& f, const LogGrid& t_grid,
                         const OracleOptions& opt = {}) {
    std::vector<double> vals(t_grid.size());
    std::vector<double> warm;
    for (std::size_t i = 0; i < vals.size(); ++i)
        vals[i] = k_oracle_value(n0, n1, f, t_grid.point(i), &warm, opt);
    GridFunction fn(t_grid, std::move(vals));
    const double nf0 = n0(f), nf1 = n1(f);
    fn.set_lower_tail({1.0, 0.0, nf1});
    fn.set_upper_tail({0.0, 0.0, nf0});
    return KProfile{std::move(fn), "oracle"};
}

}  // namespace ri
