#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ri/errors.hpp"
#include "ri/log_grid.hpp"
#include "ri/sv.hpp"

namespace ri {

/// Diagnostics attached to a quadrature result.
struct QuadDiag {
    double tail_fraction = 0.0;  // share of the q-th power integral from outside the grid
};

namespace detail {

// Exponents of the q-th power integrand in x = ln u:
//   psi(x) ~ psi0 * exp(alpha (x - x0)) * ((1+|x|)/(1+|x0|))^Lambda,
// with a residual loglog exponent D that only settles borderline cases.
struct TailModel {
    double alpha = 0.0;
    double Lambda = 0.0;
    double D = 0.0;
    bool vanishes = false;
};

inline TailModel tail_model(const GridFunction& g, double theta, double q, const Sv& b,
                            Side side) {
    const TailDescriptor& d = side == Side::lower ? g.lower_tail() : g.upper_tail();
    const SvAsymptote a = b.asymptote(side);
    TailModel m;
    m.vanishes = d.vanishes();
    const double qq = std::isinf(q) ? 1.0 : q;
    m.alpha = qq * (d.power - theta);
    m.Lambda = qq * (d.log_power + a.log_pow);
    m.D = qq * a.loglog_pow;
    return m;
}

// Does the improper integral of the model over the infinite side converge?
// Lower side: x -> -inf needs alpha > 0; upper side: x -> +inf needs alpha < 0.
inline bool tail_converges(const TailModel& m, Side side) {
    constexpr double eps = 1e-9;
    if (m.vanishes) return true;
    const double a = side == Side::lower ? m.alpha : -m.alpha;
    if (a > eps) return true;
    if (a < -eps) return false;
    if (m.Lambda < -1.0 - eps) return true;
    if (m.Lambda > -1.0 + eps) return false;
    return m.D < -1.0 - eps;
}

// Is the model bounded toward the infinite side (for sup norms)?
inline bool tail_bounded(const TailModel& m, Side side) {
    constexpr double eps = 1e-9;
    if (m.vanishes) return true;
    const double a = side == Side::lower ? m.alpha : -m.alpha;
    if (a > eps) return true;
    if (a < -eps) return false;
    if (std::fabs(m.Lambda) <= eps) return m.D <= eps;
    return m.Lambda < 0.0;
}

// Integral of the model over the infinite side, anchored at (x0, psi0).
// Plain trapezoid in x with a slowly stretching step; the integrand is smooth
// and monotone apart from the log factor.
inline double improper_tail(double psi0, double x0, const TailModel& m, Side side) {
    if (m.vanishes || psi0 <= 0.0) return 0.0;
    const double dir = side == Side::lower ? -1.0 : 1.0;
    const double base = 1.0 + std::fabs(x0);
    auto model = [&](double x) {
        return psi0 * std::exp(m.alpha * (x - x0)) *
               std::pow((1.0 + std::fabs(x)) / base, m.Lambda);
    };
    double h = 0.05;
    double x = x0;
    double prev = model(x);
    double sum = 0.0;
    for (int k = 0; k < 400000; ++k) {
        const double xn = x + dir * h;
        const double cur = model(xn);
        const double inc = 0.5 * h * (prev + cur);
        sum += inc;
        x = xn;
        prev = cur;
        if (inc < 1e-14 * (sum + psi0)) break;
        if ((k & 511) == 511) h = std::min(h * 1.3, 2.0);
    }
    return sum;
}

// Supremum of the model over the infinite side (must be bounded).
inline double tail_sup(double phi0, double x0, const TailModel& m, Side side) {
    if (m.vanishes || phi0 <= 0.0) return 0.0;
    const double dir = side == Side::lower ? -1.0 : 1.0;
    const double base = 1.0 + std::fabs(x0);
    double best = phi0;
    double h = 0.25;
    double x = x0;
    for (int k = 0; k < 4000; ++k) {
        x += dir * h;
        const double v = phi0 * std::exp(m.alpha * (x - x0)) *
                         std::pow((1.0 + std::fabs(x)) / base, m.Lambda);
        best = std::max(best, v);
        if (v < 1e-14 * best) break;
        if ((k & 255) == 255) h = std::min(h * 1.3, 2.0);
    }
    return best;
}

}  // namespace detail

/// || u^{-theta-1/q} b(u) g(u) ||_{q,(lo,hi)} by trapezoid in ln u on q-th
/// powers, with the fitted tail term integrated past the grid when lo = 0 or
/// hi = inf.  q = inf means supremum on the grid.
inline double weighted_qnorm(const GridFunction& g, double theta, double q, const Sv& b,
                             double lo, double hi, QuadDiag* diag = nullptr) {
    const LogGrid& grid = g.grid();
    const std::size_t n = grid.size();
    auto phi = [&](double u, double gv) { return std::pow(u, -theta) * b(u) * gv; };

    const double clo = std::max(lo, grid.tmin);
    const double chi = std::min(hi, grid.tmax);
    const bool lower_open = lo <= 0.0;
    const bool upper_open = std::isinf(hi);

    if (std::isinf(q)) {
        double best = 0.0;
        if (chi >= clo) {
            const double flo = std::max(0.0, grid.locate(clo));
            const double fhi = std::min(static_cast<double>(n - 1), grid.locate(chi));
            const std::size_t i0 = static_cast<std::size_t>(std::ceil(flo - 1e-9));
            const std::size_t i1 = static_cast<std::size_t>(std::floor(fhi + 1e-9));
            for (std::size_t i = i0; i <= i1 && i < n; ++i)
                best = std::max(best, phi(grid.point(i), g.samples()[i]));
            best = std::max(best, phi(clo, g(clo)));
            best = std::max(best, phi(chi, g(chi)));
        }
        double tail_best = 0.0;
        if (lower_open) {
            const auto m = detail::tail_model(g, theta, kInf, b, Side::lower);
            if (!detail::tail_bounded(m, Side::lower))
                throw NonConvergent("essential supremum unbounded as u->0", m.alpha);
            tail_best = std::max(tail_best,
                                 detail::tail_sup(phi(grid.tmin, g.samples().front()),
                                                  std::log(grid.tmin), m, Side::lower));
        } else if (lo < grid.tmin) {
            tail_best = std::max(tail_best, phi(lo, g(lo)));
        }
        if (upper_open) {
            const auto m = detail::tail_model(g, theta, kInf, b, Side::upper);
            if (!detail::tail_bounded(m, Side::upper))
                throw NonConvergent("essential supremum unbounded as u->inf", m.alpha);
            tail_best = std::max(tail_best,
                                 detail::tail_sup(phi(grid.tmax, g.samples().back()),
                                                  std::log(grid.tmax), m, Side::upper));
        } else if (hi > grid.tmax) {
            tail_best = std::max(tail_best, phi(hi, g(hi)));
        }
        if (diag) diag->tail_fraction = tail_best > best ? 1.0 - best / tail_best : 0.0;
        return std::max(best, tail_best);
    }

    auto psi = [&](double u, double gv) {
        const double p = phi(u, gv);
        return p > 0.0 ? std::pow(p, q) : 0.0;
    };
    const double h = grid.log_step();
    double core = 0.0;
    if (chi > clo) {
        const double flo = std::max(0.0, grid.locate(clo));
        const double fhi = std::min(static_cast<double>(n - 1), grid.locate(chi));
        const std::size_t i0 = static_cast<std::size_t>(std::ceil(flo - 1e-9));
        const std::size_t i1 = static_cast<std::size_t>(std::floor(fhi + 1e-9));
        double prev = psi(grid.point(i0), g.samples()[i0]);
        for (std::size_t i = i0 + 1; i <= i1; ++i) {
            const double cur = psi(grid.point(i), g.samples()[i]);
            core += 0.5 * h * (prev + cur);
            prev = cur;
        }
        // fractional end cells
        if (flo < static_cast<double>(i0) - 1e-9) {
            const double xa = std::log(clo), xb = std::log(grid.point(i0));
            core += 0.5 * (xb - xa) * (psi(clo, g(clo)) + psi(grid.point(i0), g.samples()[i0]));
        }
        if (fhi > static_cast<double>(i1) + 1e-9) {
            const double xa = std::log(grid.point(i1)), xb = std::log(chi);
            core += 0.5 * (xb - xa) * (psi(grid.point(i1), g.samples()[i1]) + psi(chi, g(chi)));
        }
    }

    double tail = 0.0;
    if (lower_open) {
        const auto m = detail::tail_model(g, theta, q, b, Side::lower);
        if (!detail::tail_converges(m, Side::lower))
            throw NonConvergent("integral diverges as u->0, power exponent " +
                                    std::to_string(m.alpha / q),
                                m.alpha / q);
        tail += detail::improper_tail(psi(grid.tmin, g.samples().front()), std::log(grid.tmin),
                                      m, Side::lower);
    } else if (lo < grid.tmin && clo > lo) {
        const double xa = std::log(lo), xb = std::log(grid.tmin);
        tail += 0.5 * (xb - xa) * (psi(lo, g(lo)) + psi(grid.tmin, g.samples().front()));
    }
    if (upper_open) {
        const auto m = detail::tail_model(g, theta, q, b, Side::upper);
        if (!detail::tail_converges(m, Side::upper))
            throw NonConvergent("integral diverges as u->inf, power exponent " +
                                    std::to_string(m.alpha / q),
                                m.alpha / q);
        tail += detail::improper_tail(psi(grid.tmax, g.samples().back()), std::log(grid.tmax),
                                      m, Side::upper);
    } else if (hi > grid.tmax && chi < hi) {
        const double xa = std::log(grid.tmax), xb = std::log(hi);
        tail += 0.5 * (xb - xa) * (psi(grid.tmax, g.samples().back()) + psi(hi, g(hi)));
    }

    const double total = core + tail;
    if (diag) diag->tail_fraction = total > 0.0 ? tail / total : 0.0;
    return total > 0.0 ? std::pow(total, 1.0 / q) : 0.0;
}

/// One sweep of the inner norms of the limiting-space definitions:
///   lower: t -> || u^{-sigma-1/q} a(u) g(u) ||_{q,(0,t)}
///   upper: t -> || u^{-sigma-1/q} a(u) g(u) ||_{q,(t,cap)}   (cap = inf by default)
/// Prefix/suffix accumulation over the grid of g; endpoint values agree with
/// weighted_qnorm over the full interval.
inline GridFunction partial_qnorm(const GridFunction& g, double sigma, double q, const Sv& a,
                                  Side side, double cap = kInf) {
    const LogGrid& grid = g.grid();
    const std::size_t n = grid.size();
    const double h = grid.log_step();
    auto phi = [&](double u, double gv) { return std::pow(u, -sigma) * a(u) * gv; };
    std::vector<double> phis(n);
    for (std::size_t i = 0; i < n; ++i) phis[i] = phi(grid.point(i), g.samples()[i]);

    std::vector<double> out(n, 0.0);
    if (std::isinf(q)) {
        if (side == Side::lower) {
            const auto m = detail::tail_model(g, sigma, kInf, a, Side::lower);
            if (!detail::tail_bounded(m, Side::lower))
                throw NonConvergent("inner supremum unbounded as u->0", m.alpha);
            double run = detail::tail_sup(phis[0], std::log(grid.tmin), m, Side::lower);
            for (std::size_t i = 0; i < n; ++i) {
                run = std::max(run, phis[i]);
                out[i] = run;
            }
        } else {
            double run = 0.0;
            if (std::isinf(cap)) {
                const auto m = detail::tail_model(g, sigma, kInf, a, Side::upper);
                if (!detail::tail_bounded(m, Side::upper))
                    throw NonConvergent("inner supremum unbounded as u->inf", m.alpha);
                run = detail::tail_sup(phis[n - 1], std::log(grid.tmax), m, Side::upper);
            }
            for (std::size_t i = n; i-- > 0;) {
                if (grid.point(i) <= cap) run = std::max(run, phis[i]);
                out[i] = run;
            }
        }
    } else {
        std::vector<double> psis(n);
        for (std::size_t i = 0; i < n; ++i)
            psis[i] = phis[i] > 0.0 ? std::pow(phis[i], q) : 0.0;
        if (side == Side::lower) {
            const auto m = detail::tail_model(g, sigma, q, a, Side::lower);
            if (!detail::tail_converges(m, Side::lower))
                throw NonConvergent("inner integral diverges as u->0", m.alpha / q);
            double acc = detail::improper_tail(psis[0], std::log(grid.tmin), m, Side::lower);
            out[0] = std::pow(acc, 1.0 / q);
            for (std::size_t i = 1; i < n; ++i) {
                acc += 0.5 * h * (psis[i - 1] + psis[i]);
                out[i] = std::pow(acc, 1.0 / q);
            }
        } else {
            double acc = 0.0;
            if (std::isinf(cap)) {
                const auto m = detail::tail_model(g, sigma, q, a, Side::upper);
                if (!detail::tail_converges(m, Side::upper))
                    throw NonConvergent("inner integral diverges as u->inf", m.alpha / q);
                acc = detail::improper_tail(psis[n - 1], std::log(grid.tmax), m, Side::upper);
                out[n - 1] = std::pow(acc, 1.0 / q);
            }
            // walk down, adding cells fully below the cap
            for (std::size_t i = n - 1; i-- > 0;) {
                const double u0 = grid.point(i), u1 = grid.point(i + 1);
                if (u0 >= cap) {
                    out[i] = std::pow(acc, 1.0 / q);
                    continue;
                }
                if (u1 <= cap) {
                    acc += 0.5 * h * (psis[i] + psis[i + 1]);
                } else {
                    const double xa = std::log(u0), xb = std::log(cap);
                    const double pc = phi(cap, g(cap));
                    acc += 0.5 * (xb - xa) * (psis[i] + (pc > 0.0 ? std::pow(pc, q) : 0.0));
                }
                out[i] = std::pow(acc, 1.0 / q);
            }
        }
    }
    GridFunction res(grid, std::move(out));
    res.fit_tails();
    return res;
}

}  // namespace ri
