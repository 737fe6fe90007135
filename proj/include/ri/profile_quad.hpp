#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ri/errors.hpp"
#include "ri/kfunc.hpp"
#include "ri/quad.hpp"
#include "ri/sv.hpp"

namespace ri {

/// Piecewise-constant non-negative function on (0,inf): value values[i] on
/// (edges[i-1], edges[i]), zero beyond the last edge.  Unlike
/// DecreasingProfile, no monotonicity is required.
struct Staircase {
    std::vector<double> edges;
    std::vector<double> values;

    static Staircase of(const DecreasingProfile& p) { return {p.edges(), p.values()}; }

    double at(double t) const {
        auto it = std::upper_bound(edges.begin(), edges.end(), t);
        if (it == edges.end()) return 0.0;
        return values[static_cast<std::size_t>(it - edges.begin())];
    }

    double integral(double t) const {
        double acc = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const double hi = std::min(t, edges[i]);
            if (hi <= prev) break;
            acc += values[i] * (hi - prev);
            prev = edges[i];
        }
        return acc;
    }
};

namespace detail {

// Merged integration nodes: staircase edges plus log-uniform filler points.
inline std::vector<double> merged_nodes(const Staircase& g, double lo, double hi,
                                        double log_step) {
    std::vector<double> nodes;
    nodes.push_back(lo);
    for (double e : g.edges)
        if (e > lo && e < hi) nodes.push_back(e);
    nodes.push_back(hi);
    std::sort(nodes.begin(), nodes.end());
    std::vector<double> full;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        full.push_back(nodes[i]);
        const double span = std::log(nodes[i + 1] / nodes[i]);
        const int sub = static_cast<int>(std::ceil(span / log_step));
        for (int k = 1; k < sub; ++k)
            full.push_back(nodes[i] * std::exp(span * k / sub));
    }
    full.push_back(nodes.back());
    return full;
}

}  // namespace detail

/// || u^{-theta-1/q} b(u) g(u) ||_{q,(lo,hi)} for a staircase g, integrating the
/// smooth weight exactly piece by piece (no interpolation across jumps).
inline double staircase_qnorm(const Staircase& g, double theta, double q, const Sv& b,
                              double lo, double hi, const LogGrid& grid = LogGrid{}) {
    const double h = grid.log_step();
    const double support = g.edges.empty() ? 0.0 : g.edges.back();
    const double chi = std::min(hi, support);
    double clo = lo;
    double lower_improper = 0.0;

    auto weight = [&](double u) { return std::pow(u, -theta) * b(u); };

    const bool first_nonzero = !g.values.empty() && g.values.front() > 0.0;
    if (lo <= 0.0) {
        if (!first_nonzero) {
            // leading zero pieces: start at the first edge with a nonzero value
            double start = support;
            double prev = 0.0;
            for (std::size_t i = 0; i < g.values.size(); ++i) {
                if (g.values[i] > 0.0) {
                    start = prev;
                    break;
                }
                prev = g.edges[i];
            }
            clo = start;
        } else {
            // constant piece down to 0: numeric part to a cutoff, model below
            const double anchor = std::min(chi, g.edges.front());
            const double cutoff = std::min(anchor, grid.tmin) * 1e-4;
            clo = anchor;
            TailDescriptor td{0.0, 0.0, g.values.front()};
            const SvAsymptote ab = b.asymptote(Side::lower);
            detail::TailModel m;
            const double qq = std::isinf(q) ? 1.0 : q;
            m.alpha = qq * (0.0 - theta);
            m.Lambda = qq * ab.log_pow;
            m.D = qq * ab.loglog_pow;
            m.vanishes = false;
            if (std::isinf(q)) {
                if (!detail::tail_bounded(m, Side::lower))
                    throw NonConvergent("supremum unbounded as u->0", m.alpha);
            } else if (!detail::tail_converges(m, Side::lower)) {
                throw NonConvergent("integral diverges as u->0, power exponent " +
                                        std::to_string(-theta),
                                    -theta);
            }
            if (std::isinf(q)) {
                const double phi0 = weight(cutoff) * td.scale;
                lower_improper = detail::tail_sup(phi0, std::log(cutoff), m, Side::lower);
            } else {
                const double psi0 = std::pow(weight(cutoff) * td.scale, q);
                lower_improper = detail::improper_tail(psi0, std::log(cutoff), m, Side::lower);
            }
            // numeric part (cutoff, anchor) handled by extending the node list
            clo = cutoff;
        }
    }
    if (chi <= clo) {
        if (std::isinf(q)) return lower_improper;
        return lower_improper > 0.0 ? std::pow(lower_improper, 1.0 / q) : 0.0;
    }

    const auto nodes = detail::merged_nodes(g, clo, chi, h);
    if (std::isinf(q)) {
        double best = lower_improper;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double mid = std::sqrt(nodes[i] * nodes[i + 1]);
            const double v = g.at(mid);
            if (v <= 0.0) continue;
            best = std::max(best, weight(nodes[i]) * v);
            best = std::max(best, weight(nodes[i + 1]) * v);
        }
        return best;
    }
    double acc = lower_improper;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double mid = std::sqrt(nodes[i] * nodes[i + 1]);
        const double v = g.at(mid);
        if (v <= 0.0) continue;
        const double xa = std::log(nodes[i]), xb = std::log(nodes[i + 1]);
        const double wa = std::pow(weight(nodes[i]) * v, q);
        const double wb = std::pow(weight(nodes[i + 1]) * v, q);
        acc += 0.5 * (xb - xa) * (wa + wb);
    }
    return acc > 0.0 ? std::pow(acc, 1.0 / q) : 0.0;
}

/// t -> || u^{-sigma-1/q} a(u) g(u) ||_{q,(0,t)} (lower) or (t,cap) (upper),
/// staircase-exact, returned sampled on the grid.
inline GridFunction staircase_partial_qnorm(const Staircase& g, double sigma, double q,
                                            const Sv& a, Side side,
                                            const LogGrid& grid = LogGrid{},
                                            double cap = kInf) {
    const std::size_t n = grid.size();
    std::vector<double> out(n);
    const double top = std::isinf(cap) ? grid.tmax * 2.0 : cap;
    if (side == Side::lower) {
        // cumulative along merged nodes; record at grid points
        std::vector<double> cum(n, 0.0);
        double running = 0.0;
        // contribution below tmin (or below the first grid point)
        running = std::isinf(q)
                      ? std::pow(staircase_qnorm(g, sigma, q, a, 0.0, grid.tmin, grid), 1.0)
                      : std::pow(staircase_qnorm(g, sigma, q, a, 0.0, grid.tmin, grid), q);
        cum[0] = running;
        for (std::size_t i = 1; i < n; ++i) {
            const double piece = staircase_qnorm(g, sigma, q, a, grid.point(i - 1),
                                                 grid.point(i), grid);
            if (std::isinf(q))
                running = std::max(running, piece);
            else
                running += std::pow(piece, q);
            cum[i] = running;
        }
        for (std::size_t i = 0; i < n; ++i)
            out[i] = std::isinf(q) ? cum[i] : (cum[i] > 0.0 ? std::pow(cum[i], 1.0 / q) : 0.0);
    } else {
        double running = 0.0;
        if (std::isinf(cap)) {
            const double piece = staircase_qnorm(g, sigma, q, a, grid.tmax, top, grid);
            running = std::isinf(q) ? piece : std::pow(piece, q);
        }
        std::vector<double> cum(n, 0.0);
        cum[n - 1] = running;
        for (std::size_t i = n - 1; i-- > 0;) {
            const double lo = grid.point(i);
            const double hi = std::min(grid.point(i + 1), top);
            if (hi > lo) {
                const double piece = staircase_qnorm(g, sigma, q, a, lo, hi, grid);
                if (std::isinf(q))
                    running = std::max(running, piece);
                else
                    running += std::pow(piece, q);
            }
            cum[i] = running;
        }
        for (std::size_t i = 0; i < n; ++i)
            out[i] = std::isinf(q) ? cum[i] : (cum[i] > 0.0 ? std::pow(cum[i], 1.0 / q) : 0.0);
    }
    GridFunction res(grid, std::move(out));
    res.fit_tails();
    return res;
}

}  // namespace ri
