#pragma once

#include <string>
#include <utility>

#include "ri/errors.hpp"
#include "ri/quad.hpp"
#include "ri/sv.hpp"

namespace ri {

/// Tabulated slowly varying function produced by a tail-integral functional,
/// with the provenance of the defining integral attached.
struct NumericSv {
    Sv fn;       // Tabulated node (or closed form when one is known)
    Sv source;   // the integrand's SV factor
    double r = 1.0;
    Side side = Side::upper;

    operator const Sv&() const { return fn; }
    double operator()(double t) const { return fn(t); }
};

/// c(t) = || s^{-1/r} b(s) ||_{r,(0,t)}  (lower)  or  ||...||_{r,(t,inf)}  (upper),
/// materialized on the working grid with fitted log-power tails.
/// Monotone in t by construction (prefix/suffix accumulation).
inline NumericSv tail_qnorm(const Sv& b, double r, Side side, const LogGrid& grid = LogGrid{}) {
    const HalfLine hl = side == Side::lower ? HalfLine::zero_one : HalfLine::one_inf;
    const FinitenessVerdict fin = check_finite(b, r, hl);
    if (!fin.finite)
        throw DivergentTail(side == Side::lower ? "lower" : "upper",
                            b.asymptote(side == Side::lower ? Side::lower : Side::upper).log_pow);
    GridFunction ones(grid, std::vector<double>(grid.size(), 1.0));
    ones.set_lower_tail({0.0, 0.0, 1.0});
    ones.set_upper_tail({0.0, 0.0, 1.0});
    GridFunction c = partial_qnorm(ones, 0.0, r, b, side);
    return NumericSv{Sv::tabulated(std::move(c)), b, r, side};
}

}  // namespace ri
