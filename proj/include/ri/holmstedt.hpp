#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ri/errors.hpp"
#include "ri/kfunc.hpp"
#include "ri/quad.hpp"
#include "ri/sv.hpp"
#include "ri/sv_numeric.hpp"
#include "ri/verify.hpp"

namespace ri {

/// One verification run of a two-sided K-functional formula on a discrete
/// couple.  theta0/r0/b0 are used by T17 only.
struct HolmstedtInstance {
    enum class Theorem { t14, t17 };
    Theorem theorem = Theorem::t14;

    double theta0 = 0.0;
    double r0 = 1.0;
    Sv b0 = Sv::one();

    double theta1 = 0.5;
    double r1 = 1.0;
    Sv b1 = Sv::one();
    double q1 = 1.0;
    Sv a1 = Sv::one();

    DiscreteCouple couple;
    LogGrid t_grid{1e-2, 1e2, 4};
    LogGrid eval_grid{1e-6, 1e6, 8};

    void check() const {
        couple.validate();
        if (!(theta1 > 0.0 && theta1 < 1.0))
            throw HypothesisFailed("0 < theta1 < 1");
        if (theorem == Theorem::t17 && !(theta0 > 0.0 && theta0 < theta1))
            throw HypothesisFailed("0 < theta0 < theta1 < 1");
        if (r1 < 1.0 || q1 < 1.0 || (theorem == Theorem::t17 && r0 < 1.0))
            throw NonConvexIndices("oracle verification requires all indices >= 1");
        const auto fin = check_finite(b1 / a1, r1, HalfLine::one_inf);
        if (!fin.finite)
            throw HypothesisFailed("||s^{-1/r1} b1/a1||_{r1,(1,inf)} < inf — " +
                                   fin.diagnostic);
    }
};

/// Four decades of t centered at the couple's weight-ratio median.
inline LogGrid holmstedt_t_grid(const DiscreteCouple& c, int points_per_decade = 4) {
    std::vector<double> ratio(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) ratio[i] = c.w0[i] / c.w1[i];
    std::sort(ratio.begin(), ratio.end());
    const double med = ratio[ratio.size() / 2];
    return LogGrid{med * 1e-2, med * 1e2, points_per_decade};
}

namespace detail {

/// D(t) = || s^{-1/r} ba(s) * Inner(t,s) ||_{r,(t,inf)},
/// Inner(t,s) = || u^{-theta-1/q} a(u) g(u) ||_{q,(t,s)},
/// with prefix sums over g's grid precomputed once per g.
class DoubleNorm {
public:
    DoubleNorm(const GridFunction& g, double theta, double q, Sv a, double r, Sv ba)
        : g_(g), theta_(theta), q_(q), r_(r), a_(std::move(a)), ba_(std::move(ba)) {
        const LogGrid& grid = g_.grid();
        n_ = grid.size();
        phi_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double u = grid.point(j);
            phi_[j] = std::pow(u, -theta_) * a_(u) * g_.samples()[j];
        }
        wba_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) wba_[j] = ba_(grid.point(j));
        if (!std::isinf(q_)) {
            prefix_.assign(n_, 0.0);
            const double h = grid.log_step();
            for (std::size_t j = 1; j < n_; ++j)
                prefix_[j] = prefix_[j - 1] +
                             0.5 * h * (powq(phi_[j - 1]) + powq(phi_[j]));
            // inner remainder above the grid: g ~ const, alpha = -q*theta < 0
            const TailModel m =
                tail_model(g_, theta_, q_, a_, Side::upper);
            if (!tail_converges(m, Side::upper))
                throw NonConvergent("inner integral diverges as u->inf", m.alpha / q_);
            inner_rest_ = improper_tail(powq(phi_[n_ - 1]),
                                        std::log(grid.tmax), m, Side::upper);
        }
    }

    double operator()(double t) const {
        const LogGrid& grid = g_.grid();
        if (!(t > 0.0)) throw RangeError("DoubleNorm evaluated at t <= 0");
        const double tc = std::min(std::max(t, grid.tmin), grid.tmax);
        const double x = grid.locate(tc);
        std::size_t i0 = static_cast<std::size_t>(std::ceil(x - 1e-9));
        if (i0 >= n_) i0 = n_ - 1;
        const double phit = std::pow(tc, -theta_) * a_(tc) * g_(tc);
        const double h = grid.log_step();
        const double frac = std::log(grid.point(i0) / tc);

        if (std::isinf(q_)) return eval_sup_inner(tc, i0, phit, frac);

        // inner q-th power from t to grid point j (j >= i0)
        const double Pt = (i0 > 0 ? prefix_[i0] : 0.0) -
                          (frac > 0.0 ? 0.5 * frac * (powq(phit) + powq(phi_[i0])) : 0.0);
        auto inner_q = [&](std::size_t j) { return std::max(0.0, prefix_[j] - Pt); };
        const double inner_full = std::pow(inner_q(n_ - 1) + inner_rest_,
                                           1.0 / q_);

        if (std::isinf(r_)) {
            double best = 0.0;
            for (std::size_t j = i0; j < n_; ++j)
                best = std::max(best, wba_[j] * std::pow(inner_q(j), 1.0 / q_));
            best = std::max(best, upper_sup(wba_[n_ - 1] * inner_full));
            return best;
        }
        double acc = 0.0;
        auto psi_out = [&](std::size_t j) {
            const double v = wba_[j] * std::pow(inner_q(j), 1.0 / q_);
            return v > 0.0 ? std::pow(v, r_) : 0.0;
        };
        for (std::size_t j = i0; j + 1 < n_; ++j)
            acc += 0.5 * h * (psi_out(j) + psi_out(j + 1));
        if (frac > 0.0 && i0 > 0) {
            // fractional start cell (t, u_{i0}); inner vanishes at s = t
            acc += 0.5 * frac * psi_out(i0);
        }
        acc += upper_tail(std::pow(wba_[n_ - 1] * inner_full, r_));
        return acc > 0.0 ? std::pow(acc, 1.0 / r_) : 0.0;
    }

private:
    double powq(double v) const { return v > 0.0 ? std::pow(v, q_) : 0.0; }

    double eval_sup_inner(double tc, std::size_t i0, double phit, double frac) const {
        // Inner(t,s) = sup of phi over [t,s]; outer over s in (t,inf)
        const LogGrid& grid = g_.grid();
        const double h = grid.log_step();
        double run = phit;
        double acc = 0.0;
        double best = 0.0;
        double prev_psi = 0.0;
        bool have_prev = false;
        for (std::size_t j = i0; j < n_; ++j) {
            run = std::max(run, phi_[j]);
            const double v = wba_[j] * run;
            if (std::isinf(r_)) {
                best = std::max(best, v);
            } else {
                const double psi = v > 0.0 ? std::pow(v, r_) : 0.0;
                if (have_prev) acc += 0.5 * h * (prev_psi + psi);
                else if (frac > 0.0) acc += 0.5 * frac * psi;
                prev_psi = psi;
                have_prev = true;
            }
        }
        // past the grid the inner sup is exhausted (phi ~ u^{-theta1} -> 0)
        if (std::isinf(r_)) return std::max(best, upper_sup(wba_[n_ - 1] * run));
        acc += upper_tail(std::pow(std::max(wba_[n_ - 1] * run, 0.0), r_));
        return acc > 0.0 ? std::pow(acc, 1.0 / r_) : 0.0;
    }

    // outer improper tail past tmax: inner is essentially constant there
    double upper_tail(double psi0) const {
        const SvAsymptote ab = ba_.asymptote(Side::upper);
        TailModel m;
        m.alpha = 0.0;
        m.Lambda = r_ * ab.log_pow;
        m.D = r_ * ab.loglog_pow;
        m.vanishes = psi0 <= 0.0;
        if (!tail_converges(m, Side::upper))
            throw NonConvergent("outer integral diverges as s->inf", 0.0);
        return improper_tail(psi0, std::log(g_.grid().tmax), m, Side::upper);
    }
    double upper_sup(double phi0) const {
        const SvAsymptote ab = ba_.asymptote(Side::upper);
        TailModel m;
        m.alpha = 0.0;
        m.Lambda = ab.log_pow;
        m.D = ab.loglog_pow;
        m.vanishes = phi0 <= 0.0;
        if (!tail_bounded(m, Side::upper))
            throw NonConvergent("outer supremum unbounded as s->inf", 0.0);
        return tail_sup(phi0, std::log(g_.grid().tmax), m, Side::upper);
    }

    GridFunction g_;
    double theta_, q_, r_;
    Sv a_, ba_;
    std::size_t n_ = 0;
    std::vector<double> phi_, wba_, prefix_;
    double inner_rest_ = 0.0;
};

}  // namespace detail

/// c1(t) = a1(t) ||s^{-1/r1} b1/a1||_{r1,(t,inf)} and rho(t) of the instance.
inline Sv holmstedt_c1(const HolmstedtInstance& inst) {
    return inst.a1 * tail_qnorm(inst.b1 / inst.a1, inst.r1, Side::upper, inst.eval_grid).fn;
}

inline double holmstedt_rho(const HolmstedtInstance& inst, const Sv& c1, double t) {
    if (inst.theorem == HolmstedtInstance::Theorem::t14)
        return std::pow(t, inst.theta1) / c1(t);
    return std::pow(t, inst.theta1 - inst.theta0) * inst.b0(t) / c1(t);
}

/// Right side of the T14 formula, sampled over the instance's t-grid:
/// K(t) + rho(t) * double-norm(t).
inline GridFunction rhs_t14(const KProfile& K, const HolmstedtInstance& inst) {
    const Sv c1 = holmstedt_c1(inst);
    detail::DoubleNorm D(K.fn, inst.theta1, inst.q1, inst.a1, inst.r1,
                         inst.b1 / inst.a1);
    std::vector<double> vals(inst.t_grid.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double t = inst.t_grid.point(i);
        vals[i] = K.fn(t) + holmstedt_rho(inst, c1, t) * D(t);
    }
    GridFunction out(inst.t_grid, std::move(vals));
    out.fit_tails();
    return out;
}

/// Right side of eq. (11): prefix standard norm + rho(t) * double-norm(t).
inline GridFunction rhs_t17(const KProfile& K, const HolmstedtInstance& inst) {
    const Sv c1 = holmstedt_c1(inst);
    detail::DoubleNorm D(K.fn, inst.theta1, inst.q1, inst.a1, inst.r1,
                         inst.b1 / inst.a1);
    const GridFunction prefix =
        partial_qnorm(K.fn, inst.theta0, inst.r0, inst.b0, Side::lower);
    std::vector<double> vals(inst.t_grid.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double t = inst.t_grid.point(i);
        vals[i] = prefix(t) + holmstedt_rho(inst, c1, t) * D(t);
    }
    GridFunction out(inst.t_grid, std::move(vals));
    out.fit_tails();
    return out;
}

/// LHS K(rho(t), f; X0, X1) by the convex oracle vs rhs_t14/rhs_t17, over the
/// instance's t-grid and the given family of coefficient sequences.
inline RatioReport verify(const HolmstedtInstance& inst,
                          const std::vector<std::vector<double>>& family,
                          const OracleOptions& oracle = {1e-3, 6, false}) {
    inst.check();
    if (family.empty()) throw RangeError("holmstedt verification needs a nonempty family");
    const bool t17 = inst.theorem == HolmstedtInstance::Theorem::t17;
    const SpaceDescriptor x1d =
        make_llim(inst.theta1, inst.r1, inst.b1, inst.q1, inst.a1);
    const ConvexNorm x1 = descriptor_norm_on_couple(x1d, inst.couple, inst.eval_grid);
    ConvexNorm x0;
    if (t17) {
        x0 = descriptor_norm_on_couple(make_standard(inst.theta0, inst.r0, inst.b0),
                                       inst.couple, inst.eval_grid);
    } else {
        const DiscreteCouple c = inst.couple;
        x0 = ConvexNorm{[c](const std::vector<double>& f) { return c.norm(0, f); }, 1.0};
    }
    const Sv c1 = holmstedt_c1(inst);

    RatioReport rep;
    for (std::size_t fi = 0; fi < family.size(); ++fi) {
        const auto& f = family[fi];
        const KProfile K = exact_k_profile(inst.couple, f, inst.eval_grid);
        const GridFunction rhs = t17 ? rhs_t17(K, inst) : rhs_t14(K, inst);
        std::vector<double> warm;
        for (std::size_t i = 0; i < inst.t_grid.size(); ++i) {
            const double t = inst.t_grid.point(i);
            const double lhs = k_oracle_value(x0, x1, f, holmstedt_rho(inst, c1, t),
                                              &warm, oracle);
            rep.add(t, static_cast<int>(fi), lhs, rhs.samples()[i]);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Proof-internal auxiliary functions (band-checked by the test suite).

/// g1(t) = t * double-norm(t) with g == 1.
inline double aux_g1(const HolmstedtInstance& inst, double t) {
    GridFunction ones(inst.eval_grid,
                      std::vector<double>(inst.eval_grid.size(), 1.0));
    ones.set_lower_tail({0.0, 0.0, 1.0});
    ones.set_upper_tail({0.0, 0.0, 1.0});
    detail::DoubleNorm D(ones, inst.theta1, inst.q1, inst.a1, inst.r1,
                         inst.b1 / inst.a1);
    return t * D(t);
}

/// h1(t) = || s^{-1/r1} (b1/a1)(s) F(min(t,s)) ||_{r1,(0,inf)} with
/// F(x) = || u^{1-theta1-1/q1} a1 ||_{q1,(0,x)}.
inline double aux_h1(const HolmstedtInstance& inst, double t) {
    GridFunction ones(inst.eval_grid,
                      std::vector<double>(inst.eval_grid.size(), 1.0));
    ones.set_lower_tail({0.0, 0.0, 1.0});
    ones.set_upper_tail({0.0, 0.0, 1.0});
    const GridFunction F =
        partial_qnorm(ones, inst.theta1 - 1.0, inst.q1, inst.a1, Side::lower);
    GridFunction H = GridFunction::sample(inst.eval_grid,
                                          [&](double s) { return F(std::min(t, s)); });
    H.set_lower_tail(F.lower_tail());
    H.set_upper_tail({0.0, 0.0, F(t)});
    return weighted_qnorm(H, 0.0, inst.r1, inst.b1 / inst.a1, 0.0, kInf);
}

/// g0(t) = t * || u^{-theta0-1/r0} b0 ||_{r0,(t,inf)}.
inline double aux_g0(const HolmstedtInstance& inst, double t) {
    GridFunction ones(inst.eval_grid,
                      std::vector<double>(inst.eval_grid.size(), 1.0));
    ones.set_lower_tail({0.0, 0.0, 1.0});
    ones.set_upper_tail({0.0, 0.0, 1.0});
    const GridFunction s =
        partial_qnorm(ones, inst.theta0, inst.r0, inst.b0, Side::upper);
    return t * s(t);
}

/// h0(t) = || u^{1-theta0-1/r0} b0 ||_{r0,(0,t)}.
inline double aux_h0(const HolmstedtInstance& inst, double t) {
    GridFunction ones(inst.eval_grid,
                      std::vector<double>(inst.eval_grid.size(), 1.0));
    ones.set_lower_tail({0.0, 0.0, 1.0});
    ones.set_upper_tail({0.0, 0.0, 1.0});
    const GridFunction s =
        partial_qnorm(ones, inst.theta0 - 1.0, inst.r0, inst.b0, Side::lower);
    return s(t);
}

}  // namespace ri
