#pragma once

// Shared fixtures and independent oracles used by the unit tests and the
// acceptance runner.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ri/families.hpp"
#include "ri/holmstedt.hpp"
#include "ri/kfunc.hpp"
#include "ri/profile_quad.hpp"
#include "ri/quad.hpp"
#include "ri/reiteration.hpp"
#include "ri/spaces.hpp"
#include "ri/sv.hpp"
#include "ri/sv_numeric.hpp"
#include "ri/verify.hpp"

namespace ritest {

inline double rel_err(double got, double expect) {
    return std::fabs(got - expect) / std::fabs(expect);
}

// ---------------------------------------------------------------------------
// Sampled reference functions with exact tail descriptors.

inline ri::GridFunction fn_min_t_1(const ri::LogGrid& grid) {
    ri::GridFunction g = ri::GridFunction::sample(grid, [](double u) { return std::min(u, 1.0); });
    g.set_lower_tail({1.0, 0.0, 1.0});
    g.set_upper_tail({0.0, 0.0, 1.0});
    return g;
}

inline ri::GridFunction fn_one(const ri::LogGrid& grid) {
    ri::GridFunction g(grid, std::vector<double>(grid.size(), 1.0));
    g.set_lower_tail({0.0, 0.0, 1.0});
    g.set_upper_tail({0.0, 0.0, 1.0});
    return g;
}

inline ri::GridFunction fn_two_sqrt(const ri::LogGrid& grid) {
    ri::GridFunction g =
        ri::GridFunction::sample(grid, [](double u) { return 2.0 * std::sqrt(u); });
    g.set_lower_tail({0.5, 0.0, 2.0});
    g.set_upper_tail({0.5, 0.0, 2.0});
    return g;
}

inline ri::GridFunction fn_identity(const ri::LogGrid& grid) {
    ri::GridFunction g = ri::GridFunction::sample(grid, [](double u) { return u; });
    g.set_lower_tail({1.0, 0.0, 1.0});
    g.set_upper_tail({1.0, 0.0, 1.0});
    return g;
}

inline ri::KProfile chi01_k(const ri::LogGrid& grid) {
    return ri::k_l1_linf(ri::DecreasingProfile({1.0}, {1.0}), grid);
}

// ---------------------------------------------------------------------------
// Hand-integrable weighted_qnorm cases (12 of them), with exact values.

struct ClosedFormCase {
    std::string name;
    double exact;
    std::function<double(const ri::LogGrid&)> compute;
};

inline std::vector<ClosedFormCase> closed_form_cases() {
    using ri::kInf;
    using ri::Sv;
    const Sv one = Sv::one();
    std::vector<ClosedFormCase> cases;
    cases.push_back({"min(u,1), theta=1/2, q=2", std::sqrt(2.0), [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_min_t_1(g), 0.5, 2.0, one, 0.0, kInf);
                     }});
    cases.push_back({"g=1, theta=0, q=inf", 1.0, [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_one(g), 0.0, kInf, one, 0.0, kInf);
                     }});
    cases.push_back({"g=2*sqrt(u), theta=1/2, q=inf", 2.0, [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_two_sqrt(g), 0.5, kInf, one, 0.0, kInf);
                     }});
    cases.push_back({"min(u,1), theta=1/4, q=1", 16.0 / 3.0, [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_min_t_1(g), 0.25, 1.0, one, 0.0, kInf);
                     }});
    cases.push_back({"min(u,1), theta=3/4, q=1", 16.0 / 3.0, [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_min_t_1(g), 0.75, 1.0, one, 0.0, kInf);
                     }});
    cases.push_back({"min(u,1), theta=1/2, q=1", 4.0, [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_min_t_1(g), 0.5, 1.0, one, 0.0, kInf);
                     }});
    cases.push_back({"g=1, theta=1/2, q=2 on (1,inf)", 1.0, [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_one(g), 0.5, 2.0, one, 1.0, kInf);
                     }});
    cases.push_back({"g=1, theta=-1/2, q=2 on (0,1)", 1.0, [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_one(g), -0.5, 2.0, one, 0.0, 1.0);
                     }});
    // int_0^inf e^{-|x|/2}(1+|x|) dx = 2 * (2 + 4) = 12
    cases.push_back({"min(u,1), theta=1/2, q=1, b=log", 12.0, [](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_min_t_1(g), 0.5, 1.0, ri::Sv::log_pow(1.0),
                                                   0.0, kInf);
                     }});
    // int_0^inf e^{-|x|}(1+|x|)^2 dx = 2 * 5 = 10
    cases.push_back({"min(u,1), theta=1/2, q=2, b=log", std::sqrt(10.0),
                     [](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_min_t_1(g), 0.5, 2.0, ri::Sv::log_pow(1.0),
                                                   0.0, kInf);
                     }});
    cases.push_back({"g=1, theta=0, q=inf, b=1/log", 1.0, [](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_one(g), 0.0, kInf, ri::Sv::log_pow(-1.0),
                                                   0.0, kInf);
                     }});
    // int_1^100 u^{1/2} du = (2/3)(1000 - 1) = 666
    cases.push_back({"g=u, theta=1/4, q=2 on (1,100)", std::sqrt(666.0),
                     [=](const ri::LogGrid& g) {
                         return ri::weighted_qnorm(fn_identity(g), 0.25, 2.0, one, 1.0, 100.0);
                     }});
    return cases;
}

// ---------------------------------------------------------------------------
// Hardy-inequality machinery: prefix (nu < 0) / suffix (nu > 0) integral of a
// non-negative staircase vs the weighted norm of the staircase itself.

// Random staircase vanishing near 0 (first piece value 0), compactly supported.
inline ri::Staircase random_staircase(ri::FamilyGen& gen) {
    const int k = 2 + static_cast<int>(gen.index(5));
    std::vector<double> edges, values;
    double e = gen.log_uniform(1e-2, 1e-1);
    edges.push_back(e);
    values.push_back(0.0);
    for (int i = 0; i < k; ++i) {
        e *= gen.log_uniform(1.5, 8.0);
        edges.push_back(e);
        values.push_back(gen.log_uniform(0.1, 10.0));
    }
    return {std::move(edges), std::move(values)};
}

// || t^{nu - 1/P} b(t) * (integral of g over (0,t) or (t,inf)) ||_P
inline double hardy_lhs(const ri::Staircase& g, double nu, double P, const ri::Sv& b,
                        const ri::LogGrid& grid) {
    const double total = g.integral(g.edges.back());
    ri::GridFunction G =
        nu < 0.0 ? ri::GridFunction::sample(grid, [&](double t) { return g.integral(t); })
                 : ri::GridFunction::sample(
                       grid, [&](double t) { return std::max(0.0, total - g.integral(t)); });
    if (nu < 0.0) {
        G.set_lower_tail({0.0, 0.0, 0.0});
        G.set_upper_tail({0.0, 0.0, total});
    } else {
        G.set_lower_tail({0.0, 0.0, total});
        G.set_upper_tail({0.0, 0.0, 0.0});
    }
    return ri::weighted_qnorm(G, -nu, P, b, 0.0, ri::kInf);
}

// || t^{nu + 1 - 1/P} b(t) g(t) ||_P, staircase-exact
inline double hardy_rhs(const ri::Staircase& g, double nu, double P, const ri::Sv& b,
                        const ri::LogGrid& grid) {
    return ri::staircase_qnorm(g, -(nu + 1.0), P, b, 0.0, ri::kInf, grid);
}

// Largest LHS/RHS ratio over `count` random staircases for one (nu, P, b).
inline double hardy_max_ratio(double nu, double P, const ri::Sv& b, int count,
                              std::uint64_t seed, const ri::LogGrid& grid) {
    ri::FamilyGen gen(seed);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const ri::Staircase g = random_staircase(gen);
        const double lhs = hardy_lhs(g, nu, P, b, grid);
        const double rhs = hardy_rhs(g, nu, P, b, grid);
        worst = std::max(worst, lhs / rhs);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Asymptotic band of the prefix integral t -> ||u^{alpha-1/q} b||_{q,(0,t)}
// against (alpha q)^{-1/q} t^alpha b(t); returns the worst band violation
// factor (1.0 means perfectly on the asymptote).

inline double prefix_asymptote_worst(const ri::LogGrid& grid) {
    ri::GridFunction ones = fn_one(grid);
    double worst = 1.0;
    for (double alpha : {0.25, 0.5, 1.0}) {
        for (double q : {1.0, 2.0, ri::kInf}) {
            const double c = std::isinf(q) ? 1.0 : std::pow(alpha * q, -1.0 / q);
            for (const ri::Sv& b :
                 {ri::Sv::one(), ri::Sv::log_pow(1.0), ri::Sv::log_pow(-1.0)}) {
                const ri::GridFunction pre =
                    ri::partial_qnorm(ones, -alpha, q, b, ri::Side::lower);
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double t = grid.point(i);
                    const double ratio = pre(t) / (c * std::pow(t, alpha) * b(t));
                    worst = std::max(worst, std::max(ratio, 1.0 / ratio));
                }
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Exact R-type identity: the f**-based Lorentz norm vs the RLim norm on the
// exact K-profile; returns the worst relative deviation over a staircase
// family.

inline double rtype_identity_worst(int count, std::uint64_t seed, const ri::LogGrid& grid) {
    ri::FamilyGen gen(seed);
    const ri::LorentzDescriptor R = ri::make_grand(2.0, 2.0, 2.0, ri::Sv::log_pow(-2.0));
    const ri::SpaceDescriptor Rd = ri::to_couple(R);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const ri::DecreasingProfile p = gen.profile(i % 3);
        if (p.is_zero()) continue;
        const double lhs = ri::lorentz_norm(R, p, grid);
        const double rhs = ri::interp_norm(Rd, ri::k_l1_linf(p, grid));
        worst = std::max(worst, rel_err(lhs, rhs));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Rule-chain consistency: T10iii twice (to build the two L operands), T8i for
// the flattening step, T25 for the direct route.  Returns the exact eta check
// and the norm-ratio report of chain LHS vs the T25 result space.

struct ChainResult {
    bool eta_exact = false;
    ri::RatioReport report;
};

inline ChainResult run_chain(const ri::VerifyOptions& opt) {
    using namespace ri;
    const Sv dn = Sv::log_pow(-2.0);
    const LogGrid& grid = opt.eval_grid;

    RuleInput in10{make_standard(0.3, 2.0), make_standard(0.7, 2.0), {0.0, 2.0, dn}};
    const RuleOutput out10 = derive(in10, grid);
    RuleInput in10b{make_standard(0.7, 2.0), make_standard(0.9, 2.0), {0.0, 2.0, dn}};
    const RuleOutput out10b = derive(in10b, grid);
    RuleInput in8{make_standard(0.0, 2.0, dn), make_endpoint(1), {0.5, 2.0, Sv::one()}};
    const RuleOutput out8 = derive(in8, grid);
    RuleInput in25{out10.result, out10b.result, {0.5, 2.0, Sv::one()}};
    const RuleOutput out25 = derive(in25, grid);

    ChainResult res;
    res.eta_exact = out10.rule == RuleId::T10iii && out8.rule == RuleId::T8i &&
                    out25.rule == RuleId::T25 &&
                    (1.0 - out8.eta) * 0.3 + out8.eta * 0.7 == out25.eta;

    const VerifyFamily fam = default_family(opt, false);
    for (std::size_t ci = 0; ci < fam.couples.size(); ++ci) {
        const DiscreteCouple& c = fam.couples[ci];
        const ConvexNorm n03 =
            descriptor_norm_on_couple(make_standard(0.3, 2.0), c, opt.eval_grid);
        const ConvexNorm n07 =
            descriptor_norm_on_couple(make_standard(0.7, 2.0), c, opt.eval_grid);
        for (std::size_t fi = 0; fi < fam.vectors.size(); ++fi) {
            const auto& f = fam.vectors[fi];
            const KProfile kp = k_oracle(n03, n07, f, opt.oracle_grid, opt.oracle);
            const double lhs =
                weighted_qnorm(kp.fn, out8.eta, 2.0, out8.a_sharp, 0.0, kInf);
            const double rhs =
                interp_norm(out25.result, exact_k_profile(c, f, opt.eval_grid));
            res.report.add(static_cast<double>(ci), static_cast<int>(fi), lhs, rhs);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Admissibility verdict table (12 hand-constructed cases).

struct ValidateCase {
    std::string name;
    ri::SpaceDescriptor d;
    ri::Admissibility expect;
};

inline std::vector<ValidateCase> validate_table() {
    using namespace ri;
    const Sv one = Sv::one();
    const Sv up = Sv::log_pow(1.0);
    const Sv dn = Sv::log_pow(-2.0);
    std::vector<ValidateCase> t;
    t.push_back({"endpoint side 0", make_endpoint(0), Admissibility::endpoint});
    t.push_back({"standard interior theta", make_standard(0.5, 2.0, one),
                 Admissibility::intermediate});
    t.push_back({"standard theta=0, b=1", make_standard(0.0, 2.0, one),
                 Admissibility::not_intermediate});
    t.push_back({"standard theta=0, decaying b", make_standard(0.0, 2.0, dn),
                 Admissibility::intermediate});
    t.push_back({"standard theta=1, b=1", make_standard(1.0, 2.0, one),
                 Admissibility::not_intermediate});
    t.push_back({"standard theta=1, decaying b", make_standard(1.0, 2.0, dn),
                 Admissibility::intermediate});
    t.push_back({"standard theta=0, q=inf, growing b", make_standard(0.0, kInf, up),
                 Admissibility::not_intermediate});
    t.push_back({"L-limiting, decaying b/a", make_llim(0.3, 2.0, dn, 2.0, one),
                 Admissibility::intermediate});
    t.push_back({"L-limiting, b/a=1", make_llim(0.3, 2.0, one, 2.0, one),
                 Admissibility::not_intermediate});
    t.push_back({"R-limiting full, b/a=1", make_rlim(0.5, 2.0, one, 2.0, one),
                 Admissibility::not_intermediate});
    t.push_back({"R-limiting unit, b/a=1",
                 make_rlim(0.5, 2.0, one, 2.0, one, IntervalMode::unit),
                 Admissibility::trivial});
    t.push_back({"R-limiting unit, decaying b/a",
                 make_rlim(0.5, 2.0, dn, 2.0, one, IntervalMode::unit),
                 Admissibility::intermediate});
    return t;
}

// ---------------------------------------------------------------------------
// Structural equality of space descriptors (Sv subtrees compared structurally).

inline bool desc_equal(const ri::SpaceDescriptor& a, const ri::SpaceDescriptor& b) {
    using namespace ri;
    // interpolation parameters tolerate round-off (theta -> 1-theta -> theta);
    // integrability indices and Sv trees must match exactly/structurally
    auto near = [](double x, double y) { return std::fabs(x - y) <= 1e-12; };
    if (a.mode != b.mode || a.form.index() != b.form.index()) return false;
    if (const auto* e = std::get_if<Endpoint>(&a.form))
        return e->side == std::get<Endpoint>(b.form).side;
    if (const auto* s = std::get_if<Standard>(&a.form)) {
        const auto& o = std::get<Standard>(b.form);
        return near(s->theta, o.theta) && s->q == o.q && s->b.structurally_equal(o.b);
    }
    if (const auto* l = std::get_if<LLim>(&a.form)) {
        const auto& o = std::get<LLim>(b.form);
        return near(l->sigma, o.sigma) && l->r == o.r && l->q == o.q &&
               l->b.structurally_equal(o.b) && l->a.structurally_equal(o.a);
    }
    const auto& r = std::get<RLim>(a.form);
    const auto& o = std::get<RLim>(b.form);
    return near(r.sigma, o.sigma) && r.r == o.r && r.q == o.q &&
           r.b.structurally_equal(o.b) && r.a.structurally_equal(o.a);
}

// Couple-swapped mirror of a rule input: operands swapped and reflected,
// outer theta -> 1-theta, outer a -> a(1/t).
inline ri::RuleInput mirrored(const ri::RuleInput& in) {
    ri::RuleInput out;
    out.left = ri::swap(in.right);
    out.right = ri::swap(in.left);
    out.outer = {1.0 - in.outer.theta, in.outer.r, in.outer.a.recip_arg()};
    return out;
}

}  // namespace ritest
