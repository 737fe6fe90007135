#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ri/errors.hpp"
#include "ri/monotone.hpp"
#include "ri/spaces.hpp"
#include "ri/sv.hpp"
#include "ri/sv_numeric.hpp"

namespace ri {

enum class RuleId {
    T7, T8i, T8ii, T9i, T9ii, T10i, T10ii, T10iii, T11i, T11ii, T12, T13,
    T15, T16, T18i, T18ii, T19i, T19ii, T20, T21, T22, T23, T24, T25, T26,
    T27, T28, T31,
    P1, P2, P3, P4, P5, P6, P7, P8,
    C37, C38, C39, C40, C41, C42, C43, C44, C45, C46, C47, C48, C49, C50,
    C51, C52,
};

inline const char* to_string(RuleId id) {
    switch (id) {
        case RuleId::T7: return "T7";
        case RuleId::T8i: return "T8i";
        case RuleId::T8ii: return "T8ii";
        case RuleId::T9i: return "T9i";
        case RuleId::T9ii: return "T9ii";
        case RuleId::T10i: return "T10i";
        case RuleId::T10ii: return "T10ii";
        case RuleId::T10iii: return "T10iii";
        case RuleId::T11i: return "T11i";
        case RuleId::T11ii: return "T11ii";
        case RuleId::T12: return "T12";
        case RuleId::T13: return "T13";
        case RuleId::T15: return "T15";
        case RuleId::T16: return "T16";
        case RuleId::T18i: return "T18i";
        case RuleId::T18ii: return "T18ii";
        case RuleId::T19i: return "T19i";
        case RuleId::T19ii: return "T19ii";
        case RuleId::T20: return "T20";
        case RuleId::T21: return "T21";
        case RuleId::T22: return "T22";
        case RuleId::T23: return "T23";
        case RuleId::T24: return "T24";
        case RuleId::T25: return "T25";
        case RuleId::T26: return "T26";
        case RuleId::T27: return "T27";
        case RuleId::T28: return "T28";
        case RuleId::T31: return "T31";
        case RuleId::P1: return "P1";
        case RuleId::P2: return "P2";
        case RuleId::P3: return "P3";
        case RuleId::P4: return "P4";
        case RuleId::P5: return "P5";
        case RuleId::P6: return "P6";
        case RuleId::P7: return "P7";
        case RuleId::P8: return "P8";
        case RuleId::C37: return "C37";
        case RuleId::C38: return "C38";
        case RuleId::C39: return "C39";
        case RuleId::C40: return "C40";
        case RuleId::C41: return "C41";
        case RuleId::C42: return "C42";
        case RuleId::C43: return "C43";
        case RuleId::C44: return "C44";
        case RuleId::C45: return "C45";
        case RuleId::C46: return "C46";
        case RuleId::C47: return "C47";
        case RuleId::C48: return "C48";
        case RuleId::C49: return "C49";
        case RuleId::C50: return "C50";
        case RuleId::C51: return "C51";
        case RuleId::C52: return "C52";
    }
    return "?";
}

inline std::vector<RuleId> all_rule_ids() {
    std::vector<RuleId> ids;
    for (int i = static_cast<int>(RuleId::T7); i <= static_cast<int>(RuleId::C52); ++i)
        ids.push_back(static_cast<RuleId>(i));
    return ids;
}

inline std::optional<RuleId> rule_from_string(const std::string& s) {
    for (RuleId id : all_rule_ids())
        if (s == to_string(id)) return id;
    return std::nullopt;
}

/// Parameters of the outer interpolation functor (.,.)_{theta,r,a}.
struct OuterParams {
    double theta = 0.5;
    double r = 1.0;
    Sv a = Sv::one();
};

struct RuleInput {
    SpaceDescriptor left;
    SpaceDescriptor right;
    OuterParams outer;

    IntervalMode mode() const { return left.mode; }

    nlohmann::json to_json() const {
        return {{"left", left.to_json()},
                {"right", right.to_json()},
                {"outer",
                 {{"theta", outer.theta},
                  {"r", std::isinf(outer.r) ? nlohmann::json("inf") : nlohmann::json(outer.r)},
                  {"a", outer.a.to_json()}}}};
    }
    static RuleInput from_json(const nlohmann::json& j) {
        RuleInput in;
        in.left = SpaceDescriptor::from_json(j.at("left"));
        in.right = SpaceDescriptor::from_json(j.at("right"));
        const auto& o = j.at("outer");
        in.outer.theta = o.at("theta").get<double>();
        in.outer.r = detail::index_from_json(o.at("r"));
        in.outer.a = o.contains("a") ? Sv::from_json(o.at("a")) : Sv::one();
        return in;
    }
};

struct HypCheck {
    std::string condition;
    bool ok = true;
    std::string diagnostic;
};

struct RuleOutput {
    SpaceDescriptor result;
    double eta = 0.0;
    Sv a_sharp = Sv::one();
    double rho_lambda = 1.0;   // rho(t) = t^lambda * rho_factor(t)
    Sv rho_factor = Sv::one();
    std::optional<Sv> c0;
    std::optional<Sv> c1;
    MonotoneMap sigma;
    RuleId rule = RuleId::T7;
    std::vector<HypCheck> hypotheses;

    double rho(double t) const { return std::pow(t, rho_lambda) * rho_factor(t); }

    nlohmann::json to_json() const {
        nlohmann::json hs = nlohmann::json::array();
        for (const auto& h : hypotheses)
            hs.push_back({{"condition", h.condition}, {"ok", h.ok}, {"diagnostic", h.diagnostic}});
        nlohmann::json j{{"rule", to_string(rule)},
                         {"result", result.to_json()},
                         {"eta", eta},
                         {"a_sharp", a_sharp.to_json()},
                         {"rho", {{"lambda", rho_lambda}, {"factor", rho_factor.to_json()}}},
                         {"sigma_ratio_bound", sigma.ratio_bound()},
                         {"hypotheses", hs}};
        if (c0) j["c0"] = c0->to_json();
        if (c1) j["c1"] = c1->to_json();
        return j;
    }
};

namespace detail {

enum class Pat { E0, E1, S0, Smid, S1, L, R };

inline Pat pattern_of(const SpaceDescriptor& d) {
    if (const auto* e = std::get_if<Endpoint>(&d.form)) return e->side == 0 ? Pat::E0 : Pat::E1;
    if (const auto* s = std::get_if<Standard>(&d.form)) {
        if (s->theta == 0.0) return Pat::S0;
        if (s->theta == 1.0) return Pat::S1;
        return Pat::Smid;
    }
    if (std::holds_alternative<LLim>(d.form)) return Pat::L;
    return Pat::R;
}

// Human-readable condition label for a tail-norm hypothesis; idx is the
// symbolic name of the integrability index (e.g. "r0", "q1").
inline std::string tail_cond(const std::string& sv_name, const std::string& idx, Side side) {
    const char* where = side == Side::upper ? "(1,inf)" : "(0,1)";
    return "||s^{-1/" + idx + "} " + sv_name + "||_{" + idx + "," + where + "} < inf";
}

}  // namespace detail

/// Applies the matching reiteration rule to the input.  Throws NoRuleMatches
/// when the operand pattern is outside the catalogue, HypothesisFailed when a
/// stated SV-finiteness or ordering condition is violated.
inline RuleOutput derive(const RuleInput& in, const LogGrid& grid = LogGrid{}) {
    using detail::Pat;
    in.left.check_ranges();
    in.right.check_ranges();
    if (in.left.mode != in.right.mode)
        throw InvalidDescriptor("operands disagree on interval mode");
    if (!(in.outer.theta >= 0.0 && in.outer.theta <= 1.0))
        throw InvalidDescriptor("outer theta outside [0,1]");
    if (!(in.outer.r > 0.0)) throw InvalidDescriptor("outer r must be positive");

    const bool unit = in.left.mode == IntervalMode::unit;
    const double th = in.outer.theta;
    const double r = in.outer.r;
    const Sv& a = in.outer.a;

    std::vector<HypCheck> hyps;
    auto require = [&](bool ok, const std::string& cond, const std::string& diag = "") {
        hyps.push_back({cond, ok, diag});
        if (!ok) throw HypothesisFailed(cond + (diag.empty() ? "" : " — " + diag));
    };
    // evaluates the tail norm after the symbolic finiteness check
    auto tail = [&](const Sv& b, double rr, Side side, const std::string& name,
                    const std::string& idx) {
        const auto fin = check_finite(b, rr, side == Side::upper ? HalfLine::one_inf
                                                                 : HalfLine::zero_one);
        hyps.push_back({detail::tail_cond(name, idx, side), fin.finite, fin.diagnostic});
        if (!fin.finite)
            throw HypothesisFailed(detail::tail_cond(name, idx, side) + " — " + fin.diagnostic);
        return tail_qnorm(b, rr, side, grid).fn;
    };
    auto extra_a = [&](Side side) {
        const auto fin = check_finite(a, r, side == Side::upper ? HalfLine::one_inf
                                                                : HalfLine::zero_one);
        hyps.push_back({detail::tail_cond("a", "r", side), fin.finite, fin.diagnostic});
        if (!fin.finite)
            throw HypothesisFailed(detail::tail_cond("a", "r", side) + " — " + fin.diagnostic);
    };
    // a(rho(t)), realized through the monotone surrogate when rho is not
    // already monotone on the grid
    auto rho_compose = [&](double lam, const Sv& fac, const MonotoneMap& sig) -> Sv {
        if (a.is_one()) return Sv::one();
        if (sig.ratio_bound() <= 1.0 + 1e-9) return Sv::compose_regular(a, lam, fac);
        GridFunction g = GridFunction::sample(grid, [&](double t) { return a(sig(t)); });
        g.fit_tails();
        return Sv::tabulated(std::move(g));
    };
    auto finish = [&](RuleId id, SpaceDescriptor result, double eta, Sv ash, double lam,
                      Sv fac, std::optional<Sv> c0, std::optional<Sv> c1,
                      MonotoneMap sig) -> RuleOutput {
        const auto rep = validate(result);
        if (rep.verdict != Admissibility::intermediate)
            throw HypothesisFailed(std::string("derived descriptor is not intermediate: ") +
                                   rep.condition);
        RuleOutput out;
        out.result = std::move(result);
        out.eta = eta;
        out.a_sharp = std::move(ash);
        out.rho_lambda = lam;
        out.rho_factor = std::move(fac);
        out.c0 = std::move(c0);
        out.c1 = std::move(c1);
        out.sigma = std::move(sig);
        out.rule = id;
        out.hypotheses = std::move(hyps);
        return out;
    };

    const Pat pl = detail::pattern_of(in.left);
    const Pat pr = detail::pattern_of(in.right);
    const bool th_mid = th > 0.0 && th < 1.0;
    const IntervalMode rm = in.left.mode;

    if (unit) {
        // the only binary rewrite on the unit interval is T31 (R-unit, L-unit)
        if (pl == Pat::R && pr == Pat::L && th_mid) {
            const auto& x0 = std::get<RLim>(in.left.form);
            const auto& x1 = std::get<LLim>(in.right.form);
            require(x0.sigma < x1.sigma, "0 < theta0 < theta1 < 1");
            const Sv c0 = x0.a * tail(x0.b / x0.a, x0.r, Side::lower, "b0/a0", "r0");
            // hypothesis: the (0,1) integral for the right space diverges
            const auto fin = check_finite(x1.b / x1.a, x1.r, HalfLine::zero_one);
            hyps.push_back({"||s^{-1/r1} b1/a1||_{r1,(0,1)} = inf", !fin.finite, fin.diagnostic});
            if (fin.finite)
                throw HypothesisFailed("||s^{-1/r1} b1/a1||_{r1,(0,1)} = inf — " +
                                       fin.diagnostic);
            // c1(t) = a1(t) (1 + ||s^{-1/r1} b1/a1||_{r1,(t,1)})
            GridFunction ones(grid, std::vector<double>(grid.size(), 1.0));
            ones.set_lower_tail({0.0, 0.0, 1.0});
            ones.set_upper_tail({0.0, 0.0, 1.0});
            GridFunction part = partial_qnorm(ones, 0.0, x1.r, x1.b / x1.a, Side::upper, 1.0);
            for (double& v : part.samples()) v += 1.0;
            part.fit_tails();
            const Sv c1 = x1.a * Sv::tabulated(std::move(part));
            const double lam = x1.sigma - x0.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th * x1.sigma;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T31, make_standard(eta, r, ash, rm), eta, ash, lam, fac,
                          c0, c1, std::move(sig));
        }
        throw NoRuleMatches("no unit-interval rule for this operand pattern");
    }

    // ---- standard x standard -------------------------------------------------
    if (pl == Pat::Smid && pr == Pat::Smid) {
        const auto& s0 = std::get<Standard>(in.left.form);
        const auto& s1 = std::get<Standard>(in.right.form);
        require(s0.theta < s1.theta, "0 < theta0 < theta1 < 1");
        if (th_mid) {  // T7
            const double lam = s1.theta - s0.theta;
            const Sv fac = s0.b / s1.b;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * s0.theta + th * s1.theta;
            const Sv ash = s0.b.pow(1.0 - th) * s1.b.pow(th) * arho;
            return finish(RuleId::T7, make_standard(eta, r, ash), eta, ash, lam, fac,
                          std::nullopt, std::nullopt, std::move(sig));
        }
        if (th == 0.0) {  // T10iii: result is the L space with b0 = a0 (a o sigma)
            const double lam = s1.theta - s0.theta;
            const Sv fac = s0.b / s1.b;  // here s_i.b play the roles of a0, a1
            auto sig = sigma_surrogate(lam, fac, grid);
            Sv a_comp = a.is_one() ? Sv::one() : rho_compose(lam, fac, sig);
            const Sv b0 = s0.b * a_comp;
            tail(b0 / s0.b, r, Side::upper, "b0/a0", "r0");
            return finish(RuleId::T10iii,
                          make_llim(s0.theta, r, b0, s0.q, s0.b), s0.theta, b0, lam, fac,
                          std::nullopt, std::nullopt, std::move(sig));
        }
        throw NoRuleMatches("standard/standard with outer theta = 1 is outside the catalogue");
    }

    // ---- standard x endpoint / endpoint x standard --------------------------
    if (pl == Pat::S0 && pr == Pat::E1) {  // T8i
        require(th > 0.0, "0 < theta <= 1");
        const auto& s0 = std::get<Standard>(in.left.form);
        const Sv c = tail(s0.b, s0.q, Side::upper, "b", "q");
        const double lam = 1.0;
        const Sv fac = c;
        auto sig = sigma_surrogate(lam, fac, grid);
        const Sv arho = rho_compose(lam, fac, sig);
        const Sv ash = c.pow(1.0 - th) * arho;
        return finish(RuleId::T8i, make_standard(th, r, ash), th, ash, lam, fac, c,
                      std::nullopt, std::move(sig));
    }
    if (pl == Pat::E0 && pr == Pat::S1) {  // T8ii
        require(th < 1.0, "0 <= theta < 1");
        const auto& s1 = std::get<Standard>(in.right.form);
        const Sv c = tail(s1.b, s1.q, Side::lower, "b", "q");
        const double lam = 1.0;
        const Sv fac = c;
        auto sig = sigma_surrogate(lam, fac, grid);
        const Sv arho = rho_compose(lam, fac, sig);
        const Sv ash = c.pow(th) * arho;
        return finish(RuleId::T8ii, make_standard(th, r, ash), th, ash, lam, fac,
                      std::nullopt, c, std::move(sig));
    }
    if (pl == Pat::Smid && pr == Pat::E1) {
        const auto& s0 = std::get<Standard>(in.left.form);
        if (th > 0.0) {  // T9i
            const double lam = 1.0 - s0.theta;
            const Sv fac = s0.b;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * s0.theta + th;
            const Sv ash = s0.b.pow(1.0 - th) * arho;
            return finish(RuleId::T9i, make_standard(eta, r, ash), eta, ash, lam, fac,
                          std::nullopt, std::nullopt, std::move(sig));
        }
        // T10i: theta = 0
        const double lam = 1.0 - s0.theta;
        const Sv fac = s0.b;
        auto sig = sigma_surrogate(lam, fac, grid);
        Sv a_comp = a.is_one() ? Sv::one() : rho_compose(lam, fac, sig);
        const Sv b0 = s0.b * a_comp;
        tail(b0 / s0.b, r, Side::upper, "b0/a0", "r0");
        return finish(RuleId::T10i, make_llim(s0.theta, r, b0, s0.q, s0.b), s0.theta, b0,
                      lam, fac, std::nullopt, std::nullopt, std::move(sig));
    }
    if (pl == Pat::Smid && pr == Pat::S1) {
        const auto& s0 = std::get<Standard>(in.left.form);
        const auto& s1 = std::get<Standard>(in.right.form);
        if (th_mid) {  // T9ii
            const Sv c1 = tail(s1.b, s1.q, Side::lower, "b1", "q1");
            const double lam = 1.0 - s0.theta;
            const Sv fac = s0.b / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * s0.theta + th;
            const Sv ash = s0.b.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T9ii, make_standard(eta, r, ash), eta, ash, lam, fac,
                          std::nullopt, c1, std::move(sig));
        }
        if (th == 0.0) {  // T10ii
            const Sv c1 = tail(s1.b, s1.q, Side::lower, "a1", "q1");
            const double lam = 1.0 - s0.theta;
            const Sv fac = s0.b / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            Sv a_comp = a.is_one() ? Sv::one() : rho_compose(lam, fac, sig);
            const Sv b0 = s0.b * a_comp;
            tail(b0 / s0.b, r, Side::upper, "b0/a0", "r0");
            return finish(RuleId::T10ii, make_llim(s0.theta, r, b0, s0.q, s0.b), s0.theta,
                          b0, lam, fac, std::nullopt, c1, std::move(sig));
        }
        throw NoRuleMatches("standard/standard(1) with outer theta = 1 is outside the catalogue");
    }

    // ---- L space as the first operand ---------------------------------------
    if (pl == Pat::L) {
        const auto& x0 = std::get<LLim>(in.left.form);
        const Sv c0 = x0.a * tail(x0.b / x0.a, x0.r, Side::upper, "b0/a0", "r0");
        if (pr == Pat::Smid) {
            const auto& s1 = std::get<Standard>(in.right.form);
            require(x0.sigma < s1.theta, "0 < theta0 < theta1 < 1");
            const double lam = s1.theta - x0.sigma;
            const Sv fac = c0 / s1.b;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            if (th_mid) {  // T11i
                const double eta = (1.0 - th) * x0.sigma + th * s1.theta;
                const Sv ash = c0.pow(1.0 - th) * s1.b.pow(th) * arho;
                return finish(RuleId::T11i, make_standard(eta, r, ash), eta, ash, lam, fac,
                              c0, std::nullopt, std::move(sig));
            }
            if (th == 1.0) {  // T11ii
                extra_a(Side::lower);
                const Sv ash = s1.b * arho;
                return finish(RuleId::T11ii, make_rlim(s1.theta, r, ash, s1.q, s1.b),
                              s1.theta, ash, lam, fac, c0, std::nullopt, std::move(sig));
            }
            throw NoRuleMatches("L/standard with outer theta = 0 is outside the catalogue");
        }
        if (pr == Pat::S1 && th_mid) {  // T12
            const auto& s1 = std::get<Standard>(in.right.form);
            const Sv c1 = tail(s1.b, s1.q, Side::lower, "b1", "q1");
            const double lam = 1.0 - x0.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T12, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        if (pr == Pat::E1 && th > 0.0) {  // T13
            if (th == 1.0) extra_a(Side::lower);
            const double lam = 1.0 - x0.sigma;
            const Sv fac = c0;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th;
            const Sv ash = c0.pow(1.0 - th) * arho;
            return finish(RuleId::T13, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          std::nullopt, std::move(sig));
        }
        if (pr == Pat::L && th_mid) {  // T25
            const auto& x1 = std::get<LLim>(in.right.form);
            require(x0.sigma < x1.sigma, "0 < theta0 < theta1 < 1");
            const Sv c1 = x1.a * tail(x1.b / x1.a, x1.r, Side::upper, "b1/a1", "r1");
            const double lam = x1.sigma - x0.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th * x1.sigma;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T25, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        if (pr == Pat::R && th_mid) {  // T26
            const auto& x1 = std::get<RLim>(in.right.form);
            require(x0.sigma < x1.sigma, "0 < theta0 < theta1 < 1");
            const Sv c1 = x1.a * tail(x1.b / x1.a, x1.r, Side::lower, "b1/a1", "r1");
            const double lam = x1.sigma - x0.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th * x1.sigma;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T26, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        throw NoRuleMatches("no rule for L-space left operand with this pattern");
    }

    // ---- L or R space as the second operand, endpoint/standard first --------
    if (pr == Pat::L) {
        const auto& x1 = std::get<LLim>(in.right.form);
        const Sv c1 = x1.a * tail(x1.b / x1.a, x1.r, Side::upper, "b1/a1", "r1");
        if (pl == Pat::E0 && th < 1.0) {  // T15
            if (th == 0.0) extra_a(Side::upper);
            const double lam = x1.sigma;
            const Sv fac = Sv::one() / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = th * x1.sigma;
            const Sv ash = c1.pow(th) * arho;
            return finish(RuleId::T15, make_standard(eta, r, ash), eta, ash, lam, fac,
                          std::nullopt, c1, std::move(sig));
        }
        if (pl == Pat::S0 && th_mid) {  // T16
            const auto& s0 = std::get<Standard>(in.left.form);
            const Sv c0 = tail(s0.b, s0.q, Side::upper, "b0", "q0");
            const double lam = x1.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = th * x1.sigma;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T16, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        if (pl == Pat::Smid) {  // T18
            const auto& s0 = std::get<Standard>(in.left.form);
            require(s0.theta < x1.sigma, "0 < theta0 < theta1 < 1");
            const double lam = x1.sigma - s0.theta;
            const Sv fac = s0.b / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            if (th_mid) {  // T18i
                const double eta = (1.0 - th) * s0.theta + th * x1.sigma;
                const Sv ash = s0.b.pow(1.0 - th) * c1.pow(th) * arho;
                return finish(RuleId::T18i, make_standard(eta, r, ash), eta, ash, lam, fac,
                              std::nullopt, c1, std::move(sig));
            }
            if (th == 0.0) {  // T18ii
                extra_a(Side::upper);
                const Sv ash = s0.b * arho;
                return finish(RuleId::T18ii, make_llim(s0.theta, r, ash, s0.q, s0.b),
                              s0.theta, ash, lam, fac, std::nullopt, c1, std::move(sig));
            }
            throw NoRuleMatches("standard/L with outer theta = 1 is outside the catalogue");
        }
        if (pl != Pat::R)
            throw NoRuleMatches("no rule for L-space right operand with this pattern");
    }
    if (pr == Pat::R && pl != Pat::R) {
        const auto& x1 = std::get<RLim>(in.right.form);
        const Sv c1 = x1.a * tail(x1.b / x1.a, x1.r, Side::lower, "b1/a1", "r1");
        if (pl == Pat::E0 && th < 1.0) {  // T21
            if (th == 0.0) extra_a(Side::upper);
            const double lam = x1.sigma;
            const Sv fac = Sv::one() / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = th * x1.sigma;
            const Sv ash = c1.pow(th) * arho;
            return finish(RuleId::T21, make_standard(eta, r, ash), eta, ash, lam, fac,
                          std::nullopt, c1, std::move(sig));
        }
        if (pl == Pat::S0 && th_mid) {  // T20
            const auto& s0 = std::get<Standard>(in.left.form);
            const Sv c0 = tail(s0.b, s0.q, Side::upper, "b0", "q0");
            const double lam = x1.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = th * x1.sigma;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T20, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        if (pl == Pat::Smid) {  // T19
            const auto& s0 = std::get<Standard>(in.left.form);
            require(s0.theta < x1.sigma, "0 < theta0 < theta1 < 1");
            const double lam = x1.sigma - s0.theta;
            const Sv fac = s0.b / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            if (th_mid) {  // T19i
                const double eta = (1.0 - th) * s0.theta + th * x1.sigma;
                const Sv ash = s0.b.pow(1.0 - th) * c1.pow(th) * arho;
                return finish(RuleId::T19i, make_standard(eta, r, ash), eta, ash, lam, fac,
                              std::nullopt, c1, std::move(sig));
            }
            if (th == 0.0) {  // T19ii
                extra_a(Side::upper);
                const Sv ash = s0.b * arho;
                return finish(RuleId::T19ii, make_llim(s0.theta, r, ash, s0.q, s0.b),
                              s0.theta, ash, lam, fac, std::nullopt, c1, std::move(sig));
            }
            throw NoRuleMatches("standard/R with outer theta = 1 is outside the catalogue");
        }
        throw NoRuleMatches("no rule for R-space right operand with this pattern");
    }

    // ---- R space as the first operand ---------------------------------------
    if (pl == Pat::R) {
        const auto& x0 = std::get<RLim>(in.left.form);
        const Sv c0 = x0.a * tail(x0.b / x0.a, x0.r, Side::lower, "b0/a0", "r0");
        if (pr == Pat::E1 && th > 0.0) {  // T22
            if (th == 1.0) extra_a(Side::lower);
            const double lam = 1.0 - x0.sigma;
            const Sv fac = c0;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th;
            const Sv ash = c0.pow(1.0 - th) * arho;
            return finish(RuleId::T22, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          std::nullopt, std::move(sig));
        }
        if (pr == Pat::S1 && th_mid) {  // T23
            const auto& s1 = std::get<Standard>(in.right.form);
            const Sv c1 = tail(s1.b, s1.q, Side::lower, "b1", "q1");
            const double lam = 1.0 - x0.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T23, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        if (pr == Pat::Smid) {  // T24
            const auto& s1 = std::get<Standard>(in.right.form);
            require(x0.sigma < s1.theta, "0 < theta0 < theta1 < 1");
            const double lam = s1.theta - x0.sigma;
            const Sv fac = c0 / s1.b;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            if (th_mid) {
                const double eta = (1.0 - th) * x0.sigma + th * s1.theta;
                const Sv ash = c0.pow(1.0 - th) * s1.b.pow(th) * arho;
                return finish(RuleId::T24, make_standard(eta, r, ash), eta, ash, lam, fac,
                              c0, std::nullopt, std::move(sig));
            }
            if (th == 1.0) {
                extra_a(Side::lower);
                const Sv ash = s1.b * arho;
                return finish(RuleId::T24, make_rlim(s1.theta, r, ash, s1.q, s1.b),
                              s1.theta, ash, lam, fac, c0, std::nullopt, std::move(sig));
            }
            throw NoRuleMatches("R/standard with outer theta = 0 is outside the catalogue");
        }
        if (pr == Pat::R && th_mid) {  // T27
            const auto& x1 = std::get<RLim>(in.right.form);
            require(x0.sigma < x1.sigma, "0 < theta0 < theta1 < 1");
            const Sv c1 = x1.a * tail(x1.b / x1.a, x1.r, Side::lower, "b1/a1", "r1");
            const double lam = x1.sigma - x0.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th * x1.sigma;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T27, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        if (pr == Pat::L && th_mid) {  // T28
            const auto& x1 = std::get<LLim>(in.right.form);
            require(x0.sigma < x1.sigma, "0 < theta0 < theta1 < 1");
            const Sv c1 = x1.a * tail(x1.b / x1.a, x1.r, Side::upper, "b1/a1", "r1");
            const double lam = x1.sigma - x0.sigma;
            const Sv fac = c0 / c1;
            auto sig = sigma_surrogate(lam, fac, grid);
            const Sv arho = rho_compose(lam, fac, sig);
            const double eta = (1.0 - th) * x0.sigma + th * x1.sigma;
            const Sv ash = c0.pow(1.0 - th) * c1.pow(th) * arho;
            return finish(RuleId::T28, make_standard(eta, r, ash), eta, ash, lam, fac, c0,
                          c1, std::move(sig));
        }
        throw NoRuleMatches("no rule for R-space left operand with this pattern");
    }

    throw NoRuleMatches("operand pattern is outside the catalogue");
}

// ---------------------------------------------------------------------------
// Lorentz specialization (the corollaries).

struct LorentzRuleOutput {
    LorentzDescriptor result;
    RuleOutput base;          // the underlying couple-level rule output
    RuleId corollary;         // C37..C52
    double p = 0.0;           // 1/p = (1-theta)/p0 + theta/p1 (informational
                              // for the limiting corollaries)
};

namespace detail {

// L1 and Linf appear as Karamata descriptors with (p,q,b) = (1,1,1) / (inf,.,1)
inline bool is_l1(const LorentzDescriptor& d) {
    const auto* k = std::get_if<Karamata>(&d.form);
    return k && k->p == 1.0 && k->q == 1.0 && k->b.is_one();
}
inline bool is_linf(const LorentzDescriptor& d) {
    const auto* k = std::get_if<Karamata>(&d.form);
    return k && std::isinf(k->p);
}

inline SpaceDescriptor lorentz_operand(const LorentzDescriptor& d) {
    if (is_l1(d)) return make_endpoint(0);
    if (is_linf(d)) return make_endpoint(1);
    return to_couple(d);
}

inline double p_of(const LorentzDescriptor& d) {
    if (const auto* k = std::get_if<Karamata>(&d.form)) return k->p;
    if (const auto* l = std::get_if<LType>(&d.form)) return l->p;
    return std::get<RType>(d.form).p;
}

inline RuleId corollary_of(RuleId base, double theta) {
    switch (base) {
        case RuleId::T11i: return RuleId::C37;
        case RuleId::T11ii: return RuleId::C38;
        case RuleId::T13: return RuleId::C39;
        case RuleId::T18i: return RuleId::C40;
        case RuleId::T18ii: return RuleId::C41;
        case RuleId::T15: return RuleId::C42;
        case RuleId::T19i: return RuleId::C43;
        case RuleId::T19ii: return RuleId::C44;
        case RuleId::T21: return RuleId::C45;
        case RuleId::T24: return theta == 1.0 ? RuleId::C47 : RuleId::C46;
        case RuleId::T22: return RuleId::C48;
        case RuleId::T25: return RuleId::C49;
        case RuleId::T26: return RuleId::C50;
        case RuleId::T27: return RuleId::C51;
        case RuleId::T28: return RuleId::C52;
        default:
            throw NoRuleMatches(std::string("rule ") + to_string(base) +
                                " has no Lorentz corollary");
    }
}

// inverse of the Lemma 35/36 parameterization
inline LorentzDescriptor lorentz_of(const SpaceDescriptor& d) {
    auto p_of_theta = [](double theta) { return 1.0 / (1.0 - theta); };
    if (const auto* s = std::get_if<Standard>(&d.form))
        return make_karamata(p_of_theta(s->theta), s->q, s->b);
    if (const auto* l = std::get_if<LLim>(&d.form)) {
        if (l->a.is_one()) return make_small(p_of_theta(l->sigma), l->q, l->r, l->b);
        return make_ltype(p_of_theta(l->sigma), l->r, l->b, l->q, l->a);
    }
    const auto& rr = std::get<RLim>(d.form);
    if (rr.a.is_one()) return make_grand(p_of_theta(rr.sigma), rr.q, rr.r, rr.b);
    return make_rtype(p_of_theta(rr.sigma), rr.r, rr.b, rr.q, rr.a);
}

}  // namespace detail

/// Applies to_couple, derive, and maps the result back to a Lorentz-type
/// descriptor with 1/p = (1-theta)/p0 + theta/p1.
inline LorentzRuleOutput specialize_lorentz(const LorentzDescriptor& left,
                                            const LorentzDescriptor& right,
                                            const OuterParams& outer,
                                            const LogGrid& grid = LogGrid{}) {
    RuleInput in;
    in.left = detail::lorentz_operand(left);
    in.right = detail::lorentz_operand(right);
    in.outer = outer;
    RuleOutput base = derive(in, grid);
    LorentzRuleOutput out{detail::lorentz_of(base.result), std::move(base),
                          RuleId::C37, 0.0};
    out.corollary = detail::corollary_of(out.base.rule, outer.theta);
    // 1/p from the couple-level eta: eta = 1 - 1/p
    out.p = 1.0 / (1.0 - out.base.eta);
    return out;
}

}  // namespace ri
