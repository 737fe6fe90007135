#pragma once

#include <cmath>
#include <string>
#include <variant>

#include <json.hpp>

#include "ri/errors.hpp"
#include "ri/kfunc.hpp"
#include "ri/profile_quad.hpp"
#include "ri/quad.hpp"
#include "ri/sv.hpp"

namespace ri {

enum class IntervalMode { full, unit };

/// One of the two endpoint spaces of the couple.
struct Endpoint {
    int side = 0;  // 0 or 1
};

/// Standard space: || u^{-theta-1/q} b(u) K(u,f) ||_{q,(0,inf)}.
struct Standard {
    double theta = 0.5;
    double q = 1.0;
    Sv b = Sv::one();
};

/// L-limiting space: outer weight t^{-1/r} b/a of the inner norm over (0,t).
struct LLim {
    double sigma = 0.5;
    double r = 1.0;
    Sv b = Sv::one();
    double q = 1.0;
    Sv a = Sv::one();
};

/// R-limiting space: inner norm over (t,inf) (or (t,1) in unit mode).
struct RLim {
    double sigma = 0.5;
    double r = 1.0;
    Sv b = Sv::one();
    double q = 1.0;
    Sv a = Sv::one();
};

struct SpaceDescriptor {
    std::variant<Endpoint, Standard, LLim, RLim> form;
    IntervalMode mode = IntervalMode::full;

    bool is_endpoint() const { return std::holds_alternative<Endpoint>(form); }

    /// Throws InvalidDescriptor when a parameter is out of its admissible range.
    void check_ranges() const {
        auto bad = [](const std::string& m) { throw InvalidDescriptor(m); };
        if (const auto* e = std::get_if<Endpoint>(&form)) {
            if (e->side != 0 && e->side != 1) bad("endpoint side must be 0 or 1");
        } else if (const auto* s = std::get_if<Standard>(&form)) {
            if (!(s->theta >= 0.0 && s->theta <= 1.0)) bad("standard: theta outside [0,1]");
            if (!(s->q > 0.0)) bad("standard: q must be positive");
        } else if (const auto* l = std::get_if<LLim>(&form)) {
            if (!(l->sigma > 0.0 && l->sigma < 1.0)) bad("L-limiting: sigma outside (0,1)");
            if (!(l->r > 0.0) || !(l->q > 0.0)) bad("L-limiting: r, q must be positive");
        } else if (const auto* r = std::get_if<RLim>(&form)) {
            if (!(r->sigma > 0.0 && r->sigma < 1.0)) bad("R-limiting: sigma outside (0,1)");
            if (!(r->r > 0.0) || !(r->q > 0.0)) bad("R-limiting: r, q must be positive");
        }
    }

    nlohmann::json to_json() const;
    static SpaceDescriptor from_json(const nlohmann::json& j);
};

inline SpaceDescriptor make_endpoint(int side, IntervalMode m = IntervalMode::full) {
    return {Endpoint{side}, m};
}
inline SpaceDescriptor make_standard(double theta, double q, Sv b = Sv::one(),
                                     IntervalMode m = IntervalMode::full) {
    return {Standard{theta, q, std::move(b)}, m};
}
inline SpaceDescriptor make_llim(double sigma, double r, Sv b, double q, Sv a,
                                 IntervalMode m = IntervalMode::full) {
    return {LLim{sigma, r, std::move(b), q, std::move(a)}, m};
}
inline SpaceDescriptor make_rlim(double sigma, double r, Sv b, double q, Sv a,
                                 IntervalMode m = IntervalMode::full) {
    return {RLim{sigma, r, std::move(b), q, std::move(a)}, m};
}

inline nlohmann::json SpaceDescriptor::to_json() const {
    nlohmann::json j;
    j["interval_mode"] = mode == IntervalMode::full ? "full" : "unit";
    if (const auto* e = std::get_if<Endpoint>(&form)) {
        j["kind"] = "endpoint";
        j["side"] = e->side;
    } else if (const auto* s = std::get_if<Standard>(&form)) {
        j["kind"] = "standard";
        j["theta"] = s->theta;
        j["q"] = std::isinf(s->q) ? nlohmann::json("inf") : nlohmann::json(s->q);
        j["b"] = s->b.to_json();
    } else if (const auto* l = std::get_if<LLim>(&form)) {
        j["kind"] = "llim";
        j["sigma"] = l->sigma;
        j["r"] = std::isinf(l->r) ? nlohmann::json("inf") : nlohmann::json(l->r);
        j["b"] = l->b.to_json();
        j["q"] = std::isinf(l->q) ? nlohmann::json("inf") : nlohmann::json(l->q);
        j["a"] = l->a.to_json();
    } else {
        const auto& r = std::get<RLim>(form);
        j["kind"] = "rlim";
        j["sigma"] = r.sigma;
        j["r"] = std::isinf(r.r) ? nlohmann::json("inf") : nlohmann::json(r.r);
        j["b"] = r.b.to_json();
        j["q"] = std::isinf(r.q) ? nlohmann::json("inf") : nlohmann::json(r.q);
        j["a"] = r.a.to_json();
    }
    return j;
}

namespace detail {
inline double index_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
        throw InvalidDescriptor("unrecognized index value: " + s);
    }
    return j.get<double>();
}
}  // namespace detail

inline SpaceDescriptor SpaceDescriptor::from_json(const nlohmann::json& j) {
    SpaceDescriptor d;
    const std::string mode = j.value("interval_mode", "full");
    if (mode == "full")
        d.mode = IntervalMode::full;
    else if (mode == "unit")
        d.mode = IntervalMode::unit;
    else
        throw InvalidDescriptor("unrecognized interval_mode: " + mode);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "endpoint") {
        d.form = Endpoint{j.at("side").get<int>()};
    } else if (kind == "standard") {
        d.form = Standard{j.at("theta").get<double>(), detail::index_from_json(j.at("q")),
                          Sv::from_json(j.at("b"))};
    } else if (kind == "llim") {
        d.form = LLim{j.at("sigma").get<double>(), detail::index_from_json(j.at("r")),
                      Sv::from_json(j.at("b")), detail::index_from_json(j.at("q")),
                      Sv::from_json(j.at("a"))};
    } else if (kind == "rlim") {
        d.form = RLim{j.at("sigma").get<double>(), detail::index_from_json(j.at("r")),
                      Sv::from_json(j.at("b")), detail::index_from_json(j.at("q")),
                      Sv::from_json(j.at("a"))};
    } else {
        throw InvalidDescriptor("unrecognized space kind: " + kind);
    }
    d.check_ranges();
    return d;
}

enum class Admissibility { endpoint, intermediate, trivial, not_intermediate };

struct AdmissibilityReport {
    Admissibility verdict = Admissibility::intermediate;
    std::string condition;  // the SV-integral condition that was evaluated
    bool confident = true;
};

/// Decides whether the space is intermediate between A0 and A1 (or trivial in
/// unit mode), evaluating the defining SV-integral condition symbolically.
inline AdmissibilityReport validate(const SpaceDescriptor& d) {
    d.check_ranges();
    AdmissibilityReport rep;
    const bool unit = d.mode == IntervalMode::unit;
    if (d.is_endpoint()) {
        rep.verdict = Admissibility::endpoint;
        rep.condition = "endpoint space; no condition";
        return rep;
    }
    if (const auto* s = std::get_if<Standard>(&d.form)) {
        if (s->theta > 0.0 && s->theta < 1.0) {
            rep.verdict = Admissibility::intermediate;
            rep.condition = "0 < theta < 1; no integral condition";
            return rep;
        }
        if (s->theta == 0.0) {
            if (unit) {
                rep.verdict = Admissibility::intermediate;
                rep.condition = "theta = 0 on the unit interval; no condition at infinity";
                return rep;
            }
            const auto v = check_finite(s->b, s->q, HalfLine::one_inf);
            rep.verdict = v.finite ? Admissibility::intermediate : Admissibility::not_intermediate;
            rep.condition = "||u^{-1/q} b||_{q,(1,inf)} " + std::string(v.finite ? "<" : "=") +
                            " inf; " + v.diagnostic;
            rep.confident = v.confident;
            return rep;
        }
        // theta = 1
        const auto v = check_finite(s->b, s->q, HalfLine::zero_one);
        rep.verdict = v.finite ? Admissibility::intermediate : Admissibility::not_intermediate;
        rep.condition = "||u^{-1/q} b||_{q,(0,1)} " + std::string(v.finite ? "<" : "=") +
                        " inf; " + v.diagnostic;
        rep.confident = v.confident;
        return rep;
    }
    if (const auto* l = std::get_if<LLim>(&d.form)) {
        if (unit) {
            rep.verdict = Admissibility::intermediate;
            rep.condition = "L-limiting on the unit interval; no condition at infinity";
            return rep;
        }
        const auto v = check_finite(l->b / l->a, l->r, HalfLine::one_inf);
        rep.verdict = v.finite ? Admissibility::intermediate : Admissibility::not_intermediate;
        rep.condition = "||s^{-1/r} b/a||_{r,(1,inf)} " + std::string(v.finite ? "<" : "=") +
                        " inf; " + v.diagnostic;
        rep.confident = v.confident;
        return rep;
    }
    const auto& r = std::get<RLim>(d.form);
    const auto v = check_finite(r.b / r.a, r.r, HalfLine::zero_one);
    rep.condition = "||s^{-1/r} b/a||_{r,(0,1)} " + std::string(v.finite ? "<" : "=") + " inf; " +
                    v.diagnostic;
    rep.confident = v.confident;
    if (v.finite)
        rep.verdict = Admissibility::intermediate;
    else
        rep.verdict = unit ? Admissibility::trivial : Admissibility::not_intermediate;
    return rep;
}

/// Evaluates the descriptor's norm on a K-profile.  The K-profile stands for
/// K(.,f) of a concrete couple; endpoint descriptors have no K-based norm.
inline double interp_norm(const SpaceDescriptor& d, const KProfile& K,
                          QuadDiag* diag = nullptr) {
    const AdmissibilityReport rep = validate(d);
    if (rep.verdict == Admissibility::endpoint)
        throw InvalidDescriptor("endpoint descriptor has no K-functional norm");
    if (rep.verdict == Admissibility::trivial)
        throw TrivialSpace("space contains only 0: " + rep.condition);
    if (rep.verdict == Admissibility::not_intermediate)
        throw InvalidDescriptor("space is not intermediate: " + rep.condition);
    const bool unit = d.mode == IntervalMode::unit;
    const double hi = unit ? 1.0 : kInf;
    if (const auto* s = std::get_if<Standard>(&d.form))
        return weighted_qnorm(K.fn, s->theta, s->q, s->b, 0.0, hi, diag);
    if (const auto* l = std::get_if<LLim>(&d.form)) {
        GridFunction inner = partial_qnorm(K.fn, l->sigma, l->q, l->a, Side::lower);
        return weighted_qnorm(inner, 0.0, l->r, l->b / l->a, 0.0, hi, diag);
    }
    const auto& r = std::get<RLim>(d.form);
    GridFunction inner =
        partial_qnorm(K.fn, r.sigma, r.q, r.a, Side::upper, unit ? 1.0 : kInf);
    return weighted_qnorm(inner, 0.0, r.r, r.b / r.a, 0.0, hi, diag);
}

/// (A0,A1) <-> (A1,A0) translation; b~(t) = b(1/t).
inline SpaceDescriptor swap(const SpaceDescriptor& d) {
    if (d.mode == IntervalMode::unit)
        throw InvalidDescriptor("swap is undefined on the unit interval");
    d.check_ranges();
    SpaceDescriptor out;
    out.mode = d.mode;
    if (const auto* e = std::get_if<Endpoint>(&d.form)) {
        out.form = Endpoint{1 - e->side};
    } else if (const auto* s = std::get_if<Standard>(&d.form)) {
        out.form = Standard{1.0 - s->theta, s->q, s->b.recip_arg()};
    } else if (const auto* l = std::get_if<LLim>(&d.form)) {
        out.form = RLim{1.0 - l->sigma, l->r, l->b.recip_arg(), l->q, l->a.recip_arg()};
    } else {
        const auto& r = std::get<RLim>(d.form);
        out.form = LLim{1.0 - r.sigma, r.r, r.b.recip_arg(), r.q, r.a.recip_arg()};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lorentz-type descriptors over a measure space, given via rearrangements.

/// Lorentz-Karamata space: || t^{1/p-1/q} b(t) f*(t) ||_{q,(0,inf)}.
struct Karamata {
    double p = 2.0;
    double q = 2.0;
    Sv b = Sv::one();
};

/// L-type space (inner prefix norm of f*).
struct LType {
    double p = 2.0;
    double r = 1.0;
    Sv b = Sv::one();
    double q = 1.0;
    Sv a = Sv::one();
};

/// R-type space (inner suffix norm of f**).
struct RType {
    double p = 2.0;
    double r = 1.0;
    Sv b = Sv::one();
    double q = 1.0;
    Sv a = Sv::one();
};

struct LorentzDescriptor {
    std::variant<Karamata, LType, RType> form;
    // Small and grand spaces are the a = 1 instances of LType / RType; the tag
    // records which name the descriptor was built under (serialization only).
    enum class Tag { generic, small_space, grand_space } tag = Tag::generic;

    void check_ranges() const {
        auto bad = [](const std::string& m) { throw InvalidDescriptor(m); };
        if (const auto* k = std::get_if<Karamata>(&form)) {
            if (!(k->p > 0.0)) bad("karamata: p must be positive");
            if (!(k->q > 0.0)) bad("karamata: q must be positive");
        } else if (const auto* l = std::get_if<LType>(&form)) {
            if (!(l->p > 0.0) || std::isinf(l->p)) bad("ltype: p must be finite positive");
            if (!(l->r > 0.0) || !(l->q > 0.0)) bad("ltype: r, q must be positive");
        } else {
            const auto& r = std::get<RType>(form);
            if (!(r.p > 0.0) || std::isinf(r.p)) bad("rtype: p must be finite positive");
            if (!(r.r > 0.0) || !(r.q > 0.0)) bad("rtype: r, q must be positive");
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        if (const auto* k = std::get_if<Karamata>(&form)) {
            j["kind"] = "karamata";
            j["p"] = k->p;
            j["q"] = std::isinf(k->q) ? nlohmann::json("inf") : nlohmann::json(k->q);
            j["b"] = k->b.to_json();
            return j;
        }
        const bool is_l = std::holds_alternative<LType>(form);
        if (tag == Tag::small_space)
            j["kind"] = "small";
        else if (tag == Tag::grand_space)
            j["kind"] = "grand";
        else
            j["kind"] = is_l ? "ltype" : "rtype";
        auto fill = [&](double p, double r, const Sv& b, double q, const Sv& a) {
            j["p"] = p;
            j["r"] = std::isinf(r) ? nlohmann::json("inf") : nlohmann::json(r);
            j["b"] = b.to_json();
            j["q"] = std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q);
            if (tag == Tag::generic) j["a"] = a.to_json();
        };
        if (is_l) {
            const auto& l = std::get<LType>(form);
            fill(l.p, l.r, l.b, l.q, l.a);
        } else {
            const auto& r = std::get<RType>(form);
            fill(r.p, r.r, r.b, r.q, r.a);
        }
        return j;
    }

    static LorentzDescriptor from_json(const nlohmann::json& j) {
        LorentzDescriptor d;
        const std::string kind = j.at("kind").get<std::string>();
        auto idx = [&](const char* k) { return detail::index_from_json(j.at(k)); };
        if (kind == "karamata") {
            d.form = Karamata{j.at("p").get<double>(), idx("q"), Sv::from_json(j.at("b"))};
        } else if (kind == "ltype" || kind == "small") {
            const Sv a = kind == "small" ? Sv::one() : Sv::from_json(j.at("a"));
            d.form = LType{j.at("p").get<double>(), idx("r"), Sv::from_json(j.at("b")),
                           idx("q"), a};
            if (kind == "small") d.tag = Tag::small_space;
        } else if (kind == "rtype" || kind == "grand") {
            const Sv a = kind == "grand" ? Sv::one() : Sv::from_json(j.at("a"));
            d.form = RType{j.at("p").get<double>(), idx("r"), Sv::from_json(j.at("b")),
                           idx("q"), a};
            if (kind == "grand") d.tag = Tag::grand_space;
        } else {
            throw InvalidDescriptor("unrecognized lorentz kind: " + kind);
        }
        d.check_ranges();
        return d;
    }
};

inline LorentzDescriptor make_karamata(double p, double q, Sv b = Sv::one()) {
    return {Karamata{p, q, std::move(b)}, LorentzDescriptor::Tag::generic};
}
inline LorentzDescriptor make_ltype(double p, double r, Sv b, double q, Sv a) {
    return {LType{p, r, std::move(b), q, std::move(a)}, LorentzDescriptor::Tag::generic};
}
inline LorentzDescriptor make_rtype(double p, double r, Sv b, double q, Sv a) {
    return {RType{p, r, std::move(b), q, std::move(a)}, LorentzDescriptor::Tag::generic};
}
inline LorentzDescriptor make_small(double p, double q, double r, Sv b) {
    return {LType{p, r, std::move(b), q, Sv::one()}, LorentzDescriptor::Tag::small_space};
}
inline LorentzDescriptor make_grand(double p, double q, double r, Sv b) {
    return {RType{p, r, std::move(b), q, Sv::one()}, LorentzDescriptor::Tag::grand_space};
}

/// Norm of a rearranged function in a Lorentz-type space.  L-type norms use
/// f* directly (staircase-exact quadrature); R-type norms use f**.
inline double lorentz_norm(const LorentzDescriptor& d, const DecreasingProfile& fstar,
                           const LogGrid& grid = LogGrid{}, QuadDiag* diag = nullptr) {
    d.check_ranges();
    const Staircase stair = Staircase::of(fstar);
    if (const auto* k = std::get_if<Karamata>(&d.form)) {
        const double th = std::isinf(k->p) ? 0.0 : -1.0 / k->p;
        const double v = staircase_qnorm(stair, th, k->q, k->b, 0.0, kInf, grid);
        if (diag) diag->tail_fraction = 0.0;
        return v;
    }
    if (const auto* l = std::get_if<LType>(&d.form)) {
        const auto fin = check_finite(l->b / l->a, l->r, HalfLine::one_inf);
        if (!fin.finite)
            throw TrivialSpace("||t^{-1/r} b/a||_{r,(1,inf)} = inf; " + fin.diagnostic);
        GridFunction inner =
            staircase_partial_qnorm(stair, -1.0 / l->p, l->q, l->a, Side::lower, grid);
        return weighted_qnorm(inner, 0.0, l->r, l->b / l->a, 0.0, kInf, diag);
    }
    const auto& r = std::get<RType>(d.form);
    const auto fin = check_finite(r.b / r.a, r.r, HalfLine::zero_one);
    if (!fin.finite)
        throw TrivialSpace("||t^{-1/r} b/a||_{r,(0,1)} = inf; " + fin.diagnostic);
    GridFunction fss = maximal(fstar, grid);
    GridFunction inner = partial_qnorm(fss, -1.0 / r.p, r.q, r.a, Side::upper);
    return weighted_qnorm(inner, 0.0, r.r, r.b / r.a, 0.0, kInf, diag);
}

/// Maps a Lorentz-type space to its (L1, Linf) interpolation descriptor with
/// theta = 1 - 1/p (requires p > 1 so theta lands in (0,1)).
inline SpaceDescriptor to_couple(const LorentzDescriptor& d) {
    d.check_ranges();
    auto theta_of = [](double p) {
        if (!(p > 1.0) || std::isinf(p))
            throw InvalidDescriptor("to_couple requires 1 < p < inf");
        return 1.0 - 1.0 / p;
    };
    if (const auto* k = std::get_if<Karamata>(&d.form))
        return make_standard(theta_of(k->p), k->q, k->b);
    if (const auto* l = std::get_if<LType>(&d.form))
        return make_llim(theta_of(l->p), l->r, l->b, l->q, l->a);
    const auto& r = std::get<RType>(d.form);
    return make_rlim(theta_of(r.p), r.r, r.b, r.q, r.a);
}

}  // namespace ri
