#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <variant>

#include <json.hpp>

#include "ri/errors.hpp"
#include "ri/log_grid.hpp"

namespace ri {

/// Asymptotic behaviour of a slowly varying function at one end of (0,inf):
///   b(t) ~ C * (1+|ln t|)^log_pow * (1+ln(1+|ln t|))^loglog_pow.
/// `exact` is false for numerically fitted (tabulated) descriptors.
struct SvAsymptote {
    double log_pow = 0.0;
    double loglog_pow = 0.0;
    bool exact = true;
};

enum class Side { lower, upper };

/// Symbolic slowly varying function, closed under power, reciprocal argument,
/// product and regular composition, plus a tabulated escape hatch.
class Sv {
    struct Node;
    using Ptr = std::shared_ptr<const Node>;

    struct ConstN { double c; };
    struct LogPowN { double gamma; };
    struct LogLogPowN { double gamma; };
    struct BrokenLogPowN { double gamma0; double gamma_inf; };
    struct ProdN { Ptr left, right; };
    struct PowN { Ptr base; double r; };
    struct RecipArgN { Ptr inner; };
    struct ComposeN { Ptr outer; double lambda; Ptr inner; };
    struct TabulatedN { GridFunction fn; };

    struct Node {
        std::variant<ConstN, LogPowN, LogLogPowN, BrokenLogPowN, ProdN, PowN, RecipArgN,
                     ComposeN, TabulatedN>
            v;
    };

    Ptr node_;
    explicit Sv(Ptr n) : node_(std::move(n)) {}

    template <class T>
    static Sv make(T&& n) {
        return Sv(std::make_shared<Node>(Node{std::forward<T>(n)}));
    }

public:
    Sv() : Sv(make(ConstN{1.0})) {}

    static Sv constant(double c) {
        if (!(c > 0.0) || !std::isfinite(c)) throw RangeError("Const requires positive finite c");
        return make(ConstN{c});
    }
    static Sv log_pow(double gamma) { return make(LogPowN{gamma}); }
    static Sv log_log_pow(double gamma) { return make(LogLogPowN{gamma}); }
    static Sv broken_log_pow(double gamma0, double gamma_inf) {
        return make(BrokenLogPowN{gamma0, gamma_inf});
    }
    /// Tabulated node; the tail descriptors must have power exponent 0
    /// (slow variation leaves no room for genuine power growth).
    static Sv tabulated(GridFunction fn) { return make(TabulatedN{std::move(fn)}); }

    static Sv one() { return constant(1.0); }
    bool is_one() const {
        const auto* c = std::get_if<ConstN>(&node_->v);
        return c && c->c == 1.0;
    }

    double operator()(double t) const {
        if (!(t > 0.0)) throw RangeError("Sv evaluated outside (0,inf)");
        const double v = eval(*node_, t);
        if (!std::isfinite(v) || !(v > 0.0))
            throw RangeError("Sv evaluation out of range at t=" + std::to_string(t));
        return v;
    }

    Sv pow(double r) const {
        if (r == 1.0) return *this;
        if (const auto* c = std::get_if<ConstN>(&node_->v)) return constant(std::pow(c->c, r));
        if (const auto* l = std::get_if<LogPowN>(&node_->v)) return log_pow(l->gamma * r);
        if (const auto* l = std::get_if<LogLogPowN>(&node_->v)) return log_log_pow(l->gamma * r);
        if (const auto* b = std::get_if<BrokenLogPowN>(&node_->v))
            return broken_log_pow(b->gamma0 * r, b->gamma_inf * r);
        if (const auto* p = std::get_if<PowN>(&node_->v)) return make(PowN{p->base, p->r * r});
        return make(PowN{node_, r});
    }

    /// t -> b(1/t).  An involution; self-inverse nodes collapse.
    Sv recip_arg() const {
        if (std::holds_alternative<ConstN>(node_->v) ||
            std::holds_alternative<LogPowN>(node_->v) ||
            std::holds_alternative<LogLogPowN>(node_->v))
            return *this;
        if (const auto* b = std::get_if<BrokenLogPowN>(&node_->v))
            return broken_log_pow(b->gamma_inf, b->gamma0);
        if (const auto* p = std::get_if<ProdN>(&node_->v))
            return Sv(p->left).recip_arg() * Sv(p->right).recip_arg();
        if (const auto* p = std::get_if<PowN>(&node_->v))
            return Sv(p->base).recip_arg().pow(p->r);
        if (const auto* r = std::get_if<RecipArgN>(&node_->v)) return Sv(r->inner);
        return make(RecipArgN{node_});
    }

    friend Sv operator*(const Sv& a, const Sv& b) {
        if (a.is_one()) return b;
        if (b.is_one()) return a;
        const auto* ca = std::get_if<ConstN>(&a.node_->v);
        const auto* cb = std::get_if<ConstN>(&b.node_->v);
        if (ca && cb) return constant(ca->c * cb->c);
        return make(ProdN{a.node_, b.node_});
    }
    Sv operator/(const Sv& other) const { return *this * other.pow(-1.0); }

    /// t -> outer(t^lambda * inner(t)), lambda > 0.
    static Sv compose_regular(const Sv& outer, double lambda, const Sv& inner) {
        if (!(lambda > 0.0)) throw RangeError("compose_regular requires lambda > 0");
        return make(ComposeN{outer.node_, lambda, inner.node_});
    }

    SvAsymptote asymptote(Side side) const { return asym(*node_, side); }

    bool structurally_equal(const Sv& other) const { return eq(*node_, *other.node_); }

    nlohmann::json to_json() const { return json_of(*node_); }

    static Sv from_json(const nlohmann::json& j) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "const") return constant(j.at("c").get<double>());
        if (kind == "logpow") return log_pow(j.at("gamma").get<double>());
        if (kind == "loglogpow") return log_log_pow(j.at("gamma").get<double>());
        if (kind == "brokenlogpow")
            return broken_log_pow(j.at("gamma0").get<double>(), j.at("gammainf").get<double>());
        if (kind == "prod") return make(ProdN{from_json(j.at("left")).node_,
                                              from_json(j.at("right")).node_});
        if (kind == "pow") return make(PowN{from_json(j.at("base")).node_, j.at("r").get<double>()});
        if (kind == "reciparg") return make(RecipArgN{from_json(j.at("inner")).node_});
        if (kind == "compose")
            return make(ComposeN{from_json(j.at("outer")).node_, j.at("lambda").get<double>(),
                                 from_json(j.at("inner")).node_});
        if (kind == "tabulated") return tabulated(GridFunction::from_json(j.at("function")));
        throw RangeError("unknown Sv kind: " + kind);
    }

private:
    static double eval(const Node& n, double t) {
        return std::visit(
            [&](const auto& x) -> double {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ConstN>) {
                    return x.c;
                } else if constexpr (std::is_same_v<T, LogPowN>) {
                    return std::pow(1.0 + std::fabs(std::log(t)), x.gamma);
                } else if constexpr (std::is_same_v<T, LogLogPowN>) {
                    return std::pow(1.0 + std::log(1.0 + std::fabs(std::log(t))), x.gamma);
                } else if constexpr (std::is_same_v<T, BrokenLogPowN>) {
                    const double l = std::log(t);
                    return t <= 1.0 ? std::pow(1.0 - l, x.gamma0) : std::pow(1.0 + l, x.gamma_inf);
                } else if constexpr (std::is_same_v<T, ProdN>) {
                    return eval(*x.left, t) * eval(*x.right, t);
                } else if constexpr (std::is_same_v<T, PowN>) {
                    return std::pow(eval(*x.base, t), x.r);
                } else if constexpr (std::is_same_v<T, RecipArgN>) {
                    return eval(*x.inner, 1.0 / t);
                } else if constexpr (std::is_same_v<T, ComposeN>) {
                    const double arg = std::pow(t, x.lambda) * eval(*x.inner, t);
                    if (!std::isfinite(arg) || !(arg > 0.0))
                        throw RangeError("compose_regular argument overflow");
                    return eval(*x.outer, arg);
                } else {
                    static_assert(std::is_same_v<T, TabulatedN>);
                    const GridFunction& f = x.fn;
                    // log-linear interpolation of positive samples
                    if (t <= f.grid().tmin || t >= f.grid().tmax) return f(t);
                    const double x0 = f.grid().locate(t);
                    const std::size_t i = static_cast<std::size_t>(x0);
                    const double w = x0 - static_cast<double>(i);
                    const double a = f.samples()[i], b = f.samples()[i + 1];
                    if (a > 0.0 && b > 0.0) return std::exp((1.0 - w) * std::log(a) + w * std::log(b));
                    return a * (1.0 - w) + b * w;
                }
            },
            n.v);
    }

    static SvAsymptote asym(const Node& n, Side side) {
        return std::visit(
            [&](const auto& x) -> SvAsymptote {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ConstN>) {
                    return {};
                } else if constexpr (std::is_same_v<T, LogPowN>) {
                    return {x.gamma, 0.0, true};
                } else if constexpr (std::is_same_v<T, LogLogPowN>) {
                    return {0.0, x.gamma, true};
                } else if constexpr (std::is_same_v<T, BrokenLogPowN>) {
                    return {side == Side::lower ? x.gamma0 : x.gamma_inf, 0.0, true};
                } else if constexpr (std::is_same_v<T, ProdN>) {
                    const auto l = asym(*x.left, side), r = asym(*x.right, side);
                    return {l.log_pow + r.log_pow, l.loglog_pow + r.loglog_pow, l.exact && r.exact};
                } else if constexpr (std::is_same_v<T, PowN>) {
                    auto b = asym(*x.base, side);
                    return {b.log_pow * x.r, b.loglog_pow * x.r, b.exact};
                } else if constexpr (std::is_same_v<T, RecipArgN>) {
                    return asym(*x.inner, side == Side::lower ? Side::upper : Side::lower);
                } else if constexpr (std::is_same_v<T, ComposeN>) {
                    // t^lambda * inner(t) tends to the same limit as t (lambda > 0),
                    // and |ln arg| ~ lambda |ln t|, so the exponents carry over.
                    return asym(*x.outer, side);
                } else {
                    static_assert(std::is_same_v<T, TabulatedN>);
                    const TailDescriptor& d =
                        side == Side::lower ? x.fn.lower_tail() : x.fn.upper_tail();
                    return {d.log_power, 0.0, false};
                }
            },
            n.v);
    }

    static bool eq(const Node& a, const Node& b) {
        if (a.v.index() != b.v.index()) return false;
        return std::visit(
            [&](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                const auto& y = std::get<T>(b.v);
                if constexpr (std::is_same_v<T, ConstN>) {
                    return x.c == y.c;
                } else if constexpr (std::is_same_v<T, LogPowN> ||
                                     std::is_same_v<T, LogLogPowN>) {
                    return x.gamma == y.gamma;
                } else if constexpr (std::is_same_v<T, BrokenLogPowN>) {
                    return x.gamma0 == y.gamma0 && x.gamma_inf == y.gamma_inf;
                } else if constexpr (std::is_same_v<T, ProdN>) {
                    return eq(*x.left, *y.left) && eq(*x.right, *y.right);
                } else if constexpr (std::is_same_v<T, PowN>) {
                    return x.r == y.r && eq(*x.base, *y.base);
                } else if constexpr (std::is_same_v<T, RecipArgN>) {
                    return eq(*x.inner, *y.inner);
                } else if constexpr (std::is_same_v<T, ComposeN>) {
                    return x.lambda == y.lambda && eq(*x.outer, *y.outer) &&
                           eq(*x.inner, *y.inner);
                } else {
                    static_assert(std::is_same_v<T, TabulatedN>);
                    return x.fn.grid() == y.fn.grid() && x.fn.samples() == y.fn.samples();
                }
            },
            a.v);
    }

    static nlohmann::json json_of(const Node& n) {
        return std::visit(
            [&](const auto& x) -> nlohmann::json {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ConstN>) {
                    return {{"kind", "const"}, {"c", x.c}};
                } else if constexpr (std::is_same_v<T, LogPowN>) {
                    return {{"kind", "logpow"}, {"gamma", x.gamma}};
                } else if constexpr (std::is_same_v<T, LogLogPowN>) {
                    return {{"kind", "loglogpow"}, {"gamma", x.gamma}};
                } else if constexpr (std::is_same_v<T, BrokenLogPowN>) {
                    return {{"kind", "brokenlogpow"}, {"gamma0", x.gamma0},
                            {"gammainf", x.gamma_inf}};
                } else if constexpr (std::is_same_v<T, ProdN>) {
                    return {{"kind", "prod"}, {"left", json_of(*x.left)},
                            {"right", json_of(*x.right)}};
                } else if constexpr (std::is_same_v<T, PowN>) {
                    return {{"kind", "pow"}, {"base", json_of(*x.base)}, {"r", x.r}};
                } else if constexpr (std::is_same_v<T, RecipArgN>) {
                    return {{"kind", "reciparg"}, {"inner", json_of(*x.inner)}};
                } else if constexpr (std::is_same_v<T, ComposeN>) {
                    return {{"kind", "compose"}, {"outer", json_of(*x.outer)},
                            {"lambda", x.lambda}, {"inner", json_of(*x.inner)}};
                } else {
                    static_assert(std::is_same_v<T, TabulatedN>);
                    return {{"kind", "tabulated"}, {"function", x.fn.to_json()}};
                }
            },
            n.v);
    }
};

/// Result of a symbolic finiteness decision for || s^{-1/r} b(s) ||_{r, I}.
struct FinitenessVerdict {
    bool finite = false;
    bool confident = true;  // false when tabulated tails forced a numeric fit
    std::string diagnostic;
};

enum class HalfLine { zero_one, one_inf };

/// Decides whether || s^{-1/r} b(s) ||_{r, I} is finite, I = (0,1) or (1,inf).
/// For the closed grammar the log/loglog exponents settle convergence exactly;
/// tabulated nodes inherit the fitted exponents with a lowered confidence flag.
inline FinitenessVerdict check_finite(const Sv& b, double r, HalfLine interval) {
    constexpr double eps = 1e-9;
    const Side side = interval == HalfLine::zero_one ? Side::lower : Side::upper;
    const SvAsymptote a = b.asymptote(side);
    FinitenessVerdict v;
    v.confident = a.exact;
    const char* where = interval == HalfLine::zero_one ? "(0,1)" : "(1,inf)";
    if (std::isinf(r)) {
        v.finite = a.log_pow < -eps || (std::fabs(a.log_pow) <= eps && a.loglog_pow <= eps);
        v.diagnostic = std::string("sup over ") + where + ": log exponent " +
                       std::to_string(a.log_pow);
        return v;
    }
    const double L = r * a.log_pow;
    if (L < -1.0 - eps) {
        v.finite = true;
    } else if (L > -1.0 + eps) {
        v.finite = false;
    } else {
        v.finite = r * a.loglog_pow < -1.0 - eps;
    }
    v.diagnostic = std::string("integral over ") + where + ": r*log exponent " +
                   std::to_string(L) + (v.finite ? " (convergent)" : " (divergent)");
    return v;
}

}  // namespace ri
