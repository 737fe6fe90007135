#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ri/errors.hpp"
#include "ri/families.hpp"
#include "ri/kfunc.hpp"
#include "ri/quad.hpp"
#include "ri/reiteration.hpp"
#include "ri/spaces.hpp"

namespace ri {

struct VerifyOptions {
    LogGrid eval_grid{1e-6, 1e6, 8};    // quadrature grid for member norms
    LogGrid oracle_grid{1e-4, 1e4, 4};  // t-grid of the derived-couple K oracle
    OracleOptions oracle{1e-3, 6, false};
    bool refine_check = true;  // re-run at x2 resolution and report the drift
    int dim = 8;
    int n_couples = 4;
    int n_vectors = 5;
    std::uint64_t seed = 0;
};

/// Interpolation-space norm on a fixed weighted-l1 couple, with the K-profile
/// matrix and all quadrature/tail coefficients precomputed so that repeated
/// evaluation (inside the K oracle) is plain arithmetic.
class DescriptorNorm {
public:
    DescriptorNorm(const SpaceDescriptor& d, const DiscreteCouple& c, const LogGrid& grid)
        : c_(c), grid_(grid) {
        c_.validate();
        if (c_.p0 != 1.0 || c_.p1 != 1.0)
            throw RangeError("descriptor norms require an l1/l1 couple");
        unit_ = d.mode == IntervalMode::unit;
        n_ = grid_.size();
        if (const auto* e = std::get_if<Endpoint>(&d.form)) {
            kind_ = Kind::endpoint;
            side_ = e->side;
            min_index_ = 1.0;
            return;
        }
        const auto rep = validate(d);
        if (rep.verdict == Admissibility::trivial)
            throw TrivialSpace("space contains only 0: " + rep.condition);
        if (rep.verdict == Admissibility::not_intermediate)
            throw InvalidDescriptor("space is not intermediate: " + rep.condition);

        // points with u <= 1 in unit mode; all points otherwise
        if (unit_) {
            const double x = grid_.locate(1.0);
            nhi_ = static_cast<std::size_t>(std::llround(x)) + 1;
            if (std::fabs(x - std::round(x)) > 1e-6 || nhi_ > n_)
                throw RangeError("unit-mode evaluation grid must contain t = 1");
        } else {
            nhi_ = n_;
        }

        const std::size_t dim = c_.dim();
        M_.resize(n_ * dim);
        for (std::size_t j = 0; j < n_; ++j) {
            const double u = grid_.point(j);
            for (std::size_t i = 0; i < dim; ++i)
                M_[j * dim + i] = std::min(c_.w0[i], u * c_.w1[i]);
        }

        if (const auto* s = std::get_if<Standard>(&d.form)) {
            kind_ = Kind::standard;
            setup_standard(s->theta, s->q, s->b);
            min_index_ = s->q;
        } else if (const auto* l = std::get_if<LLim>(&d.form)) {
            kind_ = Kind::llim;
            setup_limiting(l->sigma, l->r, l->b, l->q, l->a, /*lower_inner=*/true);
            min_index_ = std::min(l->r, l->q);
        } else {
            const auto& rr = std::get<RLim>(d.form);
            kind_ = Kind::rlim;
            setup_limiting(rr.sigma, rr.r, rr.b, rr.q, rr.a, /*lower_inner=*/false);
            min_index_ = std::min(rr.r, rr.q);
        }
    }

    double min_index() const { return min_index_; }

    double operator()(const std::vector<double>& f) const {
        if (f.size() != c_.dim()) throw RangeError("dimension mismatch");
        if (kind_ == Kind::endpoint) return c_.norm(side_, f);
        const std::size_t dim = c_.dim();
        fa_.resize(dim);
        bool zero = true;
        for (std::size_t i = 0; i < dim; ++i) {
            fa_[i] = std::fabs(f[i]);
            if (fa_[i] != 0.0) zero = false;
        }
        if (zero) return 0.0;
        K_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double* row = &M_[j * dim];
            double s = 0.0;
            for (std::size_t i = 0; i < dim; ++i) s += row[i] * fa_[i];
            K_[j] = s;
        }
        if (kind_ == Kind::standard) return eval_standard();
        return eval_limiting(kind_ == Kind::llim);
    }

private:
    enum class Kind { endpoint, standard, llim, rlim };

    void setup_standard(double theta, double q, const Sv& b) {
        qout_ = q;
        const double h = grid_.log_step();
        // lower tail: K ~ t near 0 (power 1), upper: K ~ const (power 0)
        if (std::isinf(q)) {
            B_.resize(nhi_);
            for (std::size_t j = 0; j < nhi_; ++j) {
                const double u = grid_.point(j);
                B_[j] = std::pow(u, -theta) * b(u);
            }
            B_[0] *= std::max(1.0, sup_coeff(1.0, theta, b, Side::lower,
                                             "supremum unbounded as u->0"));
            if (!unit_)
                B_[nhi_ - 1] *= std::max(1.0, sup_coeff(0.0, theta, b, Side::upper,
                                                        "supremum unbounded as u->inf"));
            return;
        }
        A_.assign(nhi_, 0.0);
        std::vector<double> W(nhi_);
        for (std::size_t j = 0; j < nhi_; ++j) {
            const double u = grid_.point(j);
            W[j] = std::pow(std::pow(u, -theta) * b(u), q);
        }
        for (std::size_t j = 0; j + 1 < nhi_; ++j) {
            A_[j] += 0.5 * h * W[j];
            A_[j + 1] += 0.5 * h * W[j + 1];
        }
        A_[0] += tail_coeff(1.0, theta, q, b, Side::lower,
                            "integral diverges as u->0") * W[0];
        if (!unit_)
            A_[nhi_ - 1] += tail_coeff(0.0, theta, q, b, Side::upper,
                                       "integral diverges as u->inf") * W[nhi_ - 1];
    }

    void setup_limiting(double sigma, double r, const Sv& b, double q, const Sv& a,
                        bool lower_inner) {
        qin_ = q;
        qout_ = r;
        const Sv ba = b / a;
        // inner weights
        Win_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double u = grid_.point(j);
            const double w = std::pow(u, -sigma) * a(u);
            Win_[j] = std::isinf(q) ? w : std::pow(w, q);
        }
        if (lower_inner) {
            inner_seed_ = std::isinf(q)
                              ? sup_coeff(1.0, sigma, a, Side::lower,
                                          "inner supremum unbounded as u->0")
                              : tail_coeff(1.0, sigma, q, a, Side::lower,
                                           "inner integral diverges as u->0");
        } else if (!unit_) {
            inner_seed_ = std::isinf(q)
                              ? sup_coeff(0.0, sigma, a, Side::upper,
                                          "inner supremum unbounded as u->inf")
                              : tail_coeff(0.0, sigma, q, a, Side::upper,
                                           "inner integral diverges as u->inf");
        } else {
            inner_seed_ = 0.0;  // inner interval is (t,1): nothing past the cap
        }
        // outer weights (b/a)(u) on u <= hi
        const double h = grid_.log_step();
        Wba_.resize(nhi_);
        for (std::size_t j = 0; j < nhi_; ++j) Wba_[j] = ba(grid_.point(j));
        // asymptotic tail descriptors of the inner function:
        //   L: inner ~ t^{1-sigma} a(t) near 0, const near inf
        //   R: inner ~ const near 0, t^{-sigma} a(t) near inf
        const SvAsymptote al = a.asymptote(Side::lower);
        const SvAsymptote au = a.asymptote(Side::upper);
        const TailDescriptor lo_td = lower_inner
                                         ? TailDescriptor{1.0 - sigma, al.log_pow, 1.0}
                                         : TailDescriptor{0.0, 0.0, 1.0};
        const TailDescriptor hi_td = lower_inner
                                         ? TailDescriptor{0.0, 0.0, 1.0}
                                         : TailDescriptor{-sigma, au.log_pow, 1.0};
        if (std::isinf(r)) {
            outer_lo_ = std::max(1.0, sup_coeff_td(lo_td, ba, Side::lower,
                                                   "outer supremum unbounded as u->0"));
            outer_hi_ = unit_ ? 1.0
                              : std::max(1.0, sup_coeff_td(hi_td, ba, Side::upper,
                                                           "outer supremum unbounded as u->inf"));
            return;
        }
        Cout_.assign(nhi_, 0.0);
        for (std::size_t j = 0; j + 1 < nhi_; ++j) {
            Cout_[j] += 0.5 * h;
            Cout_[j + 1] += 0.5 * h;
        }
        outer_lo_ = tail_coeff_td(lo_td, r, ba, Side::lower, "outer integral diverges as u->0");
        outer_hi_ = unit_ ? 0.0
                          : tail_coeff_td(hi_td, r, ba, Side::upper,
                                          "outer integral diverges as u->inf");
    }

    // improper-tail multiplier for an integrand anchored at the grid boundary;
    // g_power is the power of the profile's tail on that side.
    double tail_coeff(double g_power, double theta, double q, const Sv& b, Side side,
                      const std::string& what) const {
        return tail_coeff_td(TailDescriptor{g_power, 0.0, 1.0}, q, b, side, what,
                             theta);
    }
    double tail_coeff_td(const TailDescriptor& td, double q, const Sv& b, Side side,
                         const std::string& what, double theta = 0.0) const {
        const SvAsymptote ab = b.asymptote(side);
        detail::TailModel m;
        m.alpha = q * (td.power - theta);
        m.Lambda = q * (td.log_power + ab.log_pow);
        m.D = q * ab.loglog_pow;
        m.vanishes = false;
        if (!detail::tail_converges(m, side)) throw NonConvergent(what, m.alpha / q);
        const double x0 = std::log(side == Side::lower ? grid_.tmin : grid_.tmax);
        return detail::improper_tail(1.0, x0, m, side);
    }
    double sup_coeff(double g_power, double theta, const Sv& b, Side side,
                     const std::string& what) const {
        return sup_coeff_td(TailDescriptor{g_power, 0.0, 1.0}, b, side, what, theta);
    }
    double sup_coeff_td(const TailDescriptor& td, const Sv& b, Side side,
                        const std::string& what, double theta = 0.0) const {
        const SvAsymptote ab = b.asymptote(side);
        detail::TailModel m;
        m.alpha = td.power - theta;
        m.Lambda = td.log_power + ab.log_pow;
        m.D = ab.loglog_pow;
        m.vanishes = false;
        if (!detail::tail_bounded(m, side)) throw NonConvergent(what, m.alpha);
        const double x0 = std::log(side == Side::lower ? grid_.tmin : grid_.tmax);
        return detail::tail_sup(1.0, x0, m, side);
    }

    double eval_standard() const {
        if (std::isinf(qout_)) {
            double best = 0.0;
            for (std::size_t j = 0; j < nhi_; ++j) best = std::max(best, B_[j] * K_[j]);
            return best;
        }
        double s = 0.0;
        for (std::size_t j = 0; j < nhi_; ++j) s += A_[j] * std::pow(K_[j], qout_);
        return s > 0.0 ? std::pow(s, 1.0 / qout_) : 0.0;
    }

    double eval_limiting(bool lower_inner) const {
        const double h = grid_.log_step();
        inner_.resize(n_);
        if (std::isinf(qin_)) {
            if (lower_inner) {
                double run = inner_seed_ * Win_[0] * K_[0];
                for (std::size_t j = 0; j < n_; ++j) {
                    run = std::max(run, Win_[j] * K_[j]);
                    inner_[j] = run;
                }
            } else {
                const std::size_t top = unit_ ? nhi_ : n_;
                double run = unit_ ? 0.0 : inner_seed_ * Win_[n_ - 1] * K_[n_ - 1];
                for (std::size_t j = top; j-- > 0;) {
                    run = std::max(run, Win_[j] * K_[j]);
                    inner_[j] = run;
                }
            }
        } else {
            psi_.resize(n_);
            for (std::size_t j = 0; j < n_; ++j)
                psi_[j] = Win_[j] * std::pow(K_[j], qin_);
            if (lower_inner) {
                double acc = inner_seed_ * psi_[0];
                inner_[0] = std::pow(acc, 1.0 / qin_);
                for (std::size_t j = 1; j < n_; ++j) {
                    acc += 0.5 * h * (psi_[j - 1] + psi_[j]);
                    inner_[j] = std::pow(acc, 1.0 / qin_);
                }
            } else {
                const std::size_t top = unit_ ? nhi_ : n_;
                double acc = unit_ ? 0.0 : inner_seed_ * psi_[n_ - 1];
                inner_[top - 1] = std::pow(acc, 1.0 / qin_);
                for (std::size_t j = top - 1; j-- > 0;) {
                    acc += 0.5 * h * (psi_[j] + psi_[j + 1]);
                    inner_[j] = std::pow(acc, 1.0 / qin_);
                }
            }
        }
        if (std::isinf(qout_)) {
            double best = 0.0;
            for (std::size_t j = 0; j < nhi_; ++j)
                best = std::max(best, Wba_[j] * inner_[j]);
            best = std::max(best, outer_lo_ * Wba_[0] * inner_[0]);
            if (!unit_)
                best = std::max(best, outer_hi_ * Wba_[nhi_ - 1] * inner_[nhi_ - 1]);
            return best;
        }
        double s = 0.0;
        for (std::size_t j = 0; j < nhi_; ++j)
            s += Cout_[j] * std::pow(Wba_[j] * inner_[j], qout_);
        s += outer_lo_ * std::pow(Wba_[0] * inner_[0], qout_);
        if (!unit_)
            s += outer_hi_ * std::pow(Wba_[nhi_ - 1] * inner_[nhi_ - 1], qout_);
        return s > 0.0 ? std::pow(s, 1.0 / qout_) : 0.0;
    }

    Kind kind_ = Kind::endpoint;
    int side_ = 0;
    DiscreteCouple c_;
    LogGrid grid_;
    bool unit_ = false;
    std::size_t n_ = 0, nhi_ = 0;
    double min_index_ = 1.0;
    std::vector<double> M_;

    double qout_ = 1.0, qin_ = 1.0;
    std::vector<double> A_, B_;            // standard-space coefficients
    std::vector<double> Win_, Wba_, Cout_;  // limiting-space coefficients
    double inner_seed_ = 0.0, outer_lo_ = 0.0, outer_hi_ = 0.0;

    mutable std::vector<double> fa_, K_, inner_, psi_;
};

inline ConvexNorm descriptor_norm_on_couple(const SpaceDescriptor& d,
                                            const DiscreteCouple& c,
                                            const LogGrid& grid) {
    auto p = std::make_shared<DescriptorNorm>(d, c, grid);
    return ConvexNorm{[p](const std::vector<double>& f) { return (*p)(f); },
                      p->min_index()};
}

/// Exact K(.,f) of a weighted-l1 couple, sampled with exact saturation tails.
inline KProfile exact_k_profile(const DiscreteCouple& c, const std::vector<double>& f,
                                const LogGrid& grid) {
    GridFunction fn =
        GridFunction::sample(grid, [&](double t) { return k_weighted_l1(c, f, t); });
    fn.set_lower_tail({1.0, 0.0, c.norm(1, f)});
    fn.set_upper_tail({0.0, 0.0, c.norm(0, f)});
    return KProfile{std::move(fn), "weighted-l1"};
}

// ---------------------------------------------------------------------------
// Ratio statistics.

struct RatioRow {
    double t = 0.0;  // abscissa: t for pointwise checks, member id for per-f checks
    int f_id = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 1.0;
};

struct RatioReport {
    std::vector<RatioRow> rows;
    int skipped = 0;         // members where one side vanished or was non-finite
    bool refined = false;    // whether a x2-resolution pass was run
    double refined_spread = 0.0;
    std::string note;

    double min_ratio() const {
        double m = kInf;
        for (const auto& r : rows) m = std::min(m, r.ratio);
        return m;
    }
    double max_ratio() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.ratio);
        return m;
    }
    double spread() const { return rows.empty() ? kInf : max_ratio() / min_ratio(); }
    double drift() const {
        if (!refined || rows.empty()) return 0.0;
        const double s = spread();
        return s > 0.0 ? std::fabs(refined_spread - s) / s : 0.0;
    }

    void add(double t, int f_id, double lhs, double rhs) {
        const double ratio = lhs / rhs;
        if (!(lhs > 0.0) || !(rhs > 0.0) || !std::isfinite(ratio)) {
            ++skipped;
            return;
        }
        rows.push_back({t, f_id, lhs, rhs, ratio});
    }

    std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "t,f_id,lhs,rhs,ratio\n";
        for (const auto& r : rows)
            os << r.t << ',' << r.f_id << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio
               << '\n';
        return os.str();
    }
    nlohmann::json to_json() const {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& r : rows)
            jr.push_back({{"t", r.t},
                          {"f_id", r.f_id},
                          {"lhs", r.lhs},
                          {"rhs", r.rhs},
                          {"ratio", r.ratio}});
        nlohmann::json j{{"rows", jr},
                         {"min", rows.empty() ? 0.0 : min_ratio()},
                         {"max", rows.empty() ? 0.0 : max_ratio()},
                         {"spread", rows.empty() ? 0.0 : spread()},
                         {"skipped", skipped},
                         {"counted", rows.size()}};
        if (refined) {
            j["refined_spread"] = refined_spread;
            j["drift"] = drift();
        }
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

// ---------------------------------------------------------------------------
// Rule-equivalence verification.

/// Default member family: n_couples weighted-l1 couples x n_vectors f's.
struct VerifyFamily {
    std::vector<DiscreteCouple> couples;
    std::vector<std::vector<double>> vectors;
};

inline VerifyFamily default_family(const VerifyOptions& opt, bool ordered) {
    FamilyGen gen(opt.seed);
    VerifyFamily fam;
    for (int i = 0; i < opt.n_couples; ++i)
        fam.couples.push_back(gen.couple(static_cast<std::size_t>(opt.dim), ordered));
    fam.vectors = gen.vector_family(static_cast<std::size_t>(opt.dim), opt.n_vectors);
    return fam;
}

/// For each (couple, f): LHS = outer norm of the K-profile of the derived
/// couple (operand norms via DescriptorNorm, K via the convex oracle); RHS =
/// interp_norm of the rule's result descriptor on the exact base K-profile.
inline RatioReport verify_equivalence(const RuleOutput& out, const RuleInput& in,
                                      const VerifyFamily& fam,
                                      const VerifyOptions& opt = {}) {
    const bool unit = in.mode() == IntervalMode::unit;

    auto run = [&](const LogGrid& eval_grid, const LogGrid& oracle_grid) {
        RatioReport rep;
        for (std::size_t ci = 0; ci < fam.couples.size(); ++ci) {
            const DiscreteCouple& c = fam.couples[ci];
            const ConvexNorm n0 = descriptor_norm_on_couple(in.left, c, eval_grid);
            const ConvexNorm n1 = descriptor_norm_on_couple(in.right, c, eval_grid);
            for (std::size_t fi = 0; fi < fam.vectors.size(); ++fi) {
                const auto& f = fam.vectors[fi];
                const KProfile kp = k_oracle(n0, n1, f, oracle_grid, opt.oracle);
                const double lhs = weighted_qnorm(kp.fn, in.outer.theta, in.outer.r,
                                                  in.outer.a, 0.0, unit ? 1.0 : kInf);
                const KProfile base = exact_k_profile(c, f, eval_grid);
                const double rhs = interp_norm(out.result, base);
                rep.add(static_cast<double>(ci), static_cast<int>(fi), lhs, rhs);
            }
        }
        return rep;
    };

    RatioReport rep = run(opt.eval_grid, opt.oracle_grid);
    if (opt.refine_check) {
        const RatioReport fine = run(opt.eval_grid.refined(2), opt.oracle_grid.refined(2));
        rep.refined = true;
        rep.refined_spread = fine.spread();
    }
    return rep;
}

inline RatioReport verify_equivalence(const RuleOutput& out, const RuleInput& in,
                                      const VerifyOptions& opt) {
    return verify_equivalence(out, in,
                              default_family(opt, in.mode() == IntervalMode::unit), opt);
}

// ---------------------------------------------------------------------------
// Canonical instances, one per catalogue rule (hypotheses satisfied).

inline RuleInput canonical_input(RuleId id) {
    const Sv one = Sv::one();
    const Sv up = Sv::log_pow(1.0);     // slowly growing weight
    const Sv dn = Sv::log_pow(-2.0);    // integrable tail weight
    auto S = [&](double th, Sv b) { return make_standard(th, 2.0, std::move(b)); };
    auto L = [&](double sg, Sv b) { return make_llim(sg, 2.0, std::move(b), 2.0, Sv::one()); };
    auto R = [&](double sg, Sv b) { return make_rlim(sg, 2.0, std::move(b), 2.0, Sv::one()); };
    auto mk = [&](SpaceDescriptor l, SpaceDescriptor r, double th, Sv a = Sv::one()) {
        RuleInput in;
        in.left = std::move(l);
        in.right = std::move(r);
        in.outer = OuterParams{th, 2.0, std::move(a)};
        return in;
    };
    auto lor = [&](const LorentzDescriptor& l, const LorentzDescriptor& r, double th,
                   Sv a = Sv::one()) {
        return mk(detail::lorentz_operand(l), detail::lorentz_operand(r), th, std::move(a));
    };
    const LorentzDescriptor l1 = make_karamata(1.0, 1.0);
    const LorentzDescriptor linf = make_karamata(kInf, 1.0);
    switch (id) {
        case RuleId::T7: return mk(S(0.3, up), S(0.7, dn), 0.5, up);
        case RuleId::T8i: return mk(S(0.0, dn), make_endpoint(1), 0.5, up);
        case RuleId::T8ii: return mk(make_endpoint(0), S(1.0, dn), 0.5, up);
        case RuleId::T9i: return mk(S(0.4, up), make_endpoint(1), 0.5, up);
        case RuleId::T9ii: return mk(S(0.3, up), S(1.0, dn), 0.5, up);
        case RuleId::T10i: return mk(S(0.4, up), make_endpoint(1), 0.0, dn);
        case RuleId::T10ii: return mk(S(0.3, up), S(1.0, dn), 0.0, dn);
        case RuleId::T10iii: return mk(S(0.3, up), S(0.7, dn), 0.0, dn);
        case RuleId::T11i: return mk(L(0.3, dn), S(0.7, up), 0.5, up);
        case RuleId::T11ii: return mk(L(0.3, dn), S(0.7, up), 1.0, dn);
        case RuleId::T12: return mk(L(0.3, dn), S(1.0, dn), 0.5, up);
        case RuleId::T13: return mk(L(0.3, dn), make_endpoint(1), 0.5, up);
        case RuleId::T15: return mk(make_endpoint(0), L(0.7, dn), 0.5, up);
        case RuleId::T16: return mk(S(0.0, dn), L(0.7, dn), 0.5, up);
        case RuleId::T18i: return mk(S(0.3, up), L(0.7, dn), 0.5, up);
        case RuleId::T18ii: return mk(S(0.3, up), L(0.7, dn), 0.0, dn);
        case RuleId::T19i: return mk(S(0.3, up), R(0.7, dn), 0.5, up);
        case RuleId::T19ii: return mk(S(0.3, up), R(0.7, dn), 0.0, dn);
        case RuleId::T20: return mk(S(0.0, dn), R(0.7, dn), 0.5, up);
        case RuleId::T21: return mk(make_endpoint(0), R(0.7, dn), 0.5, up);
        case RuleId::T22: return mk(R(0.3, dn), make_endpoint(1), 0.5, up);
        case RuleId::T23: return mk(R(0.3, dn), S(1.0, dn), 0.5, up);
        case RuleId::T24: return mk(R(0.3, dn), S(0.7, up), 0.5, up);
        case RuleId::T25: return mk(L(0.3, dn), L(0.7, dn), 0.5, up);
        case RuleId::T26: return mk(L(0.3, dn), R(0.7, dn), 0.5, up);
        case RuleId::T27: return mk(R(0.3, dn), R(0.7, dn), 0.5, up);
        case RuleId::T28: return mk(R(0.3, dn), L(0.7, dn), 0.5, up);
        case RuleId::T31:
            return mk(make_rlim(0.3, 2.0, dn, 2.0, one, IntervalMode::unit),
                      make_llim(0.7, 2.0, up, 2.0, one, IntervalMode::unit), 0.5, up);
        case RuleId::C37: return lor(make_small(2.0, 2.0, 2.0, dn), make_karamata(4.0, 2.0, up), 0.5, up);
        case RuleId::C38: return lor(make_small(2.0, 2.0, 2.0, dn), make_karamata(4.0, 2.0, up), 1.0, dn);
        case RuleId::C39: return lor(make_small(2.0, 2.0, 2.0, dn), linf, 0.5, up);
        case RuleId::C40: return lor(make_karamata(2.0, 2.0, up), make_small(4.0, 2.0, 2.0, dn), 0.5, up);
        case RuleId::C41: return lor(make_karamata(2.0, 2.0, up), make_small(4.0, 2.0, 2.0, dn), 0.0, dn);
        case RuleId::C42: return lor(l1, make_small(2.0, 2.0, 2.0, dn), 0.5, up);
        case RuleId::C43: return lor(make_karamata(2.0, 2.0, up), make_grand(4.0, 2.0, 2.0, dn), 0.5, up);
        case RuleId::C44: return lor(make_karamata(2.0, 2.0, up), make_grand(4.0, 2.0, 2.0, dn), 0.0, dn);
        case RuleId::C45: return lor(l1, make_grand(2.0, 2.0, 2.0, dn), 0.5, up);
        case RuleId::C46: return lor(make_grand(4.0 / 3.0, 2.0, 2.0, dn), make_karamata(4.0, 2.0, up), 0.5, up);
        case RuleId::C47: return lor(make_grand(4.0 / 3.0, 2.0, 2.0, dn), make_karamata(4.0, 2.0, up), 1.0, dn);
        case RuleId::C48: return lor(make_grand(4.0 / 3.0, 2.0, 2.0, dn), linf, 0.5, up);
        case RuleId::C49: return lor(make_small(4.0 / 3.0, 2.0, 2.0, dn), make_small(4.0, 2.0, 2.0, dn), 0.5, up);
        case RuleId::C50: return lor(make_small(4.0 / 3.0, 2.0, 2.0, dn), make_grand(4.0, 2.0, 2.0, dn), 0.5, up);
        case RuleId::C51: return lor(make_grand(4.0 / 3.0, 2.0, 2.0, dn), make_grand(4.0, 2.0, 2.0, dn), 0.5, up);
        case RuleId::C52: return lor(make_grand(4.0 / 3.0, 2.0, 2.0, dn), make_small(4.0, 2.0, 2.0, dn), 0.5, up);
        default:
            throw NoRuleMatches(std::string("no canonical couple-level instance for ") +
                                to_string(id));
    }
}

/// RuleIds exercised by the full equivalence matrix (criterion set).
inline std::vector<RuleId> matrix_rule_ids() {
    std::vector<RuleId> ids;
    for (RuleId id : all_rule_ids()) {
        const int v = static_cast<int>(id);
        if (v >= static_cast<int>(RuleId::P1) && v <= static_cast<int>(RuleId::P8)) continue;
        ids.push_back(id);
    }
    return ids;
}

// ---------------------------------------------------------------------------
// Unit-interval properties (the P-rules), checked on the (L1, Linf) couple
// with rearrangements supported inside (0,1].

inline RatioReport verify_property(RuleId id, const VerifyOptions& opt = {}) {
    const int v = static_cast<int>(id);
    if (v < static_cast<int>(RuleId::P1) || v > static_cast<int>(RuleId::P8))
        throw NoRuleMatches(std::string(to_string(id)) + " is not a unit-interval property");
    FamilyGen gen(opt.seed);
    const auto profiles = gen.profile_family(12, 1e-3, 1.0);
    const Sv one = Sv::one();
    const Sv up = Sv::log_pow(1.0);
    const Sv dn = Sv::log_pow(-2.0);
    const LogGrid& grid = opt.eval_grid;

    RatioReport rep;
    auto compare = [&](const SpaceDescriptor& lhs_d, const SpaceDescriptor& rhs_d) {
        int fi = 0;
        for (const auto& p : profiles) {
            if (p.is_zero()) continue;
            const KProfile K = k_l1_linf(p, grid);
            rep.add(fi, fi, interp_norm(lhs_d, K), interp_norm(rhs_d, K));
            ++fi;
        }
    };
    auto against_l1 = [&](const SpaceDescriptor& lhs_d) {
        int fi = 0;
        for (const auto& p : profiles) {
            if (p.is_zero()) continue;
            const KProfile K = k_l1_linf(p, grid);
            rep.add(fi, fi, interp_norm(lhs_d, K), p.total_mass());
            ++fi;
        }
    };

    switch (id) {
        case RuleId::P1:
            // full-line standard norm vs unit-interval norm (ordered model)
            compare(make_standard(0.5, 2.0, up),
                    make_standard(0.5, 2.0, up, IntervalMode::unit));
            rep.note = "standard space, full line vs unit interval";
            break;
        case RuleId::P2:
            // theta = 0 on the unit interval collapses to the first endpoint
            against_l1(make_standard(0.0, 2.0, dn, IntervalMode::unit));
            rep.note = "unit-interval standard space at theta = 0 vs the L1 norm";
            break;
        case RuleId::P3:
            // standard unit norm is dominated by the L-type unit norm
            compare(make_standard(0.5, 2.0, one, IntervalMode::unit),
                    make_llim(0.5, 2.0, up, 2.0, one, IntervalMode::unit));
            rep.note = "one-sided: standard <= C * L-limiting (unit interval)";
            break;
        case RuleId::P4:
            compare(make_llim(0.5, 2.0, dn, 2.0, one, IntervalMode::unit),
                    make_standard(0.5, 2.0, one, IntervalMode::unit));
            rep.note = "two-sided: L-limiting vs standard when the (0,1) tail is finite";
            break;
        case RuleId::P5: {
            // divergent (0,1) tail makes the unit R-space trivial
            const SpaceDescriptor d = make_rlim(0.5, 2.0, up, 2.0, one, IntervalMode::unit);
            const auto adm = validate(d);
            bool threw = false;
            try {
                interp_norm(d, k_l1_linf(profiles.front(), grid));
            } catch (const TrivialSpace&) {
                threw = true;
            }
            const bool ok = adm.verdict == Admissibility::trivial && threw;
            rep.add(0, 0, ok ? 1.0 : 2.0, 1.0);
            rep.note = "divergent unit R-space validated as trivial and rejected by interp_norm";
            break;
        }
        case RuleId::P6:
            compare(make_rlim(0.5, 2.0, dn, 2.0, one, IntervalMode::unit),
                    make_standard(0.5, 2.0, one, IntervalMode::unit));
            rep.note = "one-sided: R-limiting <= C * standard (unit interval)";
            break;
        case RuleId::P7:
            compare(make_llim(0.5, 2.0, dn, 2.0, one),
                    make_llim(0.5, 2.0, dn, 2.0, one, IntervalMode::unit));
            rep.note = "L-limiting space, full line vs unit interval";
            break;
        case RuleId::P8:
            compare(make_rlim(0.5, 2.0, dn, 2.0, one),
                    make_rlim(0.5, 2.0, dn, 2.0, one, IntervalMode::unit));
            rep.note = "R-limiting space, full line vs unit interval";
            break;
        default:
            break;
    }
    return rep;
}

}  // namespace ri
