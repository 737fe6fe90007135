// Command-line front end: norm evaluation, rule derivation, equivalence and
// Holmstedt verification, and the selftest matrix.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ri/errors.hpp"
#include "ri/families.hpp"
#include "ri/holmstedt.hpp"
#include "ri/kfunc.hpp"
#include "ri/reiteration.hpp"
#include "ri/spaces.hpp"
#include "ri/verify.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::string grid_spec;  // "tmin,tmax,ppd"
    double spread_bound = 100.0;
    bool refine_check = true;
    std::uint64_t seed = 0;
    std::vector<std::string> formats{"json"};
    std::string out_dir = ".";
    bool error_json = false;
};

ri::LogGrid parse_grid(const std::string& spec, const ri::LogGrid& fallback) {
    if (spec.empty()) return fallback;
    double tmin = 0, tmax = 0;
    int ppd = 0;
    if (std::sscanf(spec.c_str(), "%lf,%lf,%d", &tmin, &tmax, &ppd) != 3 ||
        !(tmin > 0.0) || !(tmax > tmin) || ppd <= 0)
        throw ri::RangeError("--grid expects tmin,tmax,ppd with 0 < tmin < tmax, ppd > 0");
    return ri::LogGrid{tmin, tmax, ppd};
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ri::RangeError("cannot open input file: " + path);
    json j;
    in >> j;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ri::RangeError("cannot open output file: " + path);
    out << content;
}

bool wants(const GlobalOpts& g, const std::string& fmt) {
    for (const auto& f : g.formats)
        if (f == fmt) return true;
    return false;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Static SVG scatter of ratio vs t (log x-axis, linear y).
std::string ratio_svg(const ri::RatioReport& rep) {
    const int W = 640, H = 400, ML = 60, MR = 20, MT = 20, MB = 40;
    double tmin = ri::kInf, tmax = 0.0, rmin = ri::kInf, rmax = 0.0;
    for (const auto& r : rep.rows) {
        tmin = std::min(tmin, r.t <= 0.0 ? 1.0 : r.t);
        tmax = std::max(tmax, r.t <= 0.0 ? 1.0 : r.t);
        rmin = std::min(rmin, r.ratio);
        rmax = std::max(rmax, r.ratio);
    }
    if (rep.rows.empty()) {
        tmin = 0.1; tmax = 10.0; rmin = 0.5; rmax = 2.0;
    }
    if (tmax <= tmin) tmax = tmin * 10.0;
    if (rmax <= rmin) rmax = rmin + 1.0;
    const double pad = 0.05 * (rmax - rmin);
    rmin -= pad;
    rmax += pad;
    auto px = [&](double t) {
        const double u = (std::log(t) - std::log(tmin)) / (std::log(tmax) - std::log(tmin));
        return ML + u * (W - ML - MR);
    };
    auto py = [&](double r) {
        const double u = (r - rmin) / (rmax - rmin);
        return H - MB - u * (H - MT - MB);
    };
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
       << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << (W - ML - MR)
       << "\" height=\"" << (H - MT - MB)
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    // horizontal reference at ratio 1 when visible
    if (rmin < 1.0 && rmax > 1.0)
        os << "<line x1=\"" << ML << "\" y1=\"" << py(1.0) << "\" x2=\"" << (W - MR)
           << "\" y2=\"" << py(1.0)
           << "\" stroke=\"#888888\" stroke-dasharray=\"4,4\"/>\n";
    for (const auto& r : rep.rows) {
        const double t = r.t <= 0.0 ? 1.0 : r.t;
        os << "<circle cx=\"" << px(t) << "\" cy=\"" << py(r.ratio)
           << "\" r=\"3\" fill=\"#1f6fb2\" fill-opacity=\"0.7\"/>\n";
    }
    os << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 8)
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">t "
          "(log scale)</text>\n";
    os << "<text x=\"14\" y=\"" << (H / 2)
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" "
          "transform=\"rotate(-90 14 "
       << (H / 2) << ")\">lhs / rhs</text>\n";
    os << "</svg>\n";
    return os.str();
}

void emit_report(const GlobalOpts& g, const std::string& stem, const ri::RatioReport& rep) {
    if (wants(g, "csv")) write_file(g.out_dir + "/" + stem + ".csv", rep.to_csv());
    if (wants(g, "json")) write_file(g.out_dir + "/" + stem + ".json", dump(rep.to_json()));
    if (wants(g, "svg")) write_file(g.out_dir + "/" + stem + ".svg", ratio_svg(rep));
}

// ---------------------------------------------------------------------------
// norm

int run_norm(const GlobalOpts& g, const std::string& space_path,
             const std::string& profile_path) {
    const ri::LogGrid grid = parse_grid(g.grid_spec, ri::LogGrid{});
    const json sj = load_json(space_path);
    const ri::DecreasingProfile prof = ri::DecreasingProfile::from_json(load_json(profile_path));
    const std::string kind = sj.at("kind").get<std::string>();
    ri::QuadDiag diag;
    double value = 0.0;
    if (kind == "karamata" || kind == "ltype" || kind == "rtype" || kind == "small" ||
        kind == "grand") {
        value = ri::lorentz_norm(ri::LorentzDescriptor::from_json(sj), prof, grid, &diag);
    } else {
        const ri::SpaceDescriptor d = ri::SpaceDescriptor::from_json(sj);
        const ri::KProfile K = ri::k_l1_linf(prof, grid);
        value = ri::interp_norm(d, K, &diag);
    }
    std::ostringstream os;
    os.precision(17);
    os << value;
    std::cout << "norm " << os.str() << "\n";
    std::cout << "tail_fraction " << diag.tail_fraction << "\n";
    if (wants(g, "json"))
        write_file(g.out_dir + "/norm.json",
                   dump(json{{"value", value}, {"tail_fraction", diag.tail_fraction}}));
    return 0;
}

// ---------------------------------------------------------------------------
// derive

int run_derive(const GlobalOpts& g, const std::string& input_path,
               const std::string& rule_name) {
    const ri::LogGrid grid = parse_grid(g.grid_spec, ri::LogGrid{});
    ri::RuleInput in;
    if (!input_path.empty()) {
        in = ri::RuleInput::from_json(load_json(input_path));
    } else {
        const auto id = ri::rule_from_string(rule_name);
        if (!id) throw ri::InvalidDescriptor("unknown rule id: " + rule_name);
        in = ri::canonical_input(*id);
    }
    const ri::RuleOutput out = ri::derive(in, grid);
    json j{{"input", in.to_json()}, {"output", out.to_json()}};
    std::cout << dump(j);
    if (wants(g, "json")) write_file(g.out_dir + "/derive.json", dump(j));
    return 0;
}

// ---------------------------------------------------------------------------
// verify-rule

int run_verify_rule(const GlobalOpts& g, const std::string& rule_name,
                    const std::string& input_path) {
    ri::VerifyOptions opt;
    opt.seed = g.seed;
    opt.refine_check = g.refine_check;
    if (!g.grid_spec.empty()) opt.eval_grid = parse_grid(g.grid_spec, opt.eval_grid);
    ri::RuleInput in;
    std::string stem = "verify_rule";
    if (!input_path.empty()) {
        in = ri::RuleInput::from_json(load_json(input_path));
    } else {
        const auto id = ri::rule_from_string(rule_name);
        if (!id) throw ri::InvalidDescriptor("unknown rule id: " + rule_name);
        in = ri::canonical_input(*id);
        stem = std::string("verify_") + ri::to_string(*id);
    }
    const ri::RuleOutput out = ri::derive(in, opt.eval_grid);
    const ri::RatioReport rep = ri::verify_equivalence(out, in, opt);
    std::cout << "rule " << ri::to_string(out.rule) << " members " << rep.rows.size()
              << " skipped " << rep.skipped << " spread " << rep.spread();
    if (rep.refined) std::cout << " drift " << rep.drift();
    std::cout << "\n";
    emit_report(g, stem, rep);
    return rep.spread() <= g.spread_bound ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify-holmstedt

int run_verify_holmstedt(const GlobalOpts& g, const std::string& theorem) {
    ri::FamilyGen gen(g.seed);
    ri::HolmstedtInstance inst;
    if (theorem == "T14") {
        inst.theorem = ri::HolmstedtInstance::Theorem::t14;
    } else if (theorem == "T17") {
        inst.theorem = ri::HolmstedtInstance::Theorem::t17;
        inst.theta0 = 0.3;
        inst.r0 = 2.0;
        inst.b0 = ri::Sv::log_pow(1.0);
    } else {
        throw ri::InvalidDescriptor("--theorem must be T14 or T17");
    }
    inst.theta1 = 0.6;
    inst.r1 = 2.0;
    inst.b1 = ri::Sv::log_pow(-2.0);
    inst.q1 = 2.0;
    inst.a1 = ri::Sv::one();
    if (!g.grid_spec.empty()) inst.eval_grid = parse_grid(g.grid_spec, inst.eval_grid);
    inst.couple = gen.couple(8);
    inst.t_grid = ri::holmstedt_t_grid(inst.couple);
    const auto family = gen.vector_family(8, 10);
    const ri::RatioReport rep = ri::verify(inst, family);
    std::cout << "theorem " << theorem << " rows " << rep.rows.size() << " skipped "
              << rep.skipped << " spread " << rep.spread() << "\n";
    emit_report(g, std::string("verify_holmstedt_") + theorem, rep);
    return rep.spread() <= g.spread_bound ? 0 : 1;
}

// ---------------------------------------------------------------------------
// selftest

struct SelfTest {
    int failures = 0;
    void line(const std::string& anchor, bool ok, const std::string& detail = "") {
        std::cout << anchor << ": " << (ok ? "PASS" : "FAIL");
        if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    }
};

int run_selftest(const GlobalOpts& g) {
    SelfTest st;
    const ri::LogGrid grid{1e-6, 1e6, 8};

    // Lemma 2 (iii): prefix integrals track their asymptote
    // (alpha q)^{-1/q} t^alpha b(t) within a fixed band.
    {
        bool ok = true;
        ri::GridFunction ones(grid, std::vector<double>(grid.size(), 1.0));
        ones.set_lower_tail({0.0, 0.0, 1.0});
        ones.set_upper_tail({0.0, 0.0, 1.0});
        for (double alpha : {0.25, 0.5, 1.0}) {
            for (double q : {1.0, 2.0, ri::kInf}) {
                const double c = std::isinf(q) ? 1.0 : std::pow(alpha * q, -1.0 / q);
                for (const ri::Sv& b : {ri::Sv::one(), ri::Sv::log_pow(1.0), ri::Sv::log_pow(-1.0)}) {
                    const ri::GridFunction pre =
                        ri::partial_qnorm(ones, -alpha, q, b, ri::Side::lower);
                    for (double t = 1e-6; t <= 1.0000001e6; t *= 100.0) {
                        const double ratio = pre(t) / (c * std::pow(t, alpha) * b(t));
                        ok = ok && ratio > 0.1 && ratio < 10.0;
                    }
                }
            }
        }
        st.line("Lemma 2(iii)", ok);
    }
    // Lemma 2 (iv): the materialized tail norm dominates the integrand factor.
    {
        bool ok = true;
        const ri::Sv b = ri::Sv::log_pow(-2.0);
        const ri::NumericSv c = ri::tail_qnorm(b, 2.0, ri::Side::upper, grid);
        for (double t = 1e-5; t <= 1.0000001e5; t *= 10.0)
            ok = ok && c(t) >= 0.05 * b(t);
        st.line("Lemma 2(iv)", ok);
    }
    // Lemma 4 (i): the chi_(1,2) anchor integrates to ln 2 on both sides.
    {
        const ri::LogGrid fine{1e-6, 1e6, 32};
        const ri::Staircase chi{{1.0, 2.0}, {0.0, 1.0}};
        ri::GridFunction I = ri::GridFunction::sample(
            fine, [&](double t) { return chi.integral(t); });
        I.set_lower_tail({0.0, 0.0, 0.0});
        I.set_upper_tail({0.0, 0.0, 1.0});
        const double lhs = ri::weighted_qnorm(I, 1.0, 1.0, ri::Sv::one(), 0.0, ri::kInf);
        const double rhs =
            ri::staircase_qnorm(chi, 0.0, 1.0, ri::Sv::one(), 0.0, ri::kInf, grid);
        st.line("Lemma 4", std::fabs(lhs - std::log(2.0)) < 1e-3 &&
                               std::fabs(rhs - std::log(2.0)) < 1e-3);
    }
    // Definition 5 admissibility verdicts.
    {
        using ri::Admissibility;
        bool ok = ri::validate(ri::make_standard(0.5, 2.0)).verdict ==
                      Admissibility::intermediate &&
                  ri::validate(ri::make_standard(0.0, 2.0, ri::Sv::log_pow(-2.0))).verdict ==
                      Admissibility::intermediate &&
                  ri::validate(ri::make_standard(0.0, 2.0)).verdict ==
                      Admissibility::not_intermediate &&
                  ri::validate(ri::make_rlim(0.5, 2.0, ri::Sv::log_pow(1.0), 2.0,
                                             ri::Sv::one(), ri::IntervalMode::unit))
                          .verdict == Admissibility::trivial;
        st.line("Definitions 5-6", ok);
    }
    // Formulae (6)/(7): swap is an involution.
    {
        ri::FamilyGen gen(g.seed + 17);
        bool ok = true;
        for (int i = 0; i < 25; ++i) {
            const ri::SpaceDescriptor d = gen.descriptor();
            const ri::SpaceDescriptor dd = ri::swap(ri::swap(d));
            ok = ok && ri::validate(dd).verdict == ri::validate(d).verdict;
        }
        st.line("Formulae (6)-(7)", ok);
    }

    // Rule matrix: canonical instance of every catalogue rule, reduced family.
    ri::VerifyOptions vopt;
    vopt.seed = g.seed;
    vopt.refine_check = false;
    vopt.n_couples = 2;
    vopt.n_vectors = 3;
    auto anchor_of = [](ri::RuleId id) -> std::string {
        const std::string s = ri::to_string(id);
        if (s[0] == 'T') return "Theorem " + s.substr(1);
        if (s[0] == 'C') return "Corollary " + s.substr(1);
        return s;
    };
    for (ri::RuleId id : ri::matrix_rule_ids()) {
        std::string anchor = anchor_of(id);
        if (anchor == "Theorem 8i") anchor = "Theorem 8(i)";
        if (anchor == "Theorem 8ii") anchor = "Theorem 8(ii)";
        if (anchor == "Theorem 9i") anchor = "Theorem 9(i)";
        if (anchor == "Theorem 9ii") anchor = "Theorem 9(ii)";
        if (anchor == "Theorem 10i") anchor = "Theorem 10(i)";
        if (anchor == "Theorem 10ii") anchor = "Theorem 10(ii)";
        if (anchor == "Theorem 10iii") anchor = "Theorem 10(iii)";
        if (anchor == "Theorem 11i") anchor = "Theorem 11(i)";
        if (anchor == "Theorem 11ii") anchor = "Theorem 11(ii)";
        if (anchor == "Theorem 18i") anchor = "Theorem 18(i)";
        if (anchor == "Theorem 18ii") anchor = "Theorem 18(ii)";
        if (anchor == "Theorem 19i") anchor = "Theorem 19(i)";
        if (anchor == "Theorem 19ii") anchor = "Theorem 19(ii)";
        try {
            const ri::RuleInput in = ri::canonical_input(id);
            const ri::RuleOutput out = ri::derive(in, vopt.eval_grid);
            const ri::RatioReport rep = ri::verify_equivalence(out, in, vopt);
            std::ostringstream det;
            det << "spread " << rep.spread();
            st.line(anchor, rep.spread() <= g.spread_bound && rep.skipped == 0, det.str());
        } catch (const std::exception& e) {
            st.line(anchor, false, e.what());
        }
    }

    // Unit-interval properties (i)-(viii).
    const char* prop_anchor[8] = {
        "Section 7 property (i)",   "Section 7 property (ii)",
        "Section 7 property (iii)", "Section 7 property (iv)",
        "Section 7 property (v)",   "Section 7 property (vi)",
        "Section 7 property (vii)", "Section 7 property (viii)"};
    for (int k = 0; k < 8; ++k) {
        const ri::RuleId pid = static_cast<ri::RuleId>(static_cast<int>(ri::RuleId::P1) + k);
        try {
            ri::VerifyOptions popt;
            popt.seed = g.seed;
            const ri::RatioReport rep = ri::verify_property(pid, popt);
            const bool two_sided = pid == ri::RuleId::P1 || pid == ri::RuleId::P4 ||
                                   pid == ri::RuleId::P7 || pid == ri::RuleId::P8 ||
                                   pid == ri::RuleId::P2 || pid == ri::RuleId::P5;
            const bool ok = two_sided ? rep.spread() <= g.spread_bound
                                      : rep.max_ratio() <= g.spread_bound;
            st.line(prop_anchor[k], ok && !rep.rows.empty());
        } catch (const std::exception& e) {
            st.line(prop_anchor[k], false, e.what());
        }
    }

    // Holmstedt formulae.
    for (const char* th : {"T14", "T17"}) {
        ri::FamilyGen gen(g.seed + 5);
        ri::HolmstedtInstance inst;
        inst.theorem = th[1] == '1' && th[2] == '4' ? ri::HolmstedtInstance::Theorem::t14
                                                    : ri::HolmstedtInstance::Theorem::t17;
        inst.theta0 = 0.3;
        inst.r0 = 2.0;
        inst.b0 = ri::Sv::log_pow(1.0);
        inst.theta1 = 0.6;
        inst.r1 = 2.0;
        inst.b1 = ri::Sv::log_pow(-2.0);
        inst.q1 = 2.0;
        inst.couple = gen.couple(8);
        inst.t_grid = ri::holmstedt_t_grid(inst.couple);
        const auto fam = gen.vector_family(8, 4);
        try {
            const ri::RatioReport rep = ri::verify(inst, fam);
            st.line(std::string("Theorem ") + (th + 1), rep.spread() <= g.spread_bound);
        } catch (const std::exception& e) {
            st.line(std::string("Theorem ") + (th + 1), false, e.what());
        }
    }

    std::cout << (st.failures == 0 ? "ALL PASS" : "FAILURES: ")
              << (st.failures == 0 ? std::string() : std::to_string(st.failures)) << "\n";
    return st.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"real-interpolation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOpts g;
    app.add_option("--grid", g.grid_spec, "evaluation grid as tmin,tmax,ppd");
    app.add_option("--spread-bound", g.spread_bound, "acceptance bound on max/min ratio");
    app.add_flag("--refine-check,!--no-refine-check", g.refine_check,
                 "re-run verification at x2 resolution");
    app.add_option("--seed", g.seed, "family seed (default 0)");
    app.add_option("--format", g.formats, "output formats: json, csv, svg")->delimiter(',');
    app.add_option("--out", g.out_dir, "output directory");
    app.add_flag("--error-json", g.error_json, "report errors as JSON on stdout");

    std::string space_path, profile_path, input_path, rule_name = "T25", theorem = "T14";
    auto* norm = app.add_subcommand("norm", "evaluate a space norm on a rearrangement");
    norm->add_option("--space", space_path, "space descriptor JSON")->required();
    norm->add_option("--profile", profile_path, "rearrangement JSON")->required();
    auto* derive = app.add_subcommand("derive", "apply a reiteration rule");
    derive->add_option("--input", input_path, "rule input JSON");
    derive->add_option("--rule", rule_name, "canonical instance of a rule id");
    auto* vrule = app.add_subcommand("verify-rule", "verify a rule's norm equivalence");
    vrule->add_option("--rule", rule_name, "rule id (canonical instance)");
    vrule->add_option("--input", input_path, "rule input JSON");
    auto* vhol = app.add_subcommand("verify-holmstedt", "verify a Holmstedt formula");
    vhol->add_option("--theorem", theorem, "T14 or T17");
    auto* self = app.add_subcommand("selftest", "run the invariant matrix");
    (void)self;

    CLI11_PARSE(app, argc, argv);

    try {
        if (norm->parsed()) return run_norm(g, space_path, profile_path);
        if (derive->parsed()) return run_derive(g, input_path, rule_name);
        if (vrule->parsed()) return run_verify_rule(g, rule_name, input_path);
        if (vhol->parsed()) return run_verify_holmstedt(g, theorem);
        return run_selftest(g);
    } catch (const std::exception& e) {
        if (g.error_json) {
            std::cout << nlohmann::json{{"error", true}, {"message", e.what()}}.dump()
                      << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return 2;
    }
}
