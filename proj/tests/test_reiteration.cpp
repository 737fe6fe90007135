#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "ri/errors.hpp"

using namespace ri;
using namespace ritest;

namespace {

VerifyOptions small_options(std::uint64_t seed = 0) {
    VerifyOptions opt;
    opt.seed = seed;
    opt.n_couples = 2;
    opt.n_vectors = 3;
    opt.refine_check = false;
    return opt;
}

}  // namespace

TEST_CASE("rule T7: all-constant instance") {
    RuleInput in{make_standard(0.25, 2.0), make_standard(0.75, 2.0),
                 {0.5, 2.0, Sv::one()}};
    const RuleOutput out = derive(in);
    CHECK(out.rule == RuleId::T7);
    CHECK(out.eta == 0.5);
    const auto& s = std::get<Standard>(out.result.form);
    CHECK(s.theta == 0.5);
    CHECK(s.q == 2.0);
    for (double t : {1e-4, 0.5, 1.0, 7.0, 1e4})
        CHECK(out.a_sharp(t) == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rule T11i: weight is the square root of the tail coefficient") {
    RuleInput in{make_llim(0.25, kInf, Sv::log_pow(-1.0), 2.0, Sv::one()),
                 make_standard(0.75, 2.0), {0.5, 2.0, Sv::one()}};
    const RuleOutput out = derive(in);
    CHECK(out.rule == RuleId::T11i);
    CHECK(out.eta == 0.5);
    REQUIRE(out.c0.has_value());
    // c0(t) = sup_{s>t} (1+|ln s|)^{-1} = 1 for t <= 1, 1/(1+ln t) beyond
    const LogGrid probe{1e-4, 1e4, 1};
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double t = probe.point(i);
        const double c0 = t <= 1.0 ? 1.0 : 1.0 / (1.0 + std::log(t));
        CHECK(out.a_sharp(t) == Catch::Approx(std::sqrt(c0)).epsilon(2e-2));
    }
}

TEST_CASE("rule T25: divergent left tail coefficient is rejected") {
    RuleInput in{make_llim(0.3, 2.0, Sv::one(), 2.0, Sv::one()),
                 make_llim(0.7, 2.0, Sv::log_pow(-2.0), 2.0, Sv::one()),
                 {0.5, 2.0, Sv::one()}};
    CHECK_THROWS_AS(derive(in), HypothesisFailed);
}

TEST_CASE("eta arithmetic is exact for interior rules") {
    for (RuleId id : {RuleId::T7, RuleId::T25, RuleId::T26, RuleId::T27}) {
        const RuleInput in = canonical_input(id);
        const RuleOutput out = derive(in);
        CHECK(out.rule == id);
        CHECK(out.eta == (1.0 - in.outer.theta) * 0.3 + in.outer.theta * 0.7);
    }
}

TEST_CASE("mirrored derivations agree for symmetry-based rules") {
    for (RuleId id : {RuleId::T19i, RuleId::T20, RuleId::T21, RuleId::T22, RuleId::T23,
                      RuleId::T24, RuleId::T27}) {
        INFO(to_string(id));
        const RuleInput x = canonical_input(id);
        const RuleInput y = mirrored(x);
        const RuleOutput ox = derive(x);
        const RuleOutput oy = derive(y);
        CHECK(ox.rule == id);
        CHECK(ox.eta + oy.eta == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(ox.result.form.index() ==
              ri::swap(oy.result).form.index());
        if (const auto* sx = std::get_if<Standard>(&ox.result.form)) {
            const auto& sy = std::get<Standard>(oy.result.form);
            CHECK(sx->theta + sy.theta == Catch::Approx(1.0).epsilon(1e-12));
            CHECK(sx->q == sy.q);
            // mirrored weight: a#_X(t) equals a#_Y(1/t) up to quadrature noise
            for (double t : {1e-2, 1.0, 1e2})
                CHECK(sx->b(t) == Catch::Approx(sy.b(1.0 / t)).epsilon(0.05));
        }
    }
}

TEST_CASE("proof-chain consistency of T10iii, T8i and T25") {
    const ChainResult res = run_chain(small_options(3));
    CHECK(res.eta_exact);
    CHECK(res.report.skipped == 0);
    CHECK(res.report.spread() <= 100.0);
}

TEST_CASE("verify_equivalence: empty family is flagged, not crashed") {
    const RuleInput in = canonical_input(RuleId::T7);
    const RuleOutput out = derive(in);
    const RatioReport rep = verify_equivalence(out, in, VerifyFamily{}, small_options());
    CHECK(rep.rows.empty());
    CHECK(std::isinf(rep.spread()));
}

TEST_CASE("verify_equivalence: constant-weight T7 is tight") {
    RuleInput in{make_standard(0.25, 2.0), make_standard(0.75, 2.0),
                 {0.5, 2.0, Sv::one()}};
    const RuleOutput out = derive(in);
    const RatioReport rep = verify_equivalence(out, in, small_options(5));
    CHECK(rep.skipped == 0);
    CHECK(rep.spread() <= 10.0);
}

TEST_CASE("verify_equivalence: T25 with refinement drift") {
    const RuleInput in = canonical_input(RuleId::T25);
    const RuleOutput out = derive(in);
    VerifyOptions opt = small_options(7);
    opt.refine_check = true;
    const RatioReport rep = verify_equivalence(out, in, opt);
    CHECK(rep.skipped == 0);
    CHECK(rep.spread() <= 100.0);
    CHECK(rep.drift() <= 0.10);
}

TEST_CASE("verify_equivalence spread is scale invariant") {
    const RuleInput in = canonical_input(RuleId::T7);
    const RuleOutput out = derive(in);
    const VerifyOptions opt = small_options(9);
    VerifyFamily fam = default_family(opt, false);
    const double base = verify_equivalence(out, in, fam, opt).spread();
    for (auto& f : fam.vectors)
        for (double& v : f) v *= 2.0;
    const double scaled = verify_equivalence(out, in, fam, opt).spread();
    CHECK(std::fabs(scaled - base) / base <= 0.05);
}

TEST_CASE("lorentz specialization of the catalogue") {
    SECTION("C37 exponent arithmetic") {
        const LorentzRuleOutput out =
            specialize_lorentz(make_small(2.0, 2.0, 1.0, Sv::log_pow(-2.0)),
                               make_karamata(4.0, 2.0), {0.5, 2.0, Sv::one()});
        CHECK(out.corollary == RuleId::C37);
        CHECK(out.p == Catch::Approx(8.0 / 3.0).epsilon(1e-12));
        REQUIRE(out.base.c0.has_value());
        for (double t : {1e-2, 1.0, 1e2})
            CHECK(out.base.a_sharp(t) ==
                  Catch::Approx(std::sqrt((*out.base.c0)(t))).epsilon(1e-6));
    }
    SECTION("C47 grand-type result") {
        const LorentzRuleOutput out =
            specialize_lorentz(make_grand(4.0 / 3.0, 2.0, 2.0, Sv::log_pow(-2.0)),
                               make_karamata(4.0, 2.0), {1.0, 2.0, Sv::log_pow(-2.0)});
        CHECK(out.corollary == RuleId::C47);
        CHECK(std::holds_alternative<RType>(out.result.form));
    }
    SECTION("p = 1 operand is rejected") {
        CHECK_THROWS_AS(
            specialize_lorentz(make_small(1.0, 2.0, 2.0, Sv::log_pow(-2.0)),
                               make_karamata(4.0, 2.0), {0.5, 2.0, Sv::one()}),
            InvalidDescriptor);
    }
}

TEST_CASE("rule input and output serialization") {
    const RuleInput in = canonical_input(RuleId::T25);
    const RuleInput back = RuleInput::from_json(in.to_json());
    CHECK(back.to_json() == in.to_json());
    const RuleOutput out = derive(in);
    const nlohmann::json j = out.to_json();
    CHECK(j.at("rule") == "T25");
    CHECK(j.contains("result"));
    CHECK(j.contains("eta"));
    CHECK(j.contains("a_sharp"));
    CHECK(j.at("rho").contains("lambda"));
    CHECK(j.contains("sigma_ratio_bound"));
    CHECK(j.contains("hypotheses"));
}
