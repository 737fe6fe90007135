#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "ri/errors.hpp"

using namespace ri;
using namespace ritest;

namespace {

HolmstedtInstance base_instance(HolmstedtInstance::Theorem th, std::uint64_t seed) {
    HolmstedtInstance inst;
    inst.theorem = th;
    inst.theta0 = 0.3;
    inst.r0 = 2.0;
    inst.b0 = Sv::log_pow(1.0);
    inst.theta1 = 0.6;
    inst.r1 = 2.0;
    inst.b1 = Sv::log_pow(-2.0);
    inst.q1 = 2.0;
    inst.a1 = Sv::one();
    FamilyGen gen(seed);
    inst.couple = gen.couple(8);
    inst.t_grid = holmstedt_t_grid(inst.couple);
    return inst;
}

}  // namespace

TEST_CASE("instance hypothesis checks") {
    HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 3);
    CHECK_NOTHROW(inst.check());
    SECTION("theta1 out of range") {
        inst.theta1 = 1.2;
        CHECK_THROWS_AS(inst.check(), HypothesisFailed);
    }
    SECTION("quasi-norm index below 1") {
        inst.r1 = 0.5;
        CHECK_THROWS_AS(inst.check(), NonConvexIndices);
    }
    SECTION("divergent c1 tail") {
        inst.b1 = Sv::one();
        CHECK_THROWS_AS(inst.check(), HypothesisFailed);
    }
    SECTION("t17 ordering") {
        inst.theorem = HolmstedtInstance::Theorem::t17;
        inst.theta0 = 0.9;
        CHECK_THROWS_AS(inst.check(), HypothesisFailed);
    }
}

TEST_CASE("rhs vanishes on the zero vector") {
    const HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 5);
    const std::vector<double> zero(inst.couple.dim(), 0.0);
    const KProfile K = exact_k_profile(inst.couple, zero, inst.eval_grid);
    const GridFunction rhs = rhs_t14(K, inst);
    for (double v : rhs.samples()) CHECK(v == 0.0);
}

TEST_CASE("rhs dominates the couple profile pointwise") {
    const HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 7);
    FamilyGen gen(71);
    const std::vector<double> f = gen.vector_f(8, 0);
    const KProfile K = exact_k_profile(inst.couple, f, inst.eval_grid);
    const GridFunction rhs = rhs_t14(K, inst);
    for (std::size_t i = 0; i < inst.t_grid.size(); ++i) {
        const double t = inst.t_grid.point(i);
        CHECK(rhs.samples()[i] >= K.fn(t) * (1.0 - 1e-9));
    }
}

TEST_CASE("double norm collapses for trivial outer data") {
    // a1 = b1 = 1, r1 = inf: the double norm equals the plain suffix norm.
    HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 9);
    inst.b1 = Sv::one();
    inst.r1 = kInf;
    FamilyGen gen(91);
    const std::vector<double> f = gen.vector_f(8, 1);
    const KProfile K = exact_k_profile(inst.couple, f, inst.eval_grid);
    const Sv c1 = holmstedt_c1(inst);
    const GridFunction rhs = rhs_t14(K, inst);
    // independent evaluation at 10x resolution
    const LogGrid fine{inst.eval_grid.tmin, inst.eval_grid.tmax,
                       inst.eval_grid.points_per_decade * 10};
    const KProfile Kf = exact_k_profile(inst.couple, f, fine);
    const GridFunction suffix =
        partial_qnorm(Kf.fn, inst.theta1, inst.q1, inst.a1, Side::upper);
    for (std::size_t i = 0; i < inst.t_grid.size(); ++i) {
        const double t = inst.t_grid.point(i);
        const double want = Kf.fn(t) + std::pow(t, inst.theta1) * suffix(t);
        CHECK(rhs.samples()[i] == Catch::Approx(want).epsilon(2e-2));
    }
    // c1 is identically 1 here, so rho(t) = t^{theta1}
    for (double t : {1e-2, 1.0, 1e2})
        CHECK(holmstedt_rho(inst, c1, t) ==
              Catch::Approx(std::pow(t, inst.theta1)).epsilon(1e-6));
}

TEST_CASE("two-sided bound holds on random couples") {
    FamilyGen gen(13);
    for (auto th : {HolmstedtInstance::Theorem::t14, HolmstedtInstance::Theorem::t17}) {
        const HolmstedtInstance inst = base_instance(th, 17);
        const auto family = gen.vector_family(8, 4);
        const RatioReport rep = verify(inst, family);
        INFO((th == HolmstedtInstance::Theorem::t14 ? "t14" : "t17"));
        CHECK(rep.skipped == 0);
        CHECK(rep.spread() <= 100.0);
    }
}

TEST_CASE("ratios are invariant under scaling the data") {
    const HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 19);
    FamilyGen gen(23);
    auto family = gen.vector_family(8, 3);
    const RatioReport rep = verify(inst, family);
    for (auto& f : family)
        for (double& v : f) v *= 3.0;
    const RatioReport rep3 = verify(inst, family);
    REQUIRE(rep.rows.size() == rep3.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
        CHECK(std::fabs(rep3.rows[i].ratio - rep.rows[i].ratio) <= 1e-6);
}

TEST_CASE("single-coordinate data has a closed-form couple functional") {
    const HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 29);
    const SpaceDescriptor x1d =
        make_llim(inst.theta1, inst.r1, inst.b1, inst.q1, inst.a1);
    const ConvexNorm x1 =
        descriptor_norm_on_couple(x1d, inst.couple, inst.eval_grid);
    const DiscreteCouple c = inst.couple;
    const ConvexNorm x0{[c](const std::vector<double>& v) { return c.norm(0, v); }, 1.0};
    std::vector<double> f(c.dim(), 0.0);
    f[2] = 1.7;
    const OracleOptions strict{1e-6, 80, false};
    for (double s : {1e-2, 1.0, 1e2}) {
        const double want = std::min(x0(f), s * x1(f));
        CHECK(k_oracle_value(x0, x1, f, s, nullptr, strict) ==
              Catch::Approx(want).epsilon(1e-5));
    }
}

TEST_CASE("auxiliary functions stay in their asymptotic bands") {
    const HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t17, 31);
    const Sv c1 = holmstedt_c1(inst);
    const double C = 20.0;
    for (double t : {1e-2, 1e-1, 1.0, 1e1, 1e2}) {
        const double s1 = std::pow(t, 1.0 - inst.theta1) * c1(t);
        CHECK(aux_g1(inst, t) <= C * s1);
        const double h1r = aux_h1(inst, t) / s1;
        CHECK(h1r <= C);
        CHECK(h1r >= 1.0 / C);
        const double s0 = std::pow(t, 1.0 - inst.theta0) * inst.b0(t);
        const double g0r = aux_g0(inst, t) / s0;
        CHECK(g0r <= C);
        CHECK(g0r >= 1.0 / C);
        const double h0r = aux_h0(inst, t) / s0;
        CHECK(h0r <= C);
        CHECK(h0r >= 1.0 / C);
    }
}

TEST_CASE("suffix norms embed when the outer index drops") {
    const HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 37);
    FamilyGen gen(41);
    const std::vector<double> f = gen.vector_f(8, 2);
    const KProfile K = exact_k_profile(inst.couple, f, inst.eval_grid);
    const GridFunction s2 =
        partial_qnorm(K.fn, inst.theta1, 2.0, Sv::one(), Side::upper);
    const GridFunction s1 =
        partial_qnorm(K.fn, inst.theta1, 1.0, Sv::one(), Side::upper);
    for (double t : {1e-2, 1.0, 1e2}) CHECK(s2(t) <= 10.0 * s1(t));
}

TEST_CASE("double norm is bounded by the product of its factors") {
    const HolmstedtInstance inst = base_instance(HolmstedtInstance::Theorem::t14, 43);
    FamilyGen gen(47);
    const std::vector<double> f = gen.vector_f(8, 0);
    const KProfile K = exact_k_profile(inst.couple, f, inst.eval_grid);
    detail::DoubleNorm D(K.fn, inst.theta1, inst.q1, inst.a1, inst.r1,
                         inst.b1 / inst.a1);
    const NumericSv tail = tail_qnorm(inst.b1 / inst.a1, inst.r1, Side::upper,
                                      inst.eval_grid);
    const GridFunction suffix =
        partial_qnorm(K.fn, inst.theta1, inst.q1, inst.a1, Side::upper);
    for (double t : {1e-2, 1.0, 1e2})
        CHECK(D(t) <= 1.05 * tail(t) * suffix(t));
}
