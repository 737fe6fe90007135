#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "ri/errors.hpp"

using namespace ri;
using namespace ritest;

TEST_CASE("weighted_qnorm anchors") {
    const LogGrid grid{1e-6, 1e6, 32};
    CHECK(weighted_qnorm(fn_min_t_1(grid), 0.5, 2.0, Sv::one(), 0.0, kInf) ==
          Catch::Approx(std::sqrt(2.0)).epsilon(1e-3));
    CHECK(weighted_qnorm(fn_min_t_1(grid), 1.0, kInf, Sv::one(), 0.0, kInf) ==
          Catch::Approx(1.0).epsilon(1e-9));
    CHECK(weighted_qnorm(fn_min_t_1(grid), 0.5, 2.0, Sv::one(), 2.0, 2.0) == 0.0);
}

TEST_CASE("hand-integrable norms at two resolutions") {
    const LogGrid coarse{1e-6, 1e6, 32};
    const LogGrid fine = coarse.refined(2);
    for (const ClosedFormCase& cs : closed_form_cases()) {
        INFO(cs.name);
        CHECK(rel_err(cs.compute(coarse), cs.exact) <= 1e-3);
        CHECK(rel_err(cs.compute(fine), cs.exact) <= 2.5e-4);
    }
}

TEST_CASE("partial norms: anchors and consistency") {
    const LogGrid grid{1e-6, 1e6, 32};
    const GridFunction g = fn_min_t_1(grid);
    SECTION("value at t=1 for min(u,1)") {
        const GridFunction lo = partial_qnorm(g, 0.5, 2.0, Sv::one(), Side::lower);
        const GridFunction hi = partial_qnorm(g, 0.5, 2.0, Sv::one(), Side::upper);
        // lower: int_0^1 (u^{-1/2} u)^2 dlnu = int_0^1 du = 1
        CHECK(lo(1.0) == Catch::Approx(1.0).epsilon(1e-3));
        // upper: int_1^inf (u^{-1/2})^2 dlnu = int_1^inf u^{-2} du = 1
        CHECK(hi(1.0) == Catch::Approx(1.0).epsilon(1e-3));
    }
    SECTION("zero input stays zero") {
        GridFunction z(grid, std::vector<double>(grid.size(), 0.0));
        z.set_lower_tail({0.0, 0.0, 0.0});
        z.set_upper_tail({0.0, 0.0, 0.0});
        const GridFunction p = partial_qnorm(z, 0.3, 2.0, Sv::one(), Side::lower);
        for (double t : {1e-5, 1.0, 1e5}) CHECK(p(t) == 0.0);
    }
    SECTION("prefix sweep matches the full norm at the far end") {
        GridFunction chi = GridFunction::sample(
            grid, [](double u) { return u <= 1.0 ? 1.0 : 0.0; });
        chi.set_lower_tail({0.0, 0.0, 1.0});
        chi.set_upper_tail({0.0, 0.0, 0.0});
        const GridFunction pre = partial_qnorm(chi, -0.25, 2.0, Sv::one(), Side::lower);
        const double full = weighted_qnorm(chi, -0.25, 2.0, Sv::one(), 0.0, kInf);
        CHECK(pre(grid.tmax) == Catch::Approx(full).epsilon(1e-6));
        const GridFunction suf = partial_qnorm(chi, -0.25, 2.0, Sv::one(), Side::upper);
        const double from_tmin =
            weighted_qnorm(chi, -0.25, 2.0, Sv::one(), grid.tmin, kInf);
        CHECK(suf(grid.tmin) == Catch::Approx(from_tmin).epsilon(1e-6));
    }
}

TEST_CASE("divergent improper integrals throw") {
    const LogGrid grid{1e-6, 1e6, 32};
    const GridFunction one = fn_one(grid);
    CHECK_THROWS_AS(weighted_qnorm(one, 0.5, 2.0, Sv::one(), 0.0, kInf), NonConvergent);
    CHECK_THROWS_AS(weighted_qnorm(one, -0.5, 2.0, Sv::one(), 1.0, kInf), NonConvergent);
    CHECK_THROWS_AS(weighted_qnorm(one, 0.0, 2.0, Sv::one(), 0.0, 1.0), NonConvergent);
}

TEST_CASE("prefix-integral inequality: indicator anchor") {
    const LogGrid grid{1e-6, 1e6, 32};
    // g = indicator of (1,2): both sides of the nu=-1, P=1 instance equal ln 2.
    const Staircase chi{{1.0, 2.0}, {0.0, 1.0}};
    const double lhs = hardy_lhs(chi, -1.0, 1.0, Sv::one(), grid);
    const double rhs = hardy_rhs(chi, -1.0, 1.0, Sv::one(), grid);
    CHECK(std::fabs(lhs - std::log(2.0)) < 1e-3);
    CHECK(std::fabs(rhs - std::log(2.0)) < 1e-3);
}

TEST_CASE("prefix-integral inequality: randomized staircases") {
    const LogGrid grid{1e-6, 1e6, 32};
    const std::vector<Sv> bs = {Sv::one(), Sv::log_pow(1.0), Sv::log_pow(-1.0)};
    int id = 0;
    for (double nu : {-0.5, -1.0}) {
        for (double P : {1.0, 2.0, kInf}) {
            for (const Sv& b : bs) {
                INFO("nu=" << nu << " P=" << P << " b#" << (id % 3));
                CHECK(hardy_max_ratio(nu, P, b, 12, 900 + id, grid) <= 10.0);
                ++id;
            }
        }
    }
}

TEST_CASE("suffix-integral inequality for positive exponents") {
    const LogGrid grid{1e-6, 1e6, 32};
    int id = 0;
    for (double nu : {0.5, 1.0}) {
        for (double P : {1.0, 2.0}) {
            INFO("nu=" << nu << " P=" << P);
            CHECK(hardy_max_ratio(nu, P, Sv::one(), 12, 700 + id, grid) <= 10.0);
            ++id;
        }
    }
}

TEST_CASE("staircase norms agree with grid quadrature") {
    const LogGrid grid{1e-6, 1e6, 32};
    FamilyGen gen(31);
    for (int i = 0; i < 10; ++i) {
        const Staircase g = random_staircase(gen);
        const double exact = staircase_qnorm(g, 0.25, 2.0, Sv::one(), 0.0, kInf, grid);
        GridFunction gf = GridFunction::sample(grid, [&](double t) { return g.at(t); });
        gf.set_lower_tail({0.0, 0.0, 0.0});
        gf.set_upper_tail({0.0, 0.0, 0.0});
        const double quad = weighted_qnorm(gf, 0.25, 2.0, Sv::one(), 0.0, kInf);
        CHECK(rel_err(quad, exact) < 5e-2);
    }
}
