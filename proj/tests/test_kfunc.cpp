#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "ri/errors.hpp"

using namespace ri;
using namespace ritest;

namespace {

// Independent brute-force value of the couple functional: the optimal split
// g for a weighted-l1 pair is attained at a corner of the box [0,f], so
// enumerating all 2^n corners is an exact oracle for small n.
double corner_oracle(const DiscreteCouple& c, const std::vector<double>& f, double t) {
    const std::size_t n = f.size();
    double best = kInf;
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t(1) << i))
                v += c.w0[i] * std::fabs(f[i]);
            else
                v += t * c.w1[i] * std::fabs(f[i]);
        }
        best = std::min(best, v);
    }
    return best;
}

}  // namespace

TEST_CASE("decreasing rearrangement of weighted pieces") {
    const DecreasingProfile p = rearrange({{3.0, 1.0}, {1.0, 2.0}});
    REQUIRE(p.values().size() == 2);
    CHECK(p.values()[0] == 3.0);
    CHECK(p.values()[1] == 1.0);
    CHECK(p.edges()[0] == 1.0);
    CHECK(p.edges()[1] == 3.0);
    CHECK(p.total_mass() == Catch::Approx(5.0));

    // already sorted input is reproduced; zero-mass profile is empty
    const DecreasingProfile q = rearrange({{1.0, 2.0}, {3.0, 1.0}});
    CHECK(q.values() == p.values());
    CHECK(rearrange({}).is_zero());
    CHECK_THROWS_AS(rearrange({{-1.0, 1.0}}), RangeError);
    CHECK_THROWS_AS(rearrange({{1.0, 0.0}}), RangeError);
}

TEST_CASE("exact couple profile of an indicator") {
    const LogGrid grid{1e-6, 1e6, 16};
    const KProfile K = chi01_k(grid);
    // exact at sample points and in both tails; log-linear between samples
    for (std::size_t i = 0; i < grid.size(); i += 7) {
        const double t = grid.point(i);
        CHECK(K.fn(t) == Catch::Approx(std::min(t, 1.0)).epsilon(1e-9));
    }
    for (double t : {1e-9, 1e9})
        CHECK(K.fn(t) == Catch::Approx(std::min(t, 1.0)).epsilon(1e-9));
    for (double t : {1e-3, 0.5, 3.0})
        CHECK(K.fn(t) == Catch::Approx(std::min(t, 1.0)).epsilon(5e-3));
}

TEST_CASE("maximal function identity t*f** = profile value") {
    const LogGrid grid{1e-6, 1e6, 16};
    FamilyGen gen(7);
    for (int s = 0; s < 3; ++s) {
        const DecreasingProfile p = gen.profile(s);
        if (p.is_zero()) continue;
        const KProfile K = k_l1_linf(p, grid);
        const GridFunction M = maximal(p, grid);
        for (double t : {1e-8, 1e-2, 1.0, 1e2, 1e8})
            CHECK(t * M(t) == Catch::Approx(K.fn(t)).epsilon(1e-9));
    }
}

TEST_CASE("weighted-l1 couple functional anchors") {
    DiscreteCouple c;
    c.w0 = {1.0, 1.0};
    c.w1 = {1.0, 4.0};
    const std::vector<double> f = {1.0, 1.0};
    CHECK(k_weighted_l1(c, f, 0.5) == Catch::Approx(1.5).epsilon(1e-12));
    CHECK(k_weighted_l1(c, f, 0.5) == Catch::Approx(corner_oracle(c, f, 0.5)).epsilon(1e-6));
    CHECK(k_weighted_l1(c, f, 2.0) == Catch::Approx(2.0).epsilon(1e-12));

    FamilyGen gen(13);
    for (int i = 0; i < 20; ++i) {
        const DiscreteCouple rc = gen.couple(6);
        const std::vector<double> rf = gen.vector_f(6, i % 3);
        const double t = gen.log_uniform(1e-3, 1e3);
        CHECK(k_weighted_l1(rc, rf, t) ==
              Catch::Approx(corner_oracle(rc, rf, t)).epsilon(1e-12).margin(1e-300));
    }
}

TEST_CASE("couple functional symmetry under swapping") {
    FamilyGen gen(17);
    for (int i = 0; i < 20; ++i) {
        const DiscreteCouple c = gen.couple(8);
        const std::vector<double> f = gen.vector_f(8, i % 3);
        const double t = gen.log_uniform(1e-4, 1e4);
        const double lhs = k_weighted_l1(c, f, t);
        const double rhs = t * k_weighted_l1(c.swapped(), f, 1.0 / t);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12).margin(1e-300));
    }
}

TEST_CASE("ordered couples flatten exactly") {
    FamilyGen gen(19);
    for (int i = 0; i < 5; ++i) {
        const DiscreteCouple c = gen.couple(8, true);
        const std::vector<double> f = gen.vector_f(8, i % 3);
        const double n0 = c.norm(0, f);
        for (double t : {1.0, 2.0, 10.0, 1e4})
            CHECK(k_weighted_l1(c, f, t) == Catch::Approx(n0).epsilon(1e-12));
    }
}

TEST_CASE("numeric oracle matches the closed form") {
    FamilyGen gen(29);
    const OracleOptions strict{1e-6, 80, false};
    for (int i = 0; i < 10; ++i) {
        const DiscreteCouple c = gen.couple(6 + 2 * (i % 3));
        const std::vector<double> f = gen.vector_f(c.dim(), i % 3);
        const ConvexNorm n0{[c](const std::vector<double>& v) { return c.norm(0, v); }, 1.0};
        const ConvexNorm n1{[c](const std::vector<double>& v) { return c.norm(1, v); }, 1.0};
        for (int k = 0; k < 3; ++k) {
            const double t = gen.log_uniform(1e-3, 1e3);
            const double got = k_oracle_value(n0, n1, f, t, nullptr, strict);
            const double want = k_weighted_l1(c, f, t);
            CHECK(rel_err(got, want) < 1e-4);
        }
    }
}

TEST_CASE("numeric oracle: homogeneity and degenerate input") {
    DiscreteCouple c;
    c.w0 = {1.0, 1.0, 1.0};
    c.w1 = {1.0, 1.0, 1.0};
    const ConvexNorm n0{[c](const std::vector<double>& v) { return c.norm(0, v); }, 1.0};
    const ConvexNorm n1{[c](const std::vector<double>& v) { return c.norm(1, v); }, 1.0};
    const std::vector<double> f = {1.0, 2.0, 0.5};
    const OracleOptions strict{1e-6, 80, false};
    // identical norms: K(t,f) = min(1,t) * ||f||
    for (double t : {0.25, 1.0, 4.0})
        CHECK(k_oracle_value(n0, n1, f, t, nullptr, strict) ==
              Catch::Approx(std::min(1.0, t) * 3.5).epsilon(1e-4));
    const std::vector<double> zero = {0.0, 0.0, 0.0};
    CHECK(k_oracle_value(n0, n1, zero, 1.0, nullptr, strict) == 0.0);
}

TEST_CASE("profile invariants of the couple functional") {
    FamilyGen gen(37);
    for (int i = 0; i < 10; ++i) {
        const DiscreteCouple c = gen.couple(8);
        const std::vector<double> f = gen.vector_f(8, i % 3);
        if (c.norm(0, f) == 0.0) continue;
        double prev_k = 0.0, prev_kt = kInf;
        const LogGrid grid{1e-4, 1e4, 8};
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double t = grid.point(j);
            const double k = k_weighted_l1(c, f, t);
            CHECK(k >= prev_k * (1.0 - 1e-12));
            CHECK(k / t <= prev_kt * (1.0 + 1e-12));
            // concavity at log-midpoints (arithmetic mean of neighbours)
            const double tl = t / 2.0, tr = 3.0 * t / 2.0;
            const double mid = k_weighted_l1(c, f, (tl + tr) / 2.0);
            const double chord =
                0.5 * (k_weighted_l1(c, f, tl) + k_weighted_l1(c, f, tr));
            CHECK(mid >= chord * (1.0 - 1e-6));
            prev_k = k;
            prev_kt = k / t;
        }
    }
}

TEST_CASE("profile JSON and CSV round trip") {
    const DecreasingProfile p({1.0, 3.0}, {3.0, 1.0});
    const DecreasingProfile back = DecreasingProfile::from_json(p.to_json());
    CHECK(back.edges() == p.edges());
    CHECK(back.values() == p.values());
    CHECK_THROWS_AS(DecreasingProfile({1.0, 2.0}, {1.0, 2.0}), RangeError);
}
