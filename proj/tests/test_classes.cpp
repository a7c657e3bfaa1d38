#include "coral/classes.hpp"
#include "coral/instances.hpp"
#include "coral/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace coral;

TEST_CASE("alpha schedule values") {
    // 16((2+1)(1+1)+1)/2 * sqrt(ln(2*2/0.1)/1e4)
    const double a = alpha_schedule(2, 1, 1, 2, 2, 2, 0.1, 10000);
    CHECK(a == doctest::Approx(56.0 * std::sqrt(std::log(40.0) / 1e4)).epsilon(1e-12));
    CHECK(a == doctest::Approx(1.0756).epsilon(1e-3));

    // sqrt(N) scaling: quadrupling N halves alpha
    CHECK(alpha_schedule(2, 1, 1, 2, 2, 2, 0.1, 40000) == doctest::Approx(a / 2.0).epsilon(1e-12));

    // doubling |W||V|/delta at log-argument 40 scales by sqrt(ln 80 / ln 40)
    const double a2 = alpha_schedule(2, 1, 1, 2, 4, 2, 0.1, 10000);
    CHECK(a2 / a == doctest::Approx(std::sqrt(std::log(80.0) / std::log(40.0))).epsilon(1e-12));
    CHECK(a2 / a == doctest::Approx(1.0899).epsilon(1e-3));

    CHECK_THROWS_AS(alpha_schedule(2, 1, 1, 2, 2, 2, 0.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(alpha_schedule(2, 1, 1, 2, 2, 2, 1.5, 100), std::invalid_argument);
    CHECK_THROWS_AS(alpha_schedule(2, 1, 1, 2, 2, 2, 0.1, 0), std::invalid_argument);
}

TEST_CASE("alpha schedule monotonicity") {
    const double base = alpha_schedule(2, 1, 1, 2, 4, 4, 0.05, 1000);
    for (double bw : {2.5, 3.0, 4.0})
        CHECK(alpha_schedule(bw, 1, 1, 2, 4, 4, 0.05, 1000) > base);
    for (double bv : {1.5, 2.0})
        CHECK(alpha_schedule(2, bv, 1, 2, 4, 4, 0.05, 1000) > base);
    for (double bf : {1.5, 2.0})
        CHECK(alpha_schedule(2, 1, bf, 2, 4, 4, 0.05, 1000) > base);
    for (double mf : {3.0, 4.0})
        CHECK(alpha_schedule(2, 1, 1, mf, 4, 4, 0.05, 1000) < base);
    for (std::size_t n : {2000u, 4000u, 8000u})
        CHECK(alpha_schedule(2, 1, 1, 2, 4, 4, 0.05, n) < base);
}

TEST_CASE("grid class enumeration and validation") {
    const FiniteClass<WeightFn> tiny = build_tabular_grid_class(1, 1, 2.0, 2);
    REQUIRE(tiny.size() == 2);
    CHECK(tiny.members[0].table(0, 0) == 0.0);
    CHECK(tiny.members[1].table(0, 0) == 2.0);

    const FiniteClass<WeightFn> grid = build_tabular_grid_class(2, 2, 1.5, 3);
    CHECK(grid.size() == 81);
    for (const auto& w : grid.members) CHECK(!validate(w, grid.bounds).has_value());

    CHECK_THROWS_AS(build_tabular_grid_class(0, 2, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_tabular_grid_class(2, 2, 1.0, 0), std::invalid_argument);
}

TEST_CASE("prop1 weight class is in bounds, violations are localized") {
    Instance inst = prop1(100);
    for (const auto& w : inst.W.members) CHECK(!validate(w, inst.W.bounds).has_value());
    WeightFn bad{inst.W.members[1].table};
    bad.table(0, 1) = inst.W.bounds.w_max + 0.1;
    const auto violation = validate(bad, inst.W.bounds);
    REQUIRE(violation.has_value());
    CHECK(violation->s == 0);
    CHECK(violation->a == 1);
    CHECK(violation->value == doctest::Approx(inst.W.bounds.w_max + 0.1));
}

TEST_CASE("regularizer evaluations and inverse identity") {
    const RegularizerSpec sq = RegularizerSpec::make(RegularizerKind::shifted_square, 5.0);
    CHECK(sq.f(1.0) == 0.0);
    CHECK(sq.fprime(1.0) == 0.0);
    const RegularizerSpec pl = RegularizerSpec::make(RegularizerKind::plain_square, 5.0);
    CHECK(pl.f(2.0) == 4.0);
    for (int i = 0; i <= 100; ++i) {
        const double x = 5.0 * i / 100.0;
        CHECK(sq.fprime_inv(sq.fprime(x)) == doctest::Approx(x).epsilon(1e-12));
        CHECK(pl.fprime_inv(pl.fprime(x)) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("strong convexity witness") {
    Rng rng(404);
    for (RegularizerKind kind : {RegularizerKind::shifted_square, RegularizerKind::plain_square}) {
        const RegularizerSpec spec = RegularizerSpec::make(kind, 4.0);
        for (int k = 0; k < 200; ++k) {
            const double x = 4.0 * rng.uniform01(), y = 4.0 * rng.uniform01();
            CHECK(spec.f(y) >=
                  spec.f(x) + spec.fprime(x) * (y - x) + spec.m_f / 2.0 * (y - x) * (y - x) - 1e-10);
        }
    }
}

TEST_CASE("derived bound constants cover the working range") {
    for (double bw : {1.0, 2.0, 5.0, 50.0}) {
        for (RegularizerKind kind :
             {RegularizerKind::shifted_square, RegularizerKind::plain_square}) {
            const RegularizerSpec spec = RegularizerSpec::make(kind, bw);
            for (int i = 0; i <= 50; ++i) {
                const double x = bw * i / 50.0;
                CHECK(std::abs(spec.f(x)) <= spec.b_f + 1e-12);
                CHECK(std::abs(spec.fprime(x)) <= spec.b_fprime + 1e-12);
            }
        }
    }
}
