#include "orbitdeg/config.hpp"
#include "orbitdeg/degrees.hpp"
#include "orbitdeg/errors.hpp"
#include "orbitdeg/lcg.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace orbitdeg;
using Catch::Approx;

namespace {

DynamicalSystem doubling() {
    return make_pn_system({PnMorphism::power_map(1, 2), PnMorphism::power_map(1, 2)});
}

MultiProjPoint p1(long a, long b) { return MultiProjPoint{{normalize(std::vector<BigInt>{a, b})}}; }

const SystemConfig& k3_config() {
    static const SystemConfig cfg = make_fixture("k3", 42);
    return cfg;
}

} // namespace

TEST_CASE("systems assemble with consistent invariants") {
    const DynamicalSystem d = doubling();
    CHECK(d.k() == 2);
    REQUIRE(d.eigen);
    CHECK(d.eigen->beta == 4.0);
    CHECK_NOTHROW(d.validate());
    CHECK(d.apply(Word{{1, 2}}, p1(3, 1)) == p1(81, 1));
    CHECK_THROWS_AS(d.apply(3, p1(1, 1)), InputError);

    DynamicalSystem bad = d;
    bad.eigen->beta = 2.0;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = d;
    bad.ample_coeffs = {0.0};
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("orbit levels carry the multiset of words") {
    const DynamicalSystem d = doubling();
    Orbit orbit(d, p1(2, 1));
    for (std::size_t n = 0; n <= 10; ++n) {
        const OrbitLevel& lvl = orbit.level(n);
        CHECK(lvl.n == n);
        REQUIRE(lvl.entries.size() == 1);
        BigInt expected;
        mpz_ui_pow_ui(expected.get_mpz_t(), 2, n);
        CHECK(lvl.total_multiplicity() == expected);
    }
    // 2^(2^10) has 309 digits
    CHECK(orbit.level(10).entries.begin()->second.point.max_digits() == 309);
}

TEST_CASE("doubling oracle: sums, alpha and canonical height") {
    const DynamicalSystem d = doubling();
    Orbit orbit(d, p1(2, 1));
    const AlphaTrace t = alpha_estimate(orbit, 10);
    REQUIRE(t.values.size() == 10);
    for (std::size_t n = 1; n <= 10; ++n) {
        CHECK(t.heights_sums[n - 1] == Approx(oracle::doubling_sum(n)).epsilon(1e-14));
        CHECK(std::abs(t.values[n - 1] - oracle::doubling_alpha(n)) <= 1e-12);
        CHECK(std::abs(canonical_height_stage(orbit, n) - std::log(2.0)) <= 1e-12);
    }
    CHECK(t.upper_tail == Approx(oracle::doubling_alpha(10)));
    CHECK(t.lower_tail == Approx(oracle::doubling_alpha(8)));

    const CanonicalHeightResult c = canonical_height(orbit, 10, 1e-6);
    CHECK(c.level == 1);
    CHECK(std::abs(c.value - std::log(2.0)) <= 1e-12);
    CHECK(c.cauchy_residual <= 1e-12);
    CHECK(c.beta == 4.0);

    CHECK(functional_equation_residual(d, p1(2, 1), 8) <= 1e-12);
    CHECK(functional_equation_residual(d, p1(7, 3), 6) <= 1e-9);
}

TEST_CASE("alpha requires n_max >= 1") {
    const DynamicalSystem d = doubling();
    Orbit orbit(d, p1(2, 1));
    CHECK_THROWS_AS(alpha_estimate(orbit, 0), InputError);
}

TEST_CASE("canonical height needs eigen data") {
    DynamicalSystem d = doubling();
    d.eigen.reset();
    CHECK_THROWS_AS(canonical_height(d, p1(2, 1), 4, 1e-3), InputError);
}

TEST_CASE("quasi-comparison on the doubling system is exact") {
    const QuasiComparison q = quasi_comparison_check(doubling(), {p1(2, 1), p1(5, 3), p1(1, 1)}, 6);
    CHECK(q.constant <= 1e-9);
    CHECK(q.sample_ratio.size() == 3);
}

TEST_CASE("counting matches the closed form") {
    const DynamicalSystem d = doubling();
    Orbit orbit(d, p1(2, 1));
    const CountingResult r = counting_function(orbit, {10, 1e2, 1e4, 1e6}, 12);
    REQUIRE(r.rows.size() == 4);
    for (const auto& row : r.rows) {
        CHECK(row.count == oracle::doubling_count(row.bound));
        CHECK(row.ratio == Approx(row.count / std::log(row.bound)));
    }
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].count >= r.rows[i - 1].count);
    CHECK(r.target == Approx(1.0 / std::log(2 * oracle::doubling_alpha(12))));
}

TEST_CASE("orbit point counts are monotone in B and n_max (property)") {
    const DynamicalSystem sys = k3_config().system();
    Orbit orbit(sys, k3_config().points.front());
    std::size_t prev_b = 0;
    for (double b : {1.0, 10.0, 100.0, 1e3, 1e4, 1e6}) {
        const std::size_t c = orbit_point_count(orbit, b, 6).count;
        CHECK(c >= prev_b);
        prev_b = c;
    }
    std::size_t prev_n = 0;
    for (std::size_t n = 0; n <= 7; ++n) {
        const std::size_t c = orbit_point_count(orbit, 1e4, n).count;
        CHECK(c >= prev_n);
        prev_n = c;
    }
    // set semantics: the doubling orbit of (2:1) has one new point per level
    const DynamicalSystem d = doubling();
    Orbit dorbit(d, p1(2, 1));
    CHECK(orbit_point_count(dorbit, 1e6, 12).count == 13);
}

TEST_CASE("preperiodicity on the doubling system") {
    const DynamicalSystem d = doubling();
    for (auto p : {p1(0, 1), p1(1, 0), p1(1, 1)})
        CHECK(is_preperiodic(d, p, 12, 1e4).decision == Preperiodicity::Preperiodic);
    // (-1:1) -> (1:1): preperiodic, not periodic
    CHECK(is_preperiodic(d, p1(-1, 1), 12, 1e4).decision == Preperiodicity::Preperiodic);
    const PreperiodicReport r = is_preperiodic(d, p1(2, 1), 12, 1e4);
    CHECK(r.decision == Preperiodicity::NotPreperiodic);
    CHECK(r.canonical_height == Approx(std::log(2.0)));
    CHECK(to_string(Preperiodicity::Inconclusive) == "inconclusive");

    // without eigen data only the growth test is left
    DynamicalSystem plain = d;
    plain.eigen.reset();
    CHECK(is_preperiodic(plain, p1(2, 1), 4, 1e4).decision == Preperiodicity::Inconclusive);
    CHECK(is_preperiodic(plain, p1(2, 1), 14, 1e3).decision == Preperiodicity::NotPreperiodic);
}

TEST_CASE("growth bound on the doubling system") {
    const DynamicalSystem d = doubling();
    Orbit orbit(d, p1(2, 1));
    const GrowthBound g = growth_bound_check(orbit, 12, 0.5, 2.0);
    REQUIRE(g.ratios.size() == 13);
    CHECK(g.ratios[0] == Approx(1.0));
    for (std::size_t n = 1; n <= 12; ++n) CHECK(g.ratios[n] == Approx(std::log(2.0) * std::pow(0.8, n)));
    CHECK(g.fitted_c == Approx(1.0));
    CHECK(g.consecutive_ok);
    CHECK_THROWS_AS(growth_bound_check(orbit, 4, 0.0, 2.0), InputError);
}

TEST_CASE("alpha <= delta, height independence and monotonicity on the doubling system") {
    const DynamicalSystem d = doubling();
    Orbit orbit(d, p1(2, 1));
    const CheckOutcome a = alpha_leq_delta_check(orbit, 12, 2.0);
    CHECK(a.passed);
    CHECK(a.value == Approx(oracle::doubling_alpha(12)));
    CHECK(a.bound == Approx(2.1));

    // h^+ with coefficient 3 from level 1 on: the ratio is 3^(1/n)
    const double diff = height_independence_check(orbit, 12, {3.0});
    CHECK(diff == Approx(2 * (std::pow(3 * std::log(2.0), 1.0 / 12) - std::pow(std::log(2.0), 1.0 / 12))));
    CHECK(height_independence_check(d, p1(1, 1), 8, {3.0}) == 0.0);

    const CheckOutcome same = orbit_monotonicity_check(d, p1(2, 1), Word{}, 10);
    CHECK(same.passed);
    CHECK(same.value == Approx(same.bound - 0.1));
    CHECK(orbit_monotonicity_check(d, p1(1, 1), Word{{2}}, 10).passed);
}

TEST_CASE("K3 fixture orbit mechanics") {
    const SystemConfig& cfg = k3_config();
    const DynamicalSystem sys = cfg.system();
    Orbit orbit(sys, cfg.points.front());
    for (std::size_t n = 0; n <= 7; ++n) {
        BigInt expected;
        mpz_ui_pow_ui(expected.get_mpz_t(), 2, n);
        CHECK(orbit.level(n).total_multiplicity() == expected);
        for (const auto& [key, e] : orbit.level(n).entries) {
            CHECK(key == e.point.key());
            CHECK(oracle::on_surface(*cfg.surface, e.point));
        }
    }
    // sigma_i o sigma_i = id collapses words: level n has at most 2 new points
    CHECK(orbit.level(7).entries.size() <= 8);

    // telescoping residuals decay after n >= 3
    const CanonicalHeightResult c = canonical_height(orbit, 8, 0.0);
    for (std::size_t n = 4; n < c.stages.size(); ++n)
        CHECK(std::abs(c.stages[n] - c.stages[n - 1]) <= 1.05 * std::abs(c.stages[n - 1] - c.stages[n - 2]));

    const GrowthBound g = growth_bound_check(orbit, 8, 0.5, 2 + std::sqrt(3.0));
    CHECK(std::isfinite(g.fitted_c));
    CHECK(alpha_leq_delta_check(orbit, 8, 2 + std::sqrt(3.0)).passed);
}

TEST_CASE("digit cap stops the expansion") {
    DynamicalSystem d = doubling();
    d.digit_cap = 50;
    Orbit orbit(d, p1(2, 1));
    CHECK_NOTHROW(orbit.level(7)); // 2^128 has 39 digits
    CHECK_THROWS_AS(orbit.level(8), DigitCapExceeded);
}

TEST_CASE("indeterminacy propagates through orbit expansion") {
    const PnMorphism bad(1, 2, {{Monomial{{1, 1}, 1}}, {Monomial{{1, 1}, 1}}});
    const DynamicalSystem d = make_pn_system({bad, PnMorphism::power_map(1, 2)});
    Orbit orbit(d, p1(1, 0));
    CHECK_THROWS_AS(orbit.level(1), IndeterminacyError);
}

TEST_CASE("expansion does not depend on evaluation order (property)") {
    // the same system with the maps listed in the opposite order gives the
    // same levels as sets
    const SystemConfig& cfg = k3_config();
    const DynamicalSystem sys = cfg.system();
    DynamicalSystem swapped = sys;
    std::swap(swapped.maps[0], swapped.maps[1]);
    Orbit a(sys, cfg.points.front()), b(swapped, cfg.points.front());
    for (std::size_t n = 0; n <= 6; ++n) {
        const auto& la = a.level(n).entries;
        const auto& lb = b.level(n).entries;
        REQUIRE(la.size() == lb.size());
        for (auto ita = la.begin(), itb = lb.begin(); ita != la.end(); ++ita, ++itb) {
            REQUIRE(ita->first == itb->first);
            REQUIRE(ita->second.multiplicity == itb->second.multiplicity);
        }
    }
}
