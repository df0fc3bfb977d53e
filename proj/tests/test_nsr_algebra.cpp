#include "orbitdeg/errors.hpp"
#include "orbitdeg/k3_wheler.hpp"
#include "orbitdeg/lcg.hpp"
#include "orbitdeg/nsr_algebra.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <chrono>

using namespace orbitdeg;
using Catch::Approx;

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt21 = std::sqrt(21.0);

GeneratorSet ex33() { return pullback_matrices(WhelerModel::Bidegree11_22); }
GeneratorSet ex34() { return pullback_matrices(WhelerModel::Bidegree12_21); }
GeneratorSet ex35() { return pullback_matrices_tridegree222(); }

NsMatrix random_int_matrix(Lcg& rng, std::size_t dim) {
    std::vector<Rational> e;
    for (std::size_t i = 0; i < dim * dim; ++i) e.emplace_back(rng.uniform(-5, 5));
    return NsMatrix(dim, e);
}

} // namespace

TEST_CASE("rationals parse in exact forms") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-7") == Rational(-7));
    CHECK(parse_rational("-1.25") == Rational(-5, 4));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK_THROWS_AS(parse_rational("1/0"), InputError);
    CHECK_THROWS_AS(parse_rational("abc"), InputError);
    CHECK_THROWS_AS(parse_rational(""), InputError);
    CHECK(to_double_nearest(Rational(1, 3)) == 1.0 / 3.0);
    CHECK(to_double_nearest(Rational(1, 10)) == 0.1);
}

TEST_CASE("matrix construction validates shape") {
    CHECK_THROWS_AS(NsMatrix(2, std::vector<Rational>(3)), InputError);
    CHECK_THROWS_AS(GeneratorSet({NsMatrix{{1, 0}, {0, 1}}, NsMatrix{{1}}}), InputError);
    CHECK_THROWS_AS(GeneratorSet(std::vector<NsMatrix>{}), InputError);
    const GeneratorSet g = ex33();
    CHECK(g.labels() == std::vector<std::string>{"sigma1", "sigma2"});
}

TEST_CASE("word products follow the composition convention") {
    const GeneratorSet g = ex33();
    CHECK(word_matrix(g, Word{{1, 2}}) == NsMatrix{{-1, -4}, {4, 15}});
    CHECK(word_matrix(g, Word{{1, 2, 1}}) == NsMatrix{{15, 56}, {-4, -15}});
    CHECK(word_matrix(g, Word{}) == NsMatrix::identity(2));
    CHECK(word_matrix(g, Word{{1, 1}}) == NsMatrix::identity(2));
    CHECK_THROWS_AS(word_matrix(g, Word{{3}}), InputError);
    CHECK_THROWS_AS(word_matrix(g, Word{{0}}), InputError);
}

TEST_CASE("spectral radius of the displayed products") {
    CHECK(spectral_radius(NsMatrix{{-1, -4}, {4, 15}}) == Approx(7 + 4 * kSqrt3).epsilon(1e-14));
    CHECK(spectral_radius(NsMatrix{{15, 56}, {-4, -15}}) == Approx(1.0).margin(1e-12));
    CHECK(spectral_radius(NsMatrix{{1, -2, -2}, {2, 3, 10}, {2, 6, 15}}) == Approx(18.3808).margin(2e-3));
    CHECK(spectral_radius(NsMatrix{{0, 4}, {4, 0}}) == Approx(4.0));
    CHECK(spectral_radius(NsMatrix{{-3}}) == 3.0);
    // rotation: complex pair
    CHECK(spectral_radius(NsMatrix{{0, -1}, {1, 0}}) == Approx(1.0));
}

TEST_CASE("spectral radius survives defective eigenvalues") {
    // Jordan block with eigenvalue 1: doubles lose half their digits here
    CHECK(spectral_radius(NsMatrix{{1, 1000}, {0, 1}}) == Approx(1.0).margin(1e-13));
    CHECK(spectral_radius(NsMatrix{{-1, 1, 0}, {0, -1, 1}, {0, 0, -1}}) == Approx(1.0).margin(1e-13));
    CHECK(spectral_radius(NsMatrix{{0, 0}, {0, 0}}) == 0.0);
}

TEST_CASE("spectral radius and norm agree with closed forms on random 2x2") {
    Lcg rng(7);
    for (int t = 0; t < 200; ++t) {
        const NsMatrix m = random_int_matrix(rng, 2);
        const auto d = m.to_double();
        CHECK(spectral_radius(m) == Approx(oracle::rho2(d(0, 0), d(0, 1), d(1, 0), d(1, 1))).margin(1e-9));
        CHECK(operator_norm(d) == Approx(oracle::norm2(d(0, 0), d(0, 1), d(1, 0), d(1, 1))).margin(1e-9));
    }
}

TEST_CASE("rho is bounded by the norm and invariant under rotation (property)") {
    Lcg rng(11);
    for (int t = 0; t < 100; ++t) {
        const std::size_t dim = 2 + static_cast<std::size_t>(rng.uniform(0, 1));
        const NsMatrix a = random_int_matrix(rng, dim), b = random_int_matrix(rng, dim);
        REQUIRE(spectral_radius(a * b) == Approx(spectral_radius(b * a)).margin(1e-8));
        REQUIRE(spectral_radius(a) <= operator_norm(a.to_double()) + 1e-9);
    }
}

TEST_CASE("delta bracket for the (1,1)+(2,2) pullbacks") {
    const auto start = std::chrono::steady_clock::now();
    const DeltaBracket b = delta_estimate(ex33(), 12, 0.5);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(b.lower == Approx(2 + kSqrt3).margin(1e-9));
    CHECK(b.lower_witness == Word{{1, 2}});
    CHECK(b.upper >= b.lower);
    CHECK(b.upper <= 1.1 * b.lower);
    CHECK(b.converged);
    CHECK_FALSE(b.truncated);
    CHECK(secs < 5.0);
}

TEST_CASE("delta bracket for the (1,2)+(2,1) pullbacks") {
    const LowerBound lo = delta_lower(ex34(), 12);
    CHECK(lo.value * lo.value == Approx((23 + 5 * kSqrt21) / 2).margin(1e-6));
    CHECK(lo.witness.length() == 2);
    CHECK(delta_upper(ex34(), 12).value <= 1.1 * lo.value);
}

TEST_CASE("bracket for three involutions is ordered") {
    const LowerBound lo = delta_lower(ex35(), 3);
    const UpperBound up = delta_upper(ex35(), 7);
    CHECK(up.value >= lo.value);
    CHECK(lo.value > 2.5);
}

TEST_CASE("lower bound is monotone in the length and picks the first witness") {
    double prev = 0.0;
    for (std::size_t len = 1; len <= 8; ++len) {
        const double v = delta_lower(ex33(), len).value;
        CHECK(v >= prev);
        prev = v;
    }
    // (1,2) and (2,1) tie; lexicographic order wins
    CHECK(delta_lower(ex33(), 4).witness == Word{{1, 2}});
}

TEST_CASE("budget truncation keeps completed lengths") {
    const WordScan s = scan_words(ex35(), 10, 500);
    CHECK(s.truncated);
    CHECK(s.multiplications <= 500);
    CHECK_FALSE(s.lengths.empty());
    CHECK(s.lengths.size() < 10);
    const LowerBound lo = delta_lower(ex35(), 10, 500);
    CHECK(lo.truncated);
    CHECK(lo.lengths_used == s.lengths.size());
}

TEST_CASE("delta_estimate rejects a nonpositive tolerance") {
    CHECK_THROWS_AS(delta_estimate(ex33(), 4, 0.0), InputError);
    CHECK_THROWS_AS(scan_words(ex33(), 0), InputError);
}

TEST_CASE("subadditivity of the log max norm") {
    for (const GeneratorSet& g : {ex33(), ex35()}) {
        const WordScan s = scan_words(g, 8);
        for (std::size_t n = 1; n <= 4; ++n)
            for (std::size_t m = 1; m <= 4; ++m)
                CHECK(std::log(s.lengths[n + m - 1].max_norm) <=
                      std::log(s.lengths[n - 1].max_norm) + std::log(s.lengths[m - 1].max_norm) + 1e-9);
    }
}

TEST_CASE("eigendivisor of the summed involutions") {
    CHECK(sum_pullback(ex33()) == NsMatrix{{0, 4}, {4, 0}});
    const Eigendivisor e = find_eigendivisor(ex33());
    CHECK(e.beta == Approx(4.0).margin(1e-12));
    REQUIRE(e.coeffs.size() == 2);
    CHECK(e.coeffs[0] == Approx(1.0).margin(1e-9));
    CHECK(e.coeffs[1] == Approx(1.0).margin(1e-9));
    CHECK(e.condition_ok);
    CHECK(2 * std::sqrt(e.delta_lower) == Approx(3.8637033).margin(1e-6));

    const Eigendivisor e35 = find_eigendivisor(ex35());
    CHECK(e35.beta == Approx(5.0));
    for (double c : e35.coeffs) CHECK(c == Approx(1.0));
}

TEST_CASE("eigendivisor failures") {
    // dominant eigenvalues form a complex pair
    CHECK_THROWS_AS(find_eigendivisor(GeneratorSet({NsMatrix{{0, -1}, {1, 0}}})), ComputationError);
    // defective dominant eigenvalue
    CHECK_THROWS_AS(find_eigendivisor(GeneratorSet({NsMatrix{{2, 1}, {0, 2}}})), ComputationError);
    // condition fails: identity maps, beta = k
    const Eigendivisor e = find_eigendivisor(GeneratorSet({NsMatrix{{1}}, NsMatrix{{1}}}));
    CHECK_FALSE(e.condition_ok);
}
