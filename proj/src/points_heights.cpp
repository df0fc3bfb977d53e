#include "orbitdeg/points_heights.hpp"

#include "orbitdeg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orbitdeg {

ProjPoint::ProjPoint(std::vector<BigInt> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw InputError("projective point needs at least one coordinate");
    BigInt g = 0;
    for (const auto& c : coords_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 0) throw InputError("projective point with all coordinates zero");
    if (g != 1) throw InputError("projective point coordinates are not coprime");
    const auto first = std::find_if(coords_.begin(), coords_.end(), [](const BigInt& c) { return sgn(c) != 0; });
    if (sgn(*first) < 0) throw InputError("projective point first nonzero coordinate is negative");
}

std::string ProjPoint::key() const {
    std::string s;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (i) s += ',';
        s += coords_[i].get_str();
    }
    return s;
}

std::size_t ProjPoint::max_digits() const {
    std::size_t m = 0;
    for (const auto& c : coords_) m = std::max(m, mpz_sizeinbase(c.get_mpz_t(), 10));
    return m;
}

ProjPoint normalize(const std::vector<BigInt>& raw) {
    if (raw.empty()) throw InputError("cannot normalize an empty coordinate list");
    BigInt g = 0;
    for (const auto& c : raw) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 0) throw InputError("cannot normalize the all-zero vector");
    const auto first = std::find_if(raw.begin(), raw.end(), [](const BigInt& c) { return sgn(c) != 0; });
    if (sgn(*first) < 0) g = -g;
    std::vector<BigInt> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) mpz_divexact(out[i].get_mpz_t(), raw[i].get_mpz_t(), g.get_mpz_t());
    return ProjPoint(std::move(out));
}

ProjPoint normalize(const std::vector<Rational>& raw) {
    BigInt l = 1;
    for (const auto& q : raw) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    std::vector<BigInt> ints(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        // l / den divides exactly
        BigInt scale;
        mpz_divexact(scale.get_mpz_t(), l.get_mpz_t(), raw[i].get_den_mpz_t());
        ints[i] = raw[i].get_num() * scale;
    }
    return normalize(ints);
}

ProjPoint parse_proj_point(const std::vector<std::string>& coords) {
    std::vector<Rational> raw;
    raw.reserve(coords.size());
    for (const auto& c : coords) raw.push_back(parse_rational(c));
    return normalize(raw);
}

std::string MultiProjPoint::key() const {
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += ';';
        s += factors[i].key();
    }
    return s;
}

std::size_t MultiProjPoint::max_digits() const {
    std::size_t m = 0;
    for (const auto& f : factors) m = std::max(m, f.max_digits());
    return m;
}

double log_abs(const BigInt& z) {
    if (sgn(z) == 0) throw InputError("log of zero");
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t()); // |mant| in [0.5, 1)
    return std::log(std::abs(mant)) + static_cast<double>(exp) * std::numbers::ln2;
}

double weil_height(const ProjPoint& p) {
    const BigInt* biggest = nullptr;
    for (const auto& c : p.coords())
        if (!biggest || mpz_cmpabs(c.get_mpz_t(), biggest->get_mpz_t()) > 0) biggest = &c;
    if (mpz_cmpabs_ui(biggest->get_mpz_t(), 1) <= 0) return 0.0;
    return log_abs(*biggest);
}

double multi_height(const MultiProjPoint& p, const DivisorCoeffs& d) {
    if (d.size() != p.size())
        throw InputError("divisor has " + std::to_string(d.size()) + " coefficients but the point has " +
                         std::to_string(p.size()) + " factors");
    double h = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] != 0.0) h += d[i] * weil_height(p.factors[i]);
    return h;
}

} // namespace orbitdeg
