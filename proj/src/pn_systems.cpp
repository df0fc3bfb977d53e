#include "orbitdeg/pn_systems.hpp"

#include "orbitdeg/errors.hpp"

#include <numeric>

namespace orbitdeg {

PnMorphism::PnMorphism(std::size_t n, unsigned degree, std::vector<HomogeneousPoly> polys)
    : n_(n), degree_(degree), polys_(std::move(polys)) {
    if (degree_ < 1) throw InputError("morphism degree must be at least 1");
    if (polys_.size() != n_ + 1)
        throw InputError("a self-map of P^" + std::to_string(n_) + " needs " + std::to_string(n_ + 1) +
                         " polynomials, got " + std::to_string(polys_.size()));
    bool any_nonzero = false;
    for (std::size_t i = 0; i < polys_.size(); ++i) {
        BigInt l = 1;
        for (const auto& m : polys_[i]) {
            if (m.exponents.size() != n_ + 1)
                throw InputError("polys[" + std::to_string(i) + "]: exponent vector has wrong length");
            const unsigned total = std::accumulate(m.exponents.begin(), m.exponents.end(), 0u);
            if (total != degree_)
                throw InputError("polys[" + std::to_string(i) + "]: monomial of degree " + std::to_string(total) +
                                 " in a degree-" + std::to_string(degree_) + " map");
            if (sgn(m.coeff) != 0) any_nonzero = true;
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.coeff.get_den_mpz_t());
        }
        denominators_lcm_.push_back(l);
    }
    if (!any_nonzero) throw InputError("all polynomials are zero");
}

PnMorphism PnMorphism::power_map(std::size_t n, unsigned degree) {
    std::vector<HomogeneousPoly> polys(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        Monomial m;
        m.exponents.assign(n + 1, 0);
        m.exponents[i] = degree;
        m.coeff = 1;
        polys[i].push_back(std::move(m));
    }
    return PnMorphism(n, degree, std::move(polys));
}

ProjPoint evaluate(const PnMorphism& f, const ProjPoint& p) {
    if (p.size() != f.n_ + 1)
        throw InputError("point has " + std::to_string(p.size()) + " coordinates, map expects " +
                         std::to_string(f.n_ + 1));
    // powers[i][e] = x_i^e, computed lazily up to the degree
    std::vector<std::vector<BigInt>> powers(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        powers[i].resize(f.degree_ + 1);
        powers[i][0] = 1;
        for (unsigned e = 1; e <= f.degree_; ++e) powers[i][e] = powers[i][e - 1] * p[i];
    }
    std::vector<Rational> image(f.polys_.size());
    for (std::size_t k = 0; k < f.polys_.size(); ++k) {
        // lcm(denominators) * F_k evaluated over Z
        BigInt acc = 0;
        for (const auto& m : f.polys_[k]) {
            if (sgn(m.coeff) == 0) continue;
            BigInt num = m.coeff.get_num();
            BigInt den_scale;
            mpz_divexact(den_scale.get_mpz_t(), f.denominators_lcm_[k].get_mpz_t(), m.coeff.get_den_mpz_t());
            BigInt term = num * den_scale;
            for (std::size_t i = 0; i < p.size(); ++i)
                if (m.exponents[i]) term *= powers[i][m.exponents[i]];
            acc += term;
        }
        image[k] = Rational(acc, f.denominators_lcm_[k]);
        image[k].canonicalize();
    }
    bool all_zero = true;
    for (const auto& q : image)
        if (sgn(q) != 0) all_zero = false;
    if (all_zero) throw IndeterminacyError("morphism is indeterminate (all image coordinates vanish)", p.key());
    return normalize(image);
}

NsMatrix ns_matrix(const PnMorphism& f) { return NsMatrix{{static_cast<long>(f.degree())}}; }

} // namespace orbitdeg
