#pragma once

// Self-morphisms of P^N over Q given by homogeneous polynomials of one degree.

#include "orbitdeg/nsr_algebra.hpp"
#include "orbitdeg/points_heights.hpp"

#include <cstddef>
#include <vector>

namespace orbitdeg {

struct Monomial {
    std::vector<unsigned> exponents;
    Rational coeff;
};

using HomogeneousPoly = std::vector<Monomial>;

/// f = (F_0 : ... : F_N). The caller asserts that the F_i have no common
/// nontrivial zero; a violation surfaces as IndeterminacyError in evaluate().
class PnMorphism {
public:
    PnMorphism(std::size_t n, unsigned degree, std::vector<HomogeneousPoly> polys);

    /// (x_0^d, ..., x_N^d).
    static PnMorphism power_map(std::size_t n, unsigned degree);
    static PnMorphism identity(std::size_t n) { return power_map(n, 1); }

    std::size_t dimension() const noexcept { return n_; }
    unsigned degree() const noexcept { return degree_; }
    const std::vector<HomogeneousPoly>& polys() const noexcept { return polys_; }

private:
    std::size_t n_;
    unsigned degree_;
    std::vector<HomogeneousPoly> polys_;
    std::vector<BigInt> denominators_lcm_; // per polynomial, to evaluate over Z
    friend ProjPoint evaluate(const PnMorphism& f, const ProjPoint& p);
};

ProjPoint evaluate(const PnMorphism& f, const ProjPoint& p);

/// The pullback on NS(P^N) = Z H, i.e. the 1x1 matrix [d].
NsMatrix ns_matrix(const PnMorphism& f);

} // namespace orbitdeg
