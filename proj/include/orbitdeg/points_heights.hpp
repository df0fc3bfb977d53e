#pragma once

// Rational points of (products of) projective spaces over Q and their
// logarithmic Weil heights.

#include "orbitdeg/nsr_algebra.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace orbitdeg {

/// Homogeneous coordinates scaled to coprime integers, first nonzero positive.
class ProjPoint {
public:
    ProjPoint() = default;
    /// Checks the invariants; use normalize() to canonicalize arbitrary input.
    explicit ProjPoint(std::vector<BigInt> coords);

    std::size_t size() const noexcept { return coords_.size(); }
    const BigInt& operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<BigInt>& coords() const noexcept { return coords_; }

    /// Comma-separated decimal coordinates; equal keys iff equal points.
    std::string key() const;
    /// Largest number of decimal digits among the coordinates.
    std::size_t max_digits() const;

    bool operator==(const ProjPoint&) const = default;

private:
    std::vector<BigInt> coords_;
};

ProjPoint normalize(const std::vector<Rational>& raw);
ProjPoint normalize(const std::vector<BigInt>& raw);
ProjPoint parse_proj_point(const std::vector<std::string>& coords);

/// A point of P^{N_1} x ... x P^{N_m}.
struct MultiProjPoint {
    std::vector<ProjPoint> factors;

    std::size_t size() const noexcept { return factors.size(); }
    std::string key() const;
    std::size_t max_digits() const;
    bool operator==(const MultiProjPoint&) const = default;
};

/// Natural log of |z| for z != 0, accurate to double precision for any size.
double log_abs(const BigInt& z);

/// log max |x_i| of the coprime coordinates.
double weil_height(const ProjPoint& p);

/// Real coefficients of a divisor class in the factor hyperplane basis.
using DivisorCoeffs = std::vector<double>;

/// sum_i c_i * weil_height(factor_i).
double multi_height(const MultiProjPoint& p, const DivisorCoeffs& d);

inline double height_plus(double h) { return h < 1.0 ? 1.0 : h; }

} // namespace orbitdeg
