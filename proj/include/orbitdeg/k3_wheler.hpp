#pragma once

// K3 surfaces in P^2 x P^2 cut out by a (1,1)-form and a (2,2)-form, with the
// two covering involutions computed exactly over Q.

#include "orbitdeg/errors.hpp"
#include "orbitdeg/nsr_algebra.hpp"
#include "orbitdeg/points_heights.hpp"

#include <array>
#include <string>

namespace orbitdeg {

enum class WhelerModel {
    Bidegree11_22, // "(1,1)+(2,2)"
    Bidegree12_21, // "(1,2)+(2,1)", matrix level only
};

WhelerModel parse_wheler_model(const std::string& name);
std::string to_string(WhelerModel model);

/// Degree-2 monomials in three variables, ordered
/// z0^2, z0 z1, z0 z2, z1^2, z1 z2, z2^2.
inline constexpr std::array<std::array<int, 2>, 6> kQuadraticMonomials{
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

class WhelerSurface {
public:
    using Bilinear = std::array<std::array<Rational, 3>, 3>;
    using Biquadratic = std::array<std::array<Rational, 6>, 6>;

    /// B(x,y) = sum b_ij x_i y_j and Q(x,y) = sum q_ab m_a(x) m_b(y).
    WhelerSurface(Bilinear bilinear, Biquadratic biquadratic,
                  WhelerModel model = WhelerModel::Bidegree11_22);

    const Bilinear& bilinear() const noexcept { return bilinear_; }
    const Biquadratic& biquadratic() const noexcept { return biquadratic_; }
    WhelerModel model() const noexcept { return model_; }

    BigInt eval_bilinear(const ProjPoint& x, const ProjPoint& y) const;
    BigInt eval_biquadratic(const ProjPoint& x, const ProjPoint& y) const;

    // Integer multiples of the forms (same zero sets), used internally.
    const std::array<std::array<BigInt, 3>, 3>& bilinear_int() const noexcept { return b_int_; }
    const std::array<std::array<BigInt, 6>, 6>& biquadratic_int() const noexcept { return q_int_; }

private:
    Bilinear bilinear_;
    Biquadratic biquadratic_;
    WhelerModel model_;
    std::array<std::array<BigInt, 3>, 3> b_int_;
    std::array<std::array<BigInt, 6>, 6> q_int_;
};

/// Restriction of the (2,2)-form to a fiber line: a s^2 + b s t + c t^2.
struct FiberQuadratic {
    BigInt leading;
    BigInt middle;
    BigInt trailing;
};

class FiberError : public ComputationError {
public:
    enum class Kind {
        NotALine,      // the (1,1)-form vanishes identically on the fiber
        LineInSurface, // the (2,2)-form vanishes on the whole fiber line
        PointOffLine,  // the moving coordinate does not satisfy the linear form
    };
    FiberError(Kind kind, const std::string& what) : ComputationError(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// True iff both forms vanish at p exactly. p must have two P^2 factors.
bool contains(const WhelerSurface& s, const MultiProjPoint& p);

/// The covering involution that keeps factor `which` (1 or 2) fixed and swaps
/// the two points of the residual fiber (a line meeting a conic).
MultiProjPoint sigma(const WhelerSurface& s, const MultiProjPoint& p, int which);

/// The fiber quadratic at p for involution `which`, in the line parameters
/// used by sigma (exposed for diagnostics and fixture checks).
FiberQuadratic fiber_quadratic(const WhelerSurface& s, const MultiProjPoint& p, int which);

/// Pullback matrices of (sigma_1, sigma_2) on NS = <L_1, L_2>; columns are
/// the images of L_1 and L_2.
GeneratorSet pullback_matrices(WhelerModel model);
GeneratorSet pullback_matrices(const WhelerSurface& s);

/// Involution pullbacks for a (2,2,2) surface in P^1 x P^1 x P^1 with
/// NS = <L_1, L_2, L_3>: sigma_i^* L_i = -L_i + 2 L_j + 2 L_k, sigma_j^* L_i = L_i.
GeneratorSet pullback_matrices_tridegree222();

} // namespace orbitdeg
