#include "orbitdeg/k3_wheler.hpp"

#include <algorithm>

namespace orbitdeg {

namespace {

template <std::size_t N, std::size_t M>
std::array<std::array<BigInt, M>, N> clear_denominators(const std::array<std::array<Rational, M>, N>& a) {
    BigInt l = 1;
    for (const auto& row : a)
        for (const auto& q : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    std::array<std::array<BigInt, M>, N> out;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < M; ++j) {
            Rational scaled = a[i][j] * Rational(l);
            out[i][j] = scaled.get_num();
        }
    return out;
}

std::array<BigInt, 6> quadratic_monomials(const std::vector<BigInt>& z) {
    std::array<BigInt, 6> m;
    for (std::size_t a = 0; a < 6; ++a) m[a] = z[kQuadraticMonomials[a][0]] * z[kQuadraticMonomials[a][1]];
    return m;
}

BigInt eval_quadratic(const std::array<BigInt, 6>& w, const std::vector<BigInt>& z) {
    const auto m = quadratic_monomials(z);
    BigInt acc = 0;
    for (std::size_t a = 0; a < 6; ++a)
        if (sgn(w[a]) != 0) acc += w[a] * m[a];
    return acc;
}

void check_shape(const MultiProjPoint& p) {
    if (p.size() != 2 || p.factors[0].size() != 3 || p.factors[1].size() != 3)
        throw InputError("a point of P^2 x P^2 needs exactly two factors with three coordinates each");
}

// Linear form of the fiber in the moving coordinate and the quadratic form of
// the (2,2)-form restricted to the fixed coordinate.
struct Fiber {
    std::array<BigInt, 3> linear;
    std::array<BigInt, 6> quadratic;
};

Fiber fiber_forms(const WhelerSurface& s, const MultiProjPoint& p, int which) {
    if (which != 1 && which != 2) throw InputError("involution index must be 1 or 2");
    const auto& b = s.bilinear_int();
    const auto& q = s.biquadratic_int();
    Fiber f;
    if (which == 1) {
        const auto& x = p.factors[0].coords();
        for (std::size_t j = 0; j < 3; ++j) {
            f.linear[j] = 0;
            for (std::size_t i = 0; i < 3; ++i) f.linear[j] += b[i][j] * x[i];
        }
        const auto mx = quadratic_monomials(x);
        for (std::size_t bb = 0; bb < 6; ++bb) {
            f.quadratic[bb] = 0;
            for (std::size_t a = 0; a < 6; ++a) f.quadratic[bb] += q[a][bb] * mx[a];
        }
    } else {
        const auto& y = p.factors[1].coords();
        for (std::size_t i = 0; i < 3; ++i) {
            f.linear[i] = 0;
            for (std::size_t j = 0; j < 3; ++j) f.linear[i] += b[i][j] * y[j];
        }
        const auto my = quadratic_monomials(y);
        for (std::size_t a = 0; a < 6; ++a) {
            f.quadratic[a] = 0;
            for (std::size_t bb = 0; bb < 6; ++bb) f.quadratic[a] += q[a][bb] * my[bb];
        }
    }
    return f;
}

// Parametrization s*u + t*v of the line {linear . z = 0}.
struct LineParam {
    std::size_t pivot;
    std::size_t j1, j2;
    std::vector<BigInt> u, v;
};

LineParam line_param(const std::array<BigInt, 3>& c) {
    const auto it = std::find_if(c.begin(), c.end(), [](const BigInt& z) { return sgn(z) != 0; });
    if (it == c.end()) throw FiberError(FiberError::Kind::NotALine, "fiber is not a line: the (1,1)-form vanishes on it");
    LineParam lp;
    lp.pivot = static_cast<std::size_t>(it - c.begin());
    lp.j1 = lp.pivot == 0 ? 1 : 0;
    lp.j2 = lp.pivot == 2 ? 1 : 2;
    lp.u.assign(3, BigInt(0));
    lp.v.assign(3, BigInt(0));
    lp.u[lp.j1] = c[lp.pivot];
    lp.u[lp.pivot] = -c[lp.j1];
    lp.v[lp.j2] = c[lp.pivot];
    lp.v[lp.pivot] = -c[lp.j2];
    return lp;
}

FiberQuadratic restrict_to_line(const std::array<BigInt, 6>& w, const LineParam& lp) {
    FiberQuadratic fq;
    fq.leading = eval_quadratic(w, lp.u);
    fq.trailing = eval_quadratic(w, lp.v);
    std::vector<BigInt> sum(3);
    for (std::size_t i = 0; i < 3; ++i) sum[i] = lp.u[i] + lp.v[i];
    fq.middle = eval_quadratic(w, sum) - fq.leading - fq.trailing;
    return fq;
}

} // namespace

WhelerModel parse_wheler_model(const std::string& name) {
    if (name == "(1,1)+(2,2)") return WhelerModel::Bidegree11_22;
    if (name == "(1,2)+(2,1)") return WhelerModel::Bidegree12_21;
    throw InputError("unknown surface model '" + name + "'");
}

std::string to_string(WhelerModel model) {
    return model == WhelerModel::Bidegree11_22 ? "(1,1)+(2,2)" : "(1,2)+(2,1)";
}

WhelerSurface::WhelerSurface(Bilinear bilinear, Biquadratic biquadratic, WhelerModel model)
    : bilinear_(std::move(bilinear)), biquadratic_(std::move(biquadratic)), model_(model) {
    auto nonzero = [](const auto& a) {
        for (const auto& row : a)
            for (const auto& q : row)
                if (sgn(q) != 0) return true;
        return false;
    };
    if (!nonzero(bilinear_)) throw InputError("bilinear form is identically zero");
    if (!nonzero(biquadratic_)) throw InputError("biquadratic form is identically zero");
    b_int_ = clear_denominators(bilinear_);
    q_int_ = clear_denominators(biquadratic_);
}

BigInt WhelerSurface::eval_bilinear(const ProjPoint& x, const ProjPoint& y) const {
    BigInt acc = 0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (sgn(b_int_[i][j]) != 0) acc += b_int_[i][j] * x[i] * y[j];
    return acc;
}

BigInt WhelerSurface::eval_biquadratic(const ProjPoint& x, const ProjPoint& y) const {
    const auto mx = quadratic_monomials(x.coords());
    const auto my = quadratic_monomials(y.coords());
    BigInt acc = 0;
    for (std::size_t a = 0; a < 6; ++a) {
        BigInt row = 0;
        for (std::size_t b = 0; b < 6; ++b)
            if (sgn(q_int_[a][b]) != 0) row += q_int_[a][b] * my[b];
        acc += row * mx[a];
    }
    return acc;
}

bool contains(const WhelerSurface& s, const MultiProjPoint& p) {
    check_shape(p);
    return sgn(s.eval_bilinear(p.factors[0], p.factors[1])) == 0 &&
           sgn(s.eval_biquadratic(p.factors[0], p.factors[1])) == 0;
}

FiberQuadratic fiber_quadratic(const WhelerSurface& s, const MultiProjPoint& p, int which) {
    check_shape(p);
    const Fiber f = fiber_forms(s, p, which);
    return restrict_to_line(f.quadratic, line_param(f.linear));
}

MultiProjPoint sigma(const WhelerSurface& s, const MultiProjPoint& p, int which) {
    check_shape(p);
    if (s.model() != WhelerModel::Bidegree11_22)
        throw InputError("point involutions are only available for the (1,1)+(2,2) model");
    const Fiber f = fiber_forms(s, p, which);
    const LineParam lp = line_param(f.linear);
    const auto& z = p.factors[which == 1 ? 1 : 0].coords();

    BigInt on_line = 0;
    for (std::size_t i = 0; i < 3; ++i) on_line += f.linear[i] * z[i];
    if (sgn(on_line) != 0)
        throw FiberError(FiberError::Kind::PointOffLine, "input point does not lie on its fiber line");

    const FiberQuadratic fq = restrict_to_line(f.quadratic, lp);
    if (sgn(fq.leading) == 0 && sgn(fq.middle) == 0 && sgn(fq.trailing) == 0)
        throw FiberError(FiberError::Kind::LineInSurface, "fiber line lies in the (2,2)-hypersurface");

    // z = (1/c_pivot) (s0 u + t0 v)
    const BigInt& s0 = z[lp.j1];
    const BigInt& t0 = z[lp.j2];
    if (sgn(fq.leading * s0 * s0 + fq.middle * s0 * t0 + fq.trailing * t0 * t0) != 0)
        throw InputError("point is not on the surface");

    BigInt s1, t1;
    if (sgn(fq.leading) != 0) {
        // the roots' ratios s/t sum to -middle/leading; t0 != 0 here
        s1 = -fq.middle * t0 - fq.leading * s0;
        t1 = fq.leading * t0;
    } else if (sgn(t0) == 0) {
        // t (middle s + trailing t): known root at infinity
        s1 = -fq.trailing;
        t1 = fq.middle;
    } else {
        s1 = 1;
        t1 = 0;
    }

    std::vector<BigInt> image(3);
    for (std::size_t i = 0; i < 3; ++i) image[i] = s1 * lp.u[i] + t1 * lp.v[i];

    MultiProjPoint out = p;
    out.factors[which == 1 ? 1 : 0] = normalize(image);
    return out;
}

GeneratorSet pullback_matrices(WhelerModel model) {
    const long c = model == WhelerModel::Bidegree11_22 ? 4 : 5;
    return GeneratorSet({NsMatrix{{1, c}, {0, -1}}, NsMatrix{{-1, 0}, {c, 1}}}, {"sigma1", "sigma2"});
}

GeneratorSet pullback_matrices(const WhelerSurface& s) { return pullback_matrices(s.model()); }

GeneratorSet pullback_matrices_tridegree222() {
    return GeneratorSet({NsMatrix{{-1, 0, 0}, {2, 1, 0}, {2, 0, 1}},
                         NsMatrix{{1, 2, 0}, {0, -1, 0}, {0, 2, 1}},
                         NsMatrix{{1, 0, 2}, {0, 1, 2}, {0, 0, -1}}},
                        {"sigma1", "sigma2", "sigma3"});
}

} // namespace orbitdeg
