#include "orbitdeg/degrees.hpp"

#include "orbitdeg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

namespace orbitdeg {

// ---------------------------------------------------------------------------
// Systems

MultiProjPoint DynamicalSystem::apply(std::size_t i, const MultiProjPoint& p) const {
    if (i < 1 || i > maps.size())
        throw InputError("map index " + std::to_string(i) + " out of range 1.." + std::to_string(maps.size()));
    return maps[i - 1](p);
}

MultiProjPoint DynamicalSystem::apply(const Word& w, const MultiProjPoint& p) const {
    validate_word(w, k());
    MultiProjPoint q = p;
    for (auto it = w.indices.rbegin(); it != w.indices.rend(); ++it) q = apply(*it, q);
    return q;
}

void DynamicalSystem::validate() const {
    if (maps.empty()) throw InputError("a dynamical system needs at least one map");
    if (generators.size() != maps.size())
        throw InputError("system has " + std::to_string(maps.size()) + " maps but " +
                         std::to_string(generators.size()) + " pullback matrices");
    if (ample_coeffs.empty() || std::any_of(ample_coeffs.begin(), ample_coeffs.end(), [](double c) { return !(c > 0); }))
        throw InputError("ample_coeffs must be nonempty and positive");
    if (eigen) {
        if (!(eigen->beta > static_cast<double>(k())))
            throw InputError("eigen.beta must exceed the number of maps");
        if (eigen->d_coeffs.size() != ample_coeffs.size())
            throw InputError("eigen.d_coeffs must have one coefficient per factor");
    }
}

DynamicalSystem make_k3_system(const WhelerSurface& surface) {
    if (surface.model() != WhelerModel::Bidegree11_22)
        throw InputError("concrete involutions are only available for the (1,1)+(2,2) model");
    DynamicalSystem sys;
    // The maps share one immutable surface.
    auto shared = std::make_shared<const WhelerSurface>(surface);
    sys.maps.push_back([shared](const MultiProjPoint& p) { return sigma(*shared, p, 1); });
    sys.maps.push_back([shared](const MultiProjPoint& p) { return sigma(*shared, p, 2); });
    sys.generators = pullback_matrices(surface);
    sys.ample_coeffs = {1.0, 1.0};
    sys.eigen = EigenData{4.0, {1.0, 1.0}};
    return sys;
}

DynamicalSystem make_pn_system(std::vector<PnMorphism> maps) {
    if (maps.empty()) throw InputError("a dynamical system needs at least one map");
    DynamicalSystem sys;
    std::vector<NsMatrix> gens;
    double beta = 0.0;
    for (const auto& f : maps) {
        if (f.dimension() != maps.front().dimension()) throw InputError("all morphisms must act on the same P^N");
        gens.push_back(ns_matrix(f));
        beta += f.degree();
        auto shared = std::make_shared<const PnMorphism>(f);
        sys.maps.push_back([shared](const MultiProjPoint& p) {
            if (p.size() != 1) throw InputError("a point of P^N has exactly one factor");
            return MultiProjPoint{{evaluate(*shared, p.factors[0])}};
        });
    }
    sys.generators = GeneratorSet(std::move(gens));
    sys.ample_coeffs = {1.0};
    if (beta > static_cast<double>(maps.size())) sys.eigen = EigenData{beta, {1.0}};
    return sys;
}

// ---------------------------------------------------------------------------
// Orbit levels

BigInt OrbitLevel::total_multiplicity() const {
    BigInt t = 0;
    for (const auto& [key, e] : entries) t += e.multiplicity;
    return t;
}

OrbitLevel initial_level(const MultiProjPoint& p) {
    OrbitLevel level;
    level.n = 0;
    level.entries.emplace(p.key(), OrbitEntry{p, BigInt(1)});
    return level;
}

OrbitLevel expand_level(const DynamicalSystem& sys, const OrbitLevel& prev) {
    OrbitLevel next;
    next.n = prev.n + 1;
    for (const auto& [key, entry] : prev.entries) {
        for (std::size_t i = 1; i <= sys.k(); ++i) {
            MultiProjPoint image = sys.apply(i, entry.point);
            if (image.max_digits() > sys.digit_cap)
                throw DigitCapExceeded("orbit coordinate exceeds " + std::to_string(sys.digit_cap) +
                                       " digits at level " + std::to_string(next.n));
            std::string image_key = image.key();
            auto it = next.entries.find(image_key);
            if (it == next.entries.end())
                next.entries.emplace(std::move(image_key), OrbitEntry{std::move(image), entry.multiplicity});
            else
                it->second.multiplicity += entry.multiplicity;
        }
    }
    return next;
}

Orbit::Orbit(const DynamicalSystem& sys, MultiProjPoint start) : sys_(&sys), start_(std::move(start)) {
    levels_.push_back(initial_level(start_));
}

const OrbitLevel& Orbit::level(std::size_t n) {
    while (levels_.size() <= n) levels_.push_back(expand_level(*sys_, levels_.back()));
    return levels_[n];
}

double level_height_sum(const OrbitLevel& level, const DivisorCoeffs& coeffs, bool plus) {
    double total = 0.0;
    for (const auto& [key, e] : level.entries) {
        double h = multi_height(e.point, coeffs);
        if (plus) h = height_plus(h);
        total += e.multiplicity.get_d() * h;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Arithmetic degree

namespace {

void fill_tails(AlphaTrace& t) {
    const std::size_t m = t.values.size();
    const std::size_t from = m >= 3 ? m - 3 : 0;
    t.upper_tail = *std::max_element(t.values.begin() + static_cast<std::ptrdiff_t>(from), t.values.end());
    t.lower_tail = *std::min_element(t.values.begin() + static_cast<std::ptrdiff_t>(from), t.values.end());
}

double alpha_hat(double heights_sum, std::size_t n, std::size_t k) {
    return std::pow(heights_sum, 1.0 / static_cast<double>(n)) / static_cast<double>(k);
}

} // namespace

AlphaTrace alpha_estimate(Orbit& orbit, std::size_t n_max, const DivisorCoeffs& coeffs) {
    if (n_max < 1) throw InputError("n_max must be at least 1");
    AlphaTrace t;
    const std::size_t k = orbit.system().k();
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double s = level_height_sum(orbit.level(n), coeffs, true);
        t.heights_sums.push_back(s);
        t.values.push_back(alpha_hat(s, n, k));
    }
    fill_tails(t);
    return t;
}

AlphaTrace alpha_estimate(Orbit& orbit, std::size_t n_max) {
    return alpha_estimate(orbit, n_max, orbit.system().ample_coeffs);
}

AlphaTrace alpha_estimate(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max) {
    Orbit orbit(sys, p);
    return alpha_estimate(orbit, n_max);
}

// ---------------------------------------------------------------------------
// Canonical height

namespace {

const EigenData& require_eigen(const DynamicalSystem& sys) {
    if (!sys.eigen) throw InputError("canonical heights need eigendivisor data (beta, D)");
    return *sys.eigen;
}

} // namespace

double canonical_height_stage(Orbit& orbit, std::size_t n) {
    const EigenData& eig = require_eigen(orbit.system());
    const double sum = level_height_sum(orbit.level(n), eig.d_coeffs, false);
    return sum / std::pow(eig.beta, static_cast<double>(n));
}

CanonicalHeightResult canonical_height(Orbit& orbit, std::size_t n_max, double tol) {
    const EigenData& eig = require_eigen(orbit.system());
    if (n_max < 1) throw InputError("n_max must be at least 1");
    CanonicalHeightResult r;
    r.beta = eig.beta;
    r.stages.push_back(canonical_height_stage(orbit, 0));
    for (std::size_t n = 1; n <= n_max; ++n) {
        r.stages.push_back(canonical_height_stage(orbit, n));
        r.level = n;
        r.value = r.stages.back();
        r.cauchy_residual = std::abs(r.stages[n] - r.stages[n - 1]);
        if (r.cauchy_residual <= tol) break;
    }
    return r;
}

CanonicalHeightResult canonical_height(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max,
                                       double tol) {
    Orbit orbit(sys, p);
    return canonical_height(orbit, n_max, tol);
}

double functional_equation_residual(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n) {
    const EigenData& eig = require_eigen(sys);
    double lhs = 0.0;
    for (std::size_t i = 1; i <= sys.k(); ++i) {
        Orbit image(sys, sys.apply(i, p));
        lhs += canonical_height_stage(image, n);
    }
    Orbit base(sys, p);
    return std::abs(lhs - eig.beta * canonical_height_stage(base, n));
}

QuasiComparison quasi_comparison_check(const DynamicalSystem& sys, const std::vector<MultiProjPoint>& samples,
                                       std::size_t n) {
    const EigenData& eig = require_eigen(sys);
    QuasiComparison q;
    for (const auto& p : samples) {
        Orbit orbit(sys, p);
        const double hhat = canonical_height_stage(orbit, n);
        const double hd = multi_height(p, eig.d_coeffs);
        const double hx = height_plus(multi_height(p, sys.ample_coeffs));
        const double ratio = std::abs(hhat - hd) / std::sqrt(hx);
        q.sample_height.push_back(hx);
        q.sample_ratio.push_back(ratio);
        q.constant = std::max(q.constant, ratio);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Counting

CountingResult counting_function(Orbit& orbit, const std::vector<double>& bounds, std::size_t n_max) {
    if (!std::is_sorted(bounds.begin(), bounds.end())) throw InputError("height bounds must be increasing");
    const auto& sys = orbit.system();
    std::vector<double> sums;
    for (std::size_t n = 0; n <= n_max; ++n) sums.push_back(level_height_sum(orbit.level(n), sys.ample_coeffs, false));

    CountingResult out;
    for (double b : bounds) {
        CountingRow row;
        row.bound = b;
        row.count = static_cast<std::size_t>(std::count_if(sums.begin(), sums.end(), [b](double s) { return s <= b; }));
        row.ratio = static_cast<double>(row.count) / std::log(b);
        out.rows.push_back(row);
    }
    const AlphaTrace trace = alpha_estimate(orbit, std::max<std::size_t>(n_max, 1));
    out.target = 1.0 / std::log(static_cast<double>(sys.k()) * trace.values.back());
    return out;
}

CountingResult counting_function(const DynamicalSystem& sys, const MultiProjPoint& p,
                                 const std::vector<double>& bounds, std::size_t n_max) {
    Orbit orbit(sys, p);
    return counting_function(orbit, bounds, n_max);
}

OrbitPointCount orbit_point_count(Orbit& orbit, double bound, std::size_t n_max, double slack) {
    const auto& sys = orbit.system();
    std::set<std::string> seen;
    for (std::size_t n = 0; n <= n_max; ++n)
        for (const auto& [key, e] : orbit.level(n).entries)
            if (!seen.count(key) && multi_height(e.point, sys.ample_coeffs) <= bound) seen.insert(key);

    OrbitPointCount out;
    out.count = seen.size();
    out.bound_value = out.count == 0 ? 0.0 : std::pow(static_cast<double>(out.count), 1.0 / std::log(bound));
    const AlphaTrace trace = alpha_estimate(orbit, std::max<std::size_t>(n_max, 1));
    const double k = static_cast<double>(sys.k());
    out.bound_target = std::pow(k, 1.0 / std::log(k * trace.values.back()));
    out.bound_ok = out.bound_value >= slack * out.bound_target;
    return out;
}

OrbitPointCount orbit_point_count(const DynamicalSystem& sys, const MultiProjPoint& p, double bound,
                                  std::size_t n_max, double slack) {
    Orbit orbit(sys, p);
    return orbit_point_count(orbit, bound, n_max, slack);
}

// ---------------------------------------------------------------------------
// Preperiodicity

std::string to_string(Preperiodicity d) {
    switch (d) {
    case Preperiodicity::Preperiodic: return "preperiodic";
    case Preperiodicity::NotPreperiodic: return "not_preperiodic";
    case Preperiodicity::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

PreperiodicReport is_preperiodic(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max,
                                 double height_cap, double tol) {
    PreperiodicReport rep;
    std::set<std::string> visited{p.key()};
    std::vector<MultiProjPoint> frontier{p};
    std::vector<double> frontier_max{multi_height(p, sys.ample_coeffs)};

    for (std::size_t n = 1; n <= n_max && !frontier.empty(); ++n) {
        std::vector<MultiProjPoint> next;
        double hmax = 0.0;
        for (const auto& q : frontier)
            for (std::size_t i = 1; i <= sys.k(); ++i) {
                MultiProjPoint img = sys.apply(i, q);
                if (img.max_digits() > sys.digit_cap)
                    throw DigitCapExceeded("orbit coordinate exceeds " + std::to_string(sys.digit_cap) + " digits");
                if (visited.insert(img.key()).second) {
                    hmax = std::max(hmax, multi_height(img, sys.ample_coeffs));
                    next.push_back(std::move(img));
                }
            }
        rep.levels = n;
        frontier = std::move(next);
        if (!frontier.empty()) frontier_max.push_back(hmax);
    }
    rep.orbit_size = visited.size();

    if (frontier.empty()) {
        rep.decision = Preperiodicity::Preperiodic;
        return rep;
    }
    if (sys.eigen) {
        rep.canonical_height = canonical_height(sys, p, std::max<std::size_t>(n_max, 1), tol).value;
        if (rep.canonical_height > 10.0 * tol) {
            rep.decision = Preperiodicity::NotPreperiodic;
            return rep;
        }
    }
    const bool increasing = std::adjacent_find(frontier_max.begin(), frontier_max.end(),
                                               [](double a, double b) { return !(b > a); }) == frontier_max.end();
    if (increasing && frontier_max.back() > height_cap) rep.decision = Preperiodicity::NotPreperiodic;
    return rep;
}

// ---------------------------------------------------------------------------
// Empirical checks

GrowthBound growth_bound_check(Orbit& orbit, std::size_t n_max, double epsilon, double delta_upper, double slack) {
    if (!(epsilon > 0)) throw InputError("epsilon must be positive");
    const auto& sys = orbit.system();
    const double k = static_cast<double>(sys.k());
    const double h0 = height_plus(multi_height(orbit.start(), sys.ample_coeffs));
    GrowthBound g;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double s = level_height_sum(orbit.level(n), sys.ample_coeffs, true);
        const double scale = std::pow(k * (delta_upper + epsilon), static_cast<double>(n)) * h0;
        g.ratios.push_back(s / scale);
    }
    g.fitted_c = *std::max_element(g.ratios.begin(), g.ratios.end());
    g.consecutive_ok = std::isfinite(g.fitted_c);
    for (std::size_t n = 3; n + 1 < g.ratios.size(); ++n)
        if (g.ratios[n + 1] > slack * g.ratios[n]) g.consecutive_ok = false;
    return g;
}

GrowthBound growth_bound_check(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max,
                               double epsilon, double delta_upper, double slack) {
    Orbit orbit(sys, p);
    return growth_bound_check(orbit, n_max, epsilon, delta_upper, slack);
}

CheckOutcome alpha_leq_delta_check(Orbit& orbit, std::size_t n_max, double delta_upper, double slack) {
    const AlphaTrace t = alpha_estimate(orbit, n_max);
    return CheckOutcome{t.upper_tail <= delta_upper + slack, t.upper_tail, delta_upper + slack};
}

double height_independence_check(Orbit& orbit, std::size_t n_max, const DivisorCoeffs& alt_coeffs) {
    if (std::any_of(alt_coeffs.begin(), alt_coeffs.end(), [](double c) { return !(c > 0); }))
        throw InputError("alternative height coefficients must be positive");
    const AlphaTrace a = alpha_estimate(orbit, n_max);
    const AlphaTrace b = alpha_estimate(orbit, n_max, alt_coeffs);
    return std::abs(a.values.back() - b.values.back());
}

double height_independence_check(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max,
                                 const DivisorCoeffs& alt_coeffs) {
    Orbit orbit(sys, p);
    return height_independence_check(orbit, n_max, alt_coeffs);
}

CheckOutcome orbit_monotonicity_check(const DynamicalSystem& sys, const MultiProjPoint& p, const Word& g,
                                      std::size_t n_max, double slack) {
    Orbit base(sys, p);
    Orbit moved(sys, sys.apply(g, p));
    const AlphaTrace tp = alpha_estimate(base, n_max);
    const AlphaTrace tg = alpha_estimate(moved, n_max);
    return CheckOutcome{tg.upper_tail <= tp.upper_tail + slack, tg.upper_tail, tp.upper_tail + slack};
}

} // namespace orbitdeg
