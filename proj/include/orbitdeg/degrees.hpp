#pragma once

// Orbit levels, arithmetic degrees, canonical heights and the empirical
// checks built on them, for concrete systems of maps over Q.

#include "orbitdeg/k3_wheler.hpp"
#include "orbitdeg/nsr_algebra.hpp"
#include "orbitdeg/pn_systems.hpp"
#include "orbitdeg/points_heights.hpp"

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orbitdeg {

inline constexpr std::size_t kDefaultDigitCap = 200'000;

/// Eigendivisor data: sum_i f_i^* D = beta D in NS.
struct EigenData {
    double beta = 0.0;
    DivisorCoeffs d_coeffs;
};

struct DynamicalSystem {
    using Map = std::function<MultiProjPoint(const MultiProjPoint&)>;

    std::vector<Map> maps;
    GeneratorSet generators;       // NS pullbacks, one per map
    DivisorCoeffs ample_coeffs;    // the height h_X
    std::optional<EigenData> eigen;
    std::size_t digit_cap = kDefaultDigitCap;

    std::size_t k() const noexcept { return maps.size(); }

    /// f_i(p), i 1-based.
    MultiProjPoint apply(std::size_t i, const MultiProjPoint& p) const;
    /// f_{i_1} o ... o f_{i_n}(p): the last letter acts first.
    MultiProjPoint apply(const Word& w, const MultiProjPoint& p) const;

    /// Throws InputError on a broken invariant (map/generator count, beta <= k).
    void validate() const;
};

/// The two covering involutions of a (1,1)+(2,2) surface; h_X = h_{L1+L2},
/// eigendivisor (beta, D) = (4, L1 + L2).
DynamicalSystem make_k3_system(const WhelerSurface& surface);

/// Morphisms of one P^N; h_X = h_H and by default (beta, D) = (sum d_i, H).
DynamicalSystem make_pn_system(std::vector<PnMorphism> maps);

struct OrbitEntry {
    MultiProjPoint point;
    BigInt multiplicity;
};

/// The multiset {f(P) : f a word of length n}, merged by canonical point key.
struct OrbitLevel {
    std::size_t n = 0;
    std::map<std::string, OrbitEntry> entries;

    BigInt total_multiplicity() const;
};

OrbitLevel initial_level(const MultiProjPoint& p);

/// One breadth step: every (Q, m) contributes (f_i(Q), m) for each i.
/// Throws DigitCapExceeded when an image coordinate exceeds sys.digit_cap digits.
OrbitLevel expand_level(const DynamicalSystem& sys, const OrbitLevel& prev);

/// Lazily expanded levels 0, 1, 2, ... of one starting point.
class Orbit {
public:
    Orbit(const DynamicalSystem& sys, MultiProjPoint start);
    Orbit(DynamicalSystem&&, MultiProjPoint) = delete; // the orbit keeps a reference

    const DynamicalSystem& system() const noexcept { return *sys_; }
    const MultiProjPoint& start() const noexcept { return start_; }
    const OrbitLevel& level(std::size_t n);

private:
    const DynamicalSystem* sys_;
    MultiProjPoint start_;
    std::deque<OrbitLevel> levels_;
};

/// sum over entries of multiplicity * h_D (or max(1, h_D) when `plus`).
double level_height_sum(const OrbitLevel& level, const DivisorCoeffs& coeffs, bool plus);

struct AlphaTrace {
    std::vector<double> values;       // alpha_n for n = 1..n_max
    std::vector<double> heights_sums; // sum of h^+ over F_n, n = 1..n_max
    double upper_tail = 0.0;          // max of the last three values
    double lower_tail = 0.0;          // min of the last three values
};

AlphaTrace alpha_estimate(Orbit& orbit, std::size_t n_max);
AlphaTrace alpha_estimate(Orbit& orbit, std::size_t n_max, const DivisorCoeffs& coeffs);
AlphaTrace alpha_estimate(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max);

struct CanonicalHeightResult {
    double value = 0.0;
    std::size_t level = 0;
    double cauchy_residual = 0.0;
    double beta = 0.0;
    std::vector<double> stages; // stage_0 .. stage_level
};

/// stage_n = beta^{-n} sum_{f in F_n} h_D(f(P)); stops at the first n with
/// |stage_n - stage_{n-1}| <= tol, otherwise at n_max.
CanonicalHeightResult canonical_height(Orbit& orbit, std::size_t n_max, double tol);
CanonicalHeightResult canonical_height(const DynamicalSystem& sys, const MultiProjPoint& p,
                                       std::size_t n_max, double tol);

/// stage_n exactly at level n.
double canonical_height_stage(Orbit& orbit, std::size_t n);

/// |sum_i stage_n(f_i P) - beta stage_n(P)|, each orbit expanded separately.
double functional_equation_residual(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n);

struct QuasiComparison {
    double constant = 0.0;            // max over samples
    std::vector<double> sample_height;// h^+_X of each sample
    std::vector<double> sample_ratio; // |hhat - h_D| / sqrt(h^+_X)
};

QuasiComparison quasi_comparison_check(const DynamicalSystem& sys, const std::vector<MultiProjPoint>& samples,
                                       std::size_t n);

struct CountingRow {
    double bound = 0.0;
    std::size_t count = 0;
    double ratio = 0.0; // count / log B
};

struct CountingResult {
    std::vector<CountingRow> rows;
    double target = 0.0; // 1 / log(k alpha_hat)
};

/// count(B) = #{0 <= n <= n_max : sum_{F_n} h_X(f(P)) <= B}.
CountingResult counting_function(Orbit& orbit, const std::vector<double>& bounds, std::size_t n_max);
CountingResult counting_function(const DynamicalSystem& sys, const MultiProjPoint& p,
                                 const std::vector<double>& bounds, std::size_t n_max);

struct OrbitPointCount {
    std::size_t count = 0;        // distinct orbit points with h_X <= B up to level n_max
    double bound_value = 0.0;     // count^{1 / log B}
    double bound_target = 0.0;    // k^{1 / log(k alpha_hat)}
    bool bound_ok = false;        // bound_value >= slack * bound_target
};

OrbitPointCount orbit_point_count(Orbit& orbit, double bound, std::size_t n_max, double slack = 0.9);
OrbitPointCount orbit_point_count(const DynamicalSystem& sys, const MultiProjPoint& p, double bound,
                                  std::size_t n_max, double slack = 0.9);

enum class Preperiodicity { Preperiodic, NotPreperiodic, Inconclusive };
std::string to_string(Preperiodicity d);

struct PreperiodicReport {
    Preperiodicity decision = Preperiodicity::Inconclusive;
    std::size_t orbit_size = 0;    // distinct points seen
    std::size_t levels = 0;        // levels explored
    double canonical_height = 0.0; // when eigen data is available
};

/// Closure of the orbit as a set within n_max levels means preperiodic; a
/// canonical height above 10 tol, or orbit heights above height_cap while
/// strictly increasing, means not preperiodic.
PreperiodicReport is_preperiodic(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max,
                                 double height_cap, double tol = 1e-3);

struct GrowthBound {
    std::vector<double> ratios; // n = 0..n_max
    double fitted_c = 0.0;
    bool consecutive_ok = false; // ratio_{n+1} <= slack * ratio_n for n >= 3
};

/// ratio_n = sum_{F_n} h^+ / (k^n (delta + eps)^n h^+_X(P)).
GrowthBound growth_bound_check(Orbit& orbit, std::size_t n_max, double epsilon, double delta_upper,
                               double slack = 1.05);
GrowthBound growth_bound_check(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max,
                               double epsilon, double delta_upper, double slack = 1.05);

struct CheckOutcome {
    bool passed = false;
    double value = 0.0;
    double bound = 0.0;
};

/// upper tail of the alpha trace <= delta_upper + slack.
CheckOutcome alpha_leq_delta_check(Orbit& orbit, std::size_t n_max, double delta_upper, double slack = 0.1);

/// |alpha_n(ample) - alpha_n(alt)| at n = n_max.
double height_independence_check(Orbit& orbit, std::size_t n_max, const DivisorCoeffs& alt_coeffs);
double height_independence_check(const DynamicalSystem& sys, const MultiProjPoint& p, std::size_t n_max,
                                 const DivisorCoeffs& alt_coeffs);

/// upper tail at g(P) <= upper tail at P + slack.
CheckOutcome orbit_monotonicity_check(const DynamicalSystem& sys, const MultiProjPoint& p, const Word& g,
                                      std::size_t n_max, double slack = 0.1);

} // namespace orbitdeg
