// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "orbitdeg/config.hpp"
#include "orbitdeg/degrees.hpp"
#include "orbitdeg/k3_wheler.hpp"
#include "orbitdeg/lcg.hpp"
#include "orbitdeg/nsr_algebra.hpp"
#include "orbitdeg/report.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace orbitdeg;

namespace {

const std::string kFixtures = ORBITDEG_FIXTURE_DIR;

// Collects the sub-results of one criterion.
struct Criterion {
    int id;
    std::string title;
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) ok = false;
        notes.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GeneratorSet ex33() { return pullback_matrices(WhelerModel::Bidegree11_22); }
GeneratorSet ex34() { return pullback_matrices(WhelerModel::Bidegree12_21); }
GeneratorSet ex35() { return pullback_matrices_tridegree222(); }

MultiProjPoint p1(long a, long b) { return MultiProjPoint{{normalize(std::vector<BigInt>{a, b})}}; }

DynamicalSystem doubling() {
    return make_pn_system({PnMorphism::power_map(1, 2), PnMorphism::power_map(1, 2)});
}

const double kSqrt3 = std::sqrt(3.0);

// ---------------------------------------------------------------------------

void spectral_radii(Criterion& c) {
    const double r1 = spectral_radius(NsMatrix{{-1, -4}, {4, 15}});
    c.expect(std::abs(r1 - (7 + 4 * kSqrt3)) <= 1e-9, fmt("rho([[-1,-4],[4,15]]) = %.15g, want 7+4sqrt3 = %.15g", r1, 7 + 4 * kSqrt3));
    const double r2 = spectral_radius(NsMatrix{{15, 56}, {-4, -15}});
    c.expect(std::abs(r2 - 1.0) <= 1e-9, fmt("rho([[15,56],[-4,-15]]) = %.15g, want 1", r2));
    const double r3 = spectral_radius(NsMatrix{{1, -2, -2}, {2, 3, 10}, {2, 6, 15}});
    c.expect(std::abs(r3 - 18.3808) <= 2e-3, fmt("rho([[1,-2,-2],[2,3,10],[2,6,15]]) = %.6f, want 18.3808 +- 2e-3", r3));
}

void delta_brackets(Criterion& c) {
    {
        const auto t0 = std::chrono::steady_clock::now();
        const LowerBound lo = delta_lower(ex33(), 12);
        const UpperBound up = delta_upper(ex33(), 12);
        const double secs = seconds_since(t0);
        c.expect(std::abs(lo.value - (2 + kSqrt3)) <= 1e-9, fmt("(1,1)+(2,2): lower = %.15g, want 2+sqrt3", lo.value));
        c.expect(lo.witness.length() == 2, "(1,1)+(2,2): lower attained at word length 2, witness " + lo.witness.str());
        c.expect(up.value <= 1.1 * lo.value, fmt("(1,1)+(2,2): upper %.6f within 10%% of lower %.6f", up.value, lo.value));
        c.expect(secs < 5.0, fmt("(1,1)+(2,2): runtime %.3f s < 5 s", secs));
    }
    {
        const auto t0 = std::chrono::steady_clock::now();
        const LowerBound lo = delta_lower(ex34(), 12);
        const UpperBound up = delta_upper(ex34(), 12);
        const double secs = seconds_since(t0);
        const double want = (23 + 5 * std::sqrt(21.0)) / 2;
        c.expect(std::abs(lo.value * lo.value - want) <= 1e-6, fmt("(1,2)+(2,1): lower^2 = %.12g, want %.12g", lo.value * lo.value, want));
        c.expect(lo.witness.length() == 2, "(1,2)+(2,1): lower attained at word length 2, witness " + lo.witness.str());
        c.expect(up.value <= 1.1 * lo.value, fmt("(1,2)+(2,1): upper %.6f within 10%% of lower %.6f", up.value, lo.value));
        c.expect(secs < 5.0, fmt("(1,2)+(2,1): runtime %.3f s < 5 s", secs));
    }
}

void eigendivisor(Criterion& c) {
    const Eigendivisor e = find_eigendivisor(ex33(), 12);
    c.expect(std::abs(e.beta - 4.0) <= 1e-12, fmt("beta = %.15g, want 4", e.beta));
    const bool prop = e.coeffs.size() == 2 && std::abs(e.coeffs[0] / e.coeffs[1] - 1.0) <= 1e-9;
    c.expect(prop, fmt("eigenvector (%.12g, %.12g) proportional to (1,1)", e.coeffs.at(0), e.coeffs.at(1)));
    const double rhs = 2 * std::sqrt(e.delta_lower);
    c.expect(e.condition_ok && 4.0 > rhs, fmt("condition beta > k sqrt(delta): 4 > %.7f", rhs));
    c.expect(std::abs(rhs - 2 * std::sqrt(2 + kSqrt3)) <= 1e-9, fmt("k sqrt(delta) = %.7f = 3.8637...", rhs));
}

void doubling_oracle(Criterion& c) {
    const DynamicalSystem d = doubling();
    const MultiProjPoint p = p1(2, 1);
    Orbit orbit(d, p);
    double worst_h = 0, worst_a = 0, worst_fe = 0;
    const AlphaTrace t = alpha_estimate(orbit, 10);
    for (std::size_t n = 1; n <= 10; ++n) {
        worst_h = std::max(worst_h, std::abs(canonical_height(orbit, n, 0.0).value - std::log(2.0)));
        worst_a = std::max(worst_a, std::abs(t.values[n - 1] - oracle::doubling_alpha(n)));
        worst_fe = std::max(worst_fe, functional_equation_residual(d, p, n));
    }
    c.expect(worst_h <= 1e-12, fmt("canonical height of (2:1) vs log 2 at levels 1..10: max error %.3g", worst_h));
    c.expect(worst_fe <= 1e-12, fmt("functional-equation residual at levels 1..10: max %.3g", worst_fe));
    c.expect(worst_a <= 1e-12, fmt("alpha_n vs 2 (log 2)^(1/n), n <= 10: max error %.3g", worst_a));
    for (auto [a, b] : {std::pair{0L, 1L}, {1L, 0L}, {1L, 1L}}) {
        const auto r = is_preperiodic(d, p1(a, b), 12, 1e4);
        c.expect(r.decision == Preperiodicity::Preperiodic,
                 "(" + std::to_string(a) + ":" + std::to_string(b) + ") is " + to_string(r.decision));
    }
    const auto r = is_preperiodic(d, p, 12, 1e4);
    c.expect(r.decision == Preperiodicity::NotPreperiodic, "(2:1) is " + to_string(r.decision));
}

void counting(Criterion& c) {
    const DynamicalSystem d = doubling();
    Orbit orbit(d, p1(2, 1));
    const CountingResult r = counting_function(orbit, {1e1, 1e2, 1e4, 1e6}, 12);
    for (const auto& row : r.rows) {
        const std::size_t want = oracle::doubling_count(row.bound);
        c.expect(row.count == want, fmt("count(%.0e) = ", row.bound) + std::to_string(row.count) + ", want " +
                                        std::to_string(want));
    }
    const double ratio = r.rows.back().ratio, target = 1.0 / std::log(4.0);
    c.expect(std::abs(ratio - target) <= 0.05 * target,
             fmt("ratio at B=1e6 = %.5f, want within 5%% of 1/log 4 = %.5f", ratio, target) +
                 fmt(" (off by %.1f%%)", 100 * std::abs(ratio - target) / target));
}

void k3_properties(Criterion& c, const SystemConfig& cfg) {
    const DynamicalSystem sys = cfg.system();
    const WhelerSurface& s = *cfg.surface;
    const MultiProjPoint& p = cfg.points.front();
    Lcg rng(42);
    std::size_t inv_bad = 0, surf_bad = 0;
    for (int i = 0; i < 20; ++i) {
        Word w;
        const long len = rng.uniform(0, 7);
        for (long j = 0; j < len; ++j) w.indices.push_back(static_cast<std::size_t>(rng.uniform(1, 2)));
        const MultiProjPoint q = sys.apply(w, p);
        for (int which : {1, 2}) {
            const MultiProjPoint img = sigma(s, q, which);
            if (!(sigma(s, img, which) == q)) ++inv_bad;
            if (!oracle::on_surface(s, img)) ++surf_bad;
        }
        if (!oracle::on_surface(s, q)) ++surf_bad;
    }
    c.expect(inv_bad == 0, "sigma_i o sigma_i = id on 20 sampled orbit points: " + std::to_string(inv_bad) + " failures");
    c.expect(surf_bad == 0, "sampled points and their images lie on the surface: " + std::to_string(surf_bad) + " failures");
    Orbit orbit(sys, p);
    bool mult_ok = true;
    for (std::size_t n = 0; n <= 7; ++n) {
        BigInt want;
        mpz_ui_pow_ui(want.get_mpz_t(), 2, n);
        if (orbit.level(n).total_multiplicity() != want) mult_ok = false;
    }
    c.expect(mult_ok, "multiplicity totals equal 2^n for n <= 7");
}

void k3_analytics(Criterion& c, const SystemConfig& cfg) {
    const DynamicalSystem sys = cfg.system();
    const MultiProjPoint& p = cfg.points.front();
    Orbit orbit(sys, p);
    const AlphaTrace t = alpha_estimate(orbit, 8);
    c.expect(std::abs(t.values[7] - 2.0) <= 0.2, fmt("alpha_8 = %.5f, want within 0.2 of 2", t.values[7]));
    const double fe = functional_equation_residual(sys, p, 7);
    c.expect(fe <= 0.05, fmt("functional-equation residual at level 7 = %.5f <= 0.05", fe));
    const CheckOutcome ad = alpha_leq_delta_check(orbit, 8, 2 + kSqrt3, 0.1);
    c.expect(ad.passed, fmt("alpha tail max %.5f <= 2+sqrt3+0.1 = %.5f", ad.value, ad.bound));
    const double ind = height_independence_check(orbit, 8, {2.0, 3.0});
    c.expect(ind <= 0.2, fmt("|alpha_8(1,1) - alpha_8(2,3)| = %.5f <= 0.2", ind));
    const double up = delta_upper(cfg.generators, 12).value;
    const GrowthBound g = growth_bound_check(orbit, 8, 0.5, up, 1.05);
    double worst = 0;
    for (std::size_t n = 3; n + 1 < g.ratios.size(); ++n) worst = std::max(worst, g.ratios[n + 1] / g.ratios[n]);
    c.expect(std::isfinite(g.fitted_c) && g.consecutive_ok,
             fmt("growth bound: fitted C = %.5f finite, worst consecutive ratio %.5f <= 1.05", g.fitted_c, worst));
}

void subadditivity_cyclic(Criterion& c) {
    for (const auto& [name, g] : {std::pair{std::string("(1,1)+(2,2)"), ex33()}, {std::string("(2,2,2)"), ex35()}}) {
        const WordScan scan = scan_words(g, 12);
        double worst = -1e300;
        bool complete = scan.lengths.size() == 12;
        for (std::size_t n = 1; n <= 6 && complete; ++n)
            for (std::size_t m = 1; m <= 6; ++m)
                worst = std::max(worst, std::log(scan.lengths[n + m - 1].max_norm) -
                                            std::log(scan.lengths[n - 1].max_norm) -
                                            std::log(scan.lengths[m - 1].max_norm));
        c.expect(complete && worst <= 1e-9,
                 name + fmt(": max of a(n+m) - a(n) - a(m) over n,m <= 6 = %.3g (<= 1e-9)", worst));

        double drift = 0;
        std::size_t words = 0;
        for (std::size_t len = 1; len <= 5; ++len) {
            std::vector<std::size_t> idx(len, 1);
            for (;;) {
                const double r0 = spectral_radius(word_matrix(g, Word{idx}));
                std::vector<std::size_t> rot = idx;
                for (std::size_t s = 1; s < len; ++s) {
                    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
                    drift = std::max(drift, std::abs(spectral_radius(word_matrix(g, Word{rot})) - r0));
                }
                ++words;
                std::size_t pos = len;
                while (pos > 0 && idx[pos - 1] == g.size()) idx[--pos] = 1;
                if (pos == 0) break;
                ++idx[pos - 1];
            }
        }
        c.expect(drift <= 1e-9, name + ": rho under cyclic rotation, " + std::to_string(words) +
                                    fmt(" words of length <= 5, max drift %.3g", drift));
    }
}

std::string strip_timing(const std::string& text) {
    std::istringstream in(text);
    std::string out;
    for (std::string line; std::getline(in, line);)
        if (nlohmann::json::parse(line)["quantity"] != "timing") out += line + "\n";
    return out;
}

std::string full_suite_jsonl(std::uint64_t seed) {
    std::string out;
    RunOptions opts;
    opts.seed = seed;
    for (const std::string f : {"ex33.json", "ex34.json", "ex35.json", "p1_doubling.json", "k3_seed42.json"}) {
        const SystemConfig cfg = load_config(kFixtures + "/" + f);
        for (const auto& cmd : command_names()) {
            if (!cfg.has_points_system() && cmd != "delta" && cmd != "eigendiv" && cmd != "check") continue;
            std::ostringstream os;
            emit(run_command(cmd, cfg, opts), "jsonl", os);
            out += strip_timing(os.str());
        }
    }
    return out;
}

void determinism(Criterion& c) {
    const std::string a = full_suite_jsonl(42);
    const std::string b = full_suite_jsonl(42);
    c.expect(!a.empty() && a == b, "two full-suite runs, seed 42: " + std::to_string(a.size()) + " bytes of jsonl, " +
                                       (a == b ? "identical" : "different"));
    const SystemConfig k3a = make_fixture("k3", 42), k3b = make_fixture("k3", 42);
    c.expect(k3a.source.dump() == k3b.source.dump(), "make_fixture(\"k3\", 42) reproduces byte for byte");
}

} // namespace

int main() {
    const SystemConfig k3 = load_config(kFixtures + "/k3_seed42.json");

    std::vector<std::pair<Criterion, std::function<void(Criterion&)>>> all;
    all.push_back({{1, "spectral radii of the displayed matrices"}, spectral_radii});
    all.push_back({{2, "delta brackets for the two K3 pullback families"}, delta_brackets});
    all.push_back({{3, "eigendivisor of the (1,1)+(2,2) involutions"}, eigendivisor});
    all.push_back({{4, "P^1 doubling oracle"}, doubling_oracle});
    all.push_back({{5, "orbit counting on the doubling oracle"}, counting});
    all.push_back({{6, "K3 fixture exact properties"}, [&](Criterion& c) { k3_properties(c, k3); }});
    all.push_back({{7, "K3 fixture analytics"}, [&](Criterion& c) { k3_analytics(c, k3); }});
    all.push_back({{8, "subadditivity and cyclic invariance"}, subadditivity_cyclic});
    all.push_back({{9, "determinism"}, determinism});

    int failed = 0;
    for (auto& [c, run] : all) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::printf("criterion %d: %s  %s  (%.2f s)\n", c.id, c.ok ? "PASS" : "FAIL", c.title.c_str(), seconds_since(t0));
        for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
