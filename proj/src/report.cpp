#include "orbitdeg/report.hpp"

#include "orbitdeg/errors.hpp"
#include "orbitdeg/lcg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace orbitdeg {

using nlohmann::json;

namespace {

const std::vector<double> kCountBounds{1e1, 1e2, 1e4, 1e6};
constexpr std::size_t kSampleWords = 20;
constexpr std::size_t kSampleMaxLen = 7;
constexpr std::size_t kCyclicMaxLen = 5;
constexpr std::size_t kSubadditiveMax = 6;

json num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return round15(x);
}

json word_json(const Word& w) { return w.str(); }

json record(const std::string& quantity, std::optional<std::size_t> n, json value, json extra = json::object()) {
    json r{{"quantity", quantity}, {"n", n ? json(*n) : json(nullptr)}, {"value", std::move(value)}};
    for (auto& [k, v] : extra.items()) r[k] = v;
    return r;
}

struct Context {
    const SystemConfig& cfg;
    RunOptions opts;
    RunReport& report;

    std::size_t n_max() const { return opts.n_max.value_or(cfg.limits.n_max); }
    double tol() const { return opts.tol.value_or(cfg.tolerances.tol); }
    double epsilon() const { return opts.epsilon.value_or(cfg.tolerances.epsilon); }

    void check(const std::string& name, bool passed, double value, double bound, json extra = json::object()) {
        extra["name"] = name;
        extra["passed"] = passed;
        extra["bound"] = num(bound);
        report.records.push_back(record("check", std::nullopt, num(value), std::move(extra)));
        if (!passed) report.checks_failed = true;
    }
};

DynamicalSystem require_system(const SystemConfig& cfg, const std::string& cmd) {
    if (!cfg.has_points_system())
        throw ConfigError("command '" + cmd + "' needs a concrete system (kind k3_wheler or pn_morphisms)");
    if (cfg.points.empty()) throw ConfigError("points: command '" + cmd + "' needs at least one point");
    return cfg.system();
}

// ---------------------------------------------------------------------------

void run_delta(Context& c) {
    const auto& g = c.cfg.generators;
    const WordScan scan = scan_words(g, c.cfg.limits.delta_len, c.cfg.limits.word_budget);
    c.report.columns = {"n", "rho_root", "norm_root"};
    c.report.key_columns = 1;
    for (const auto& s : scan.lengths) {
        const double e = 1.0 / static_cast<double>(s.length);
        c.report.rows.push_back({s.length, num(std::pow(s.max_rho, e)), num(std::pow(s.max_norm, e))});
    }
    const LowerBound lo = delta_lower(scan);
    const UpperBound up = delta_upper(scan);
    const bool converged = up.value - lo.value <= c.cfg.tolerances.delta_tol;
    c.report.records.push_back(record("delta_bracket", lo.lengths_used, num(lo.value),
                                      {{"lower", num(lo.value)},
                                       {"upper", num(up.value)},
                                       {"witness", word_json(lo.witness)},
                                       {"best_upper_length", up.best_length},
                                       {"converged", converged},
                                       {"truncated", scan.truncated}}));
}

void run_eigendiv(Context& c) {
    const Eigendivisor e = find_eigendivisor(c.cfg.generators, c.cfg.limits.delta_len, c.cfg.limits.word_budget);
    json coeffs = json::array();
    for (double x : e.coeffs) coeffs.push_back(num(x));
    c.report.records.push_back(record("eigendivisor", std::nullopt, num(e.beta),
                                      {{"beta", num(e.beta)},
                                       {"coeffs", coeffs},
                                       {"delta_lower", num(e.delta_lower)},
                                       {"condition_ok", e.condition_ok}}));
}

void run_alpha(Context& c) {
    const DynamicalSystem sys = require_system(c.cfg, c.report.command);
    c.report.columns = {"point", "n", "sum_h", "alpha_n"};
    c.report.key_columns = 2;
    for (std::size_t pi = 0; pi < c.cfg.points.size(); ++pi) {
        Orbit orbit(sys, c.cfg.points[pi]);
        const AlphaTrace t = alpha_estimate(orbit, c.n_max());
        for (std::size_t n = 1; n <= t.values.size(); ++n)
            c.report.rows.push_back({pi, n, num(t.heights_sums[n - 1]), num(t.values[n - 1])});
        c.report.records.push_back(record("alpha_tail", t.values.size(), num(t.upper_tail),
                                          {{"point", pi}, {"upper", num(t.upper_tail)}, {"lower", num(t.lower_tail)}}));
    }
}

void run_canheight(Context& c) {
    const DynamicalSystem sys = require_system(c.cfg, c.report.command);
    c.report.columns = {"point", "n", "stage_n", "residual"};
    c.report.key_columns = 2;
    for (std::size_t pi = 0; pi < c.cfg.points.size(); ++pi) {
        Orbit orbit(sys, c.cfg.points[pi]);
        const CanonicalHeightResult r = canonical_height(orbit, c.n_max(), c.tol());
        for (std::size_t n = 0; n < r.stages.size(); ++n) {
            const json res = n == 0 ? json(nullptr) : num(std::abs(r.stages[n] - r.stages[n - 1]));
            c.report.rows.push_back({pi, n, num(r.stages[n]), res});
        }
        c.report.records.push_back(record("canonical_height", r.level, num(r.value),
                                          {{"point", pi}, {"residual", num(r.cauchy_residual)}, {"beta", num(r.beta)}}));
    }
}

void run_count(Context& c) {
    const DynamicalSystem sys = require_system(c.cfg, c.report.command);
    c.report.columns = {"point", "bound", "count", "ratio"};
    c.report.key_columns = 2;
    for (std::size_t pi = 0; pi < c.cfg.points.size(); ++pi) {
        Orbit orbit(sys, c.cfg.points[pi]);
        const CountingResult r = counting_function(orbit, kCountBounds, c.n_max());
        for (const auto& row : r.rows) c.report.rows.push_back({pi, num(row.bound), row.count, num(row.ratio)});
        c.report.records.push_back(record("counting_target", c.n_max(), num(r.target), {{"point", pi}}));
    }
}

void run_orbitcount(Context& c) {
    const DynamicalSystem sys = require_system(c.cfg, c.report.command);
    c.report.columns = {"point", "bound", "count", "bound_value", "bound_target"};
    c.report.key_columns = 2;
    for (std::size_t pi = 0; pi < c.cfg.points.size(); ++pi) {
        Orbit orbit(sys, c.cfg.points[pi]);
        for (double b : kCountBounds) {
            const OrbitPointCount r = orbit_point_count(orbit, b, c.n_max());
            c.report.rows.push_back({pi, num(b), r.count, num(r.bound_value), num(r.bound_target)});
            c.report.records.push_back(
                record("orbit_point_count", c.n_max(), r.count, {{"point", pi}, {"bound", num(b)}, {"bound_ok", r.bound_ok}}));
        }
    }
}

void run_preperiodic(Context& c) {
    const DynamicalSystem sys = require_system(c.cfg, c.report.command);
    for (std::size_t pi = 0; pi < c.cfg.points.size(); ++pi) {
        const PreperiodicReport r =
            is_preperiodic(sys, c.cfg.points[pi], c.n_max(), c.cfg.tolerances.height_cap, c.tol());
        c.report.records.push_back(record("preperiodic", r.levels, to_string(r.decision),
                                          {{"point", pi},
                                           {"orbit_size", r.orbit_size},
                                           {"canonical_height", num(r.canonical_height)}}));
    }
}

// ---------------------------------------------------------------------------
// check

void generator_checks(Context& c) {
    const auto& g = c.cfg.generators;
    const WordScan scan = scan_words(g, c.cfg.limits.delta_len, c.cfg.limits.word_budget);
    const LowerBound lo = delta_lower(scan);
    const UpperBound up = delta_upper(scan);
    c.check("delta_bracket", up.value <= 1.1 * lo.value, up.value, 1.1 * lo.value,
            {{"lower", num(lo.value)}, {"witness", word_json(lo.witness)}});

    // log max-norm subadditivity over the scanned lengths
    double worst = -std::numeric_limits<double>::infinity();
    const std::size_t len = scan.lengths.size();
    for (std::size_t n = 1; n <= std::min(len, kSubadditiveMax); ++n)
        for (std::size_t m = 1; m <= std::min(len, kSubadditiveMax) && n + m <= len; ++m) {
            const double gap = std::log(scan.lengths[n + m - 1].max_norm) - std::log(scan.lengths[n - 1].max_norm) -
                               std::log(scan.lengths[m - 1].max_norm);
            worst = std::max(worst, gap);
        }
    if (len >= 2) c.check("subadditivity", worst <= 1e-9, worst, 1e-9);

    // rho of every short word against each of its rotations
    double drift = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t L = 1; L <= kCyclicMaxLen; ++L) {
        idx.assign(L, 1);
        for (;;) {
            const double r0 = spectral_radius(word_matrix(g, Word{idx}));
            std::vector<std::size_t> rot = idx;
            for (std::size_t s = 1; s < L; ++s) {
                std::rotate(rot.begin(), rot.begin() + 1, rot.end());
                drift = std::max(drift, std::abs(spectral_radius(word_matrix(g, Word{rot})) - r0));
            }
            std::size_t pos = L;
            while (pos > 0 && idx[pos - 1] == g.size()) idx[--pos] = 1;
            if (pos == 0) break;
            ++idx[pos - 1];
        }
    }
    c.check("cyclic_invariance", drift <= 1e-9, drift, 1e-9);

    try {
        const Eigendivisor e = find_eigendivisor(g, c.cfg.limits.delta_len, c.cfg.limits.word_budget);
        c.check("eigendivisor_condition", e.condition_ok, e.beta,
                static_cast<double>(g.size()) * std::sqrt(e.delta_lower));
    } catch (const ComputationError& e) {
        c.check("eigendivisor_condition", false, std::nan(""), std::nan(""), {{"error", e.what()}});
    }
}

Word random_word(Lcg& rng, std::size_t k, std::size_t max_len) {
    Word w;
    const auto len = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(max_len)));
    for (std::size_t i = 0; i < len; ++i) w.indices.push_back(static_cast<std::size_t>(rng.uniform(1, static_cast<long>(k))));
    return w;
}

void point_checks(Context& c, const DynamicalSystem& sys, std::size_t pi, double delta_up, Lcg& rng) {
    const MultiProjPoint& p = c.cfg.points[pi];
    const std::size_t n_max = c.n_max();
    const auto& tl = c.cfg.tolerances;
    const json where{{"point", pi}};
    Orbit orbit(sys, p);

    // sampled orbit points
    const std::size_t sample_len = std::min(kSampleMaxLen, n_max > 0 ? n_max - 1 : 0);
    std::size_t involution_bad = 0, surface_bad = 0;
    for (std::size_t s = 0; s < kSampleWords; ++s) {
        const MultiProjPoint q = sys.apply(random_word(rng, sys.k(), sample_len), p);
        if (c.cfg.surface) {
            if (!contains(*c.cfg.surface, q)) ++surface_bad;
            for (std::size_t i = 1; i <= sys.k(); ++i)
                if (!(sys.apply(i, sys.apply(i, q)) == q)) ++involution_bad;
        }
    }
    if (c.cfg.surface) {
        c.check("involutions", involution_bad == 0, static_cast<double>(involution_bad), 0, where);
        c.check("on_surface", surface_bad == 0, static_cast<double>(surface_bad), 0, where);
    }
    std::size_t mult_bad = 0;
    for (std::size_t n = 0; n <= sample_len; ++n) {
        BigInt expected;
        mpz_ui_pow_ui(expected.get_mpz_t(), sys.k(), n);
        if (orbit.level(n).total_multiplicity() != expected) ++mult_bad;
    }
    c.check("multiplicity_totals", mult_bad == 0, static_cast<double>(mult_bad), 0, where);

    const CheckOutcome ad = alpha_leq_delta_check(orbit, n_max, delta_up, tl.alpha_slack);
    c.check("alpha_leq_delta", ad.passed, ad.value, ad.bound, where);

    const GrowthBound gb = growth_bound_check(orbit, n_max, c.epsilon(), delta_up, tl.growth_ratio);
    const bool gb_ok = std::isfinite(gb.fitted_c) && gb.consecutive_ok;
    c.check("growth_bound", gb_ok, gb.fitted_c, tl.growth_ratio, where);

    if (c.cfg.alt_coeffs) {
        const double d = height_independence_check(orbit, n_max, *c.cfg.alt_coeffs);
        c.check("height_independence", d <= tl.independence_max, d, tl.independence_max, where);
    }
    if (sys.eigen && n_max >= 1) {
        const double r = functional_equation_residual(sys, p, n_max - 1);
        c.check("functional_equation", r <= tl.functional_residual_max, r, tl.functional_residual_max, where);
    }
    const CheckOutcome mono = orbit_monotonicity_check(sys, p, Word{{1}}, n_max, tl.monotonicity_slack);
    c.check("orbit_monotonicity", mono.passed, mono.value, mono.bound, where);
}

void run_check(Context& c) {
    generator_checks(c);
    if (!c.cfg.has_points_system()) return;
    const DynamicalSystem sys = c.cfg.system();
    const double delta_up = delta_upper(c.cfg.generators, c.cfg.limits.delta_len, c.cfg.limits.word_budget).value;
    Lcg rng(c.opts.seed);
    for (std::size_t pi = 0; pi < c.cfg.points.size(); ++pi) point_checks(c, sys, pi, delta_up, rng);
}

// ---------------------------------------------------------------------------
// emission

std::string cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.15g", v.get<double>());
        return buf;
    }
    return v.dump();
}

void emit_csv(const RunReport& r, std::ostream& out) {
    if (!r.columns.empty()) {
        for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
        out << '\n';
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
            out << '\n';
        }
        return;
    }
    out << "quantity,n,value,detail\n";
    for (const auto& rec : r.records) {
        json detail = rec;
        for (const char* k : {"quantity", "n", "value"}) detail.erase(k);
        std::string d = detail.empty() ? "" : detail.dump();
        // csv-quote the json detail
        std::string quoted = "\"";
        for (char ch : d) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        quoted += "\"";
        out << cell(rec["quantity"]) << ',' << cell(rec["n"]) << ',' << cell(rec["value"]) << ','
            << (d.empty() ? "" : quoted) << '\n';
    }
}

void emit_jsonl(const RunReport& r, std::ostream& out) {
    out << json{{"quantity", "run"}, {"n", nullptr}, {"value", r.command},
                {"config_hash", r.config_hash}, {"seed", r.seed}}.dump()
        << '\n';
    for (const auto& row : r.rows) {
        json keys = json::object();
        for (std::size_t i = 0; i < r.key_columns; ++i) keys[r.columns[i]] = row[i];
        for (std::size_t i = r.key_columns; i < r.columns.size(); ++i) {
            json rec{{"quantity", r.columns[i]}, {"n", keys.contains("n") ? keys["n"] : json(nullptr)}, {"value", row[i]}};
            for (auto& [k, v] : keys.items())
                if (k != "n") rec[k] = v;
            out << rec.dump() << '\n';
        }
    }
    for (const auto& rec : r.records) out << rec.dump() << '\n';
    out << json{{"quantity", "timing"}, {"n", nullptr}, {"value", num(r.wall_ms)}, {"wall_ms", num(r.wall_ms)}}.dump()
        << '\n';
}

void emit_table(const RunReport& r, std::ostream& out) {
    out << "orbitdeg " << r.command << "  config " << r.config_hash << "  seed " << r.seed << '\n';
    if (!r.columns.empty()) {
        std::vector<std::vector<std::string>> cells;
        std::vector<std::size_t> width(r.columns.size());
        for (std::size_t i = 0; i < r.columns.size(); ++i) width[i] = r.columns[i].size();
        for (const auto& row : r.rows) {
            cells.emplace_back();
            for (std::size_t i = 0; i < row.size(); ++i) {
                cells.back().push_back(cell(row[i]));
                width[i] = std::max(width[i], cells.back().back().size());
            }
        }
        for (std::size_t i = 0; i < r.columns.size(); ++i) out << std::setw(int(width[i]) + 2) << r.columns[i];
        out << '\n';
        for (const auto& row : cells) {
            for (std::size_t i = 0; i < row.size(); ++i) out << std::setw(int(width[i]) + 2) << row[i];
            out << '\n';
        }
    }
    for (const auto& rec : r.records) {
        if (rec["quantity"] == "check") {
            out << (rec["passed"].get<bool>() ? "PASS  " : "FAIL  ") << std::left << std::setw(24)
                << rec["name"].get<std::string>() << std::right;
            if (rec.contains("point")) out << " point " << rec["point"].dump();
            out << "  value " << cell(rec["value"]) << "  bound " << cell(rec["bound"]) << '\n';
            continue;
        }
        out << cell(rec["quantity"]);
        if (!rec["n"].is_null()) out << " [n=" << rec["n"].dump() << "]";
        out << ": " << cell(rec["value"]);
        for (auto& [k, v] : rec.items())
            if (k != "quantity" && k != "n" && k != "value") out << "  " << k << "=" << cell(v);
        out << '\n';
    }
    if (r.checks_failed) out << "some checks failed\n";
    out << "wall " << cell(num(r.wall_ms)) << " ms\n";
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"delta",      "alpha",       "canheight", "count",
                                                "orbitcount", "preperiodic", "eigendiv",  "check"};
    return names;
}

double round15(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::strtod(buf, nullptr);
}

RunReport run_command(const std::string& cmd, const SystemConfig& config, const RunOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.command = cmd;
    report.config_hash = config.hash();
    report.seed = opts.seed;
    Context c{config, opts, report};

    if (cmd == "delta") run_delta(c);
    else if (cmd == "eigendiv") run_eigendiv(c);
    else if (cmd == "alpha") run_alpha(c);
    else if (cmd == "canheight") run_canheight(c);
    else if (cmd == "count") run_count(c);
    else if (cmd == "orbitcount") run_orbitcount(c);
    else if (cmd == "preperiodic") run_preperiodic(c);
    else if (cmd == "check") run_check(c);
    else throw ConfigError("unknown command '" + cmd + "'");

    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void emit(const RunReport& report, const std::string& format, std::ostream& out) {
    if (format == "table") emit_table(report, out);
    else if (format == "csv") emit_csv(report, out);
    else if (format == "jsonl") emit_jsonl(report, out);
    else throw InputError("unknown format '" + format + "' (expected table, csv or jsonl)");
}

void emit(const RunReport& report, const std::string& format, const std::string& path) {
    if (path.empty()) {
        emit(report, format, std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot open output file for writing");
    emit(report, format, out);
    if (!out) throw InputError(path + ": write failed");
}

json error_record(const std::string& kind, const std::string& message) {
    return json{{"quantity", "error"}, {"n", nullptr}, {"value", nullptr}, {"kind", kind}, {"message", message}};
}

} // namespace orbitdeg
