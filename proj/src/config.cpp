#include "orbitdeg/config.hpp"

#include "orbitdeg/lcg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orbitdeg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string dot(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path.empty() ? "config" : path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(dot(path, key), "missing required field");
    return *it;
}

const json& require_array(const json& j, const std::string& path, std::size_t expected = 0) {
    if (!j.is_array()) fail(path, "expected an array");
    if (expected && j.size() != expected)
        fail(path, "expected " + std::to_string(expected) + " elements, got " + std::to_string(j.size()));
    return j;
}

Rational rational_field(const json& j, const std::string& path) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()));
    } catch (const InputError& e) {
        fail(path, e.what());
    }
    fail(path, "expected a rational as \"p/q\" or integer string");
}

double real_field(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    return to_double_nearest(rational_field(j, path));
}

std::size_t size_field(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        fail(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

NsMatrix matrix_field(const json& j, const std::string& path) {
    require_array(j, path);
    std::vector<std::vector<Rational>> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        require_array(j[i], at(path, i));
        if (j[i].size() != j.size()) fail(path, "matrix is not square");
        std::vector<Rational> row;
        for (std::size_t c = 0; c < j[i].size(); ++c) row.push_back(rational_field(j[i][c], at(at(path, i), c)));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(path, "matrix is empty");
    return NsMatrix::from_rows(rows);
}

GeneratorSet generators_field(const json& doc) {
    const json& g = require_array(require(doc, "generators", ""), "generators");
    if (g.empty()) fail("generators", "need at least one matrix");
    std::vector<NsMatrix> mats;
    for (std::size_t i = 0; i < g.size(); ++i) {
        mats.push_back(matrix_field(g[i], at("generators", i)));
        if (mats.back().dim() != mats.front().dim()) fail(at("generators", i), "dimension differs from generators[0]");
    }
    std::vector<std::string> labels;
    if (auto it = doc.find("labels"); it != doc.end()) {
        require_array(*it, "labels", g.size());
        for (const auto& l : *it) labels.push_back(l.get<std::string>());
    }
    return GeneratorSet(std::move(mats), std::move(labels));
}

DivisorCoeffs coeffs_field(const json& j, const std::string& path) {
    require_array(j, path);
    DivisorCoeffs c;
    for (std::size_t i = 0; i < j.size(); ++i) c.push_back(real_field(j[i], at(path, i)));
    return c;
}

WhelerSurface surface_field(const json& j) {
    const std::string path = "surface";
    const WhelerModel model = [&] {
        try {
            return parse_wheler_model(require(j, "model", path).get<std::string>());
        } catch (const InputError& e) {
            fail(dot(path, "model"), e.what());
        }
    }();
    WhelerSurface::Bilinear b;
    const json& bj = require_array(require(j, "bilinear", path), dot(path, "bilinear"), 3);
    for (std::size_t i = 0; i < 3; ++i) {
        require_array(bj[i], at(dot(path, "bilinear"), i), 3);
        for (std::size_t c = 0; c < 3; ++c) b[i][c] = rational_field(bj[i][c], at(at(dot(path, "bilinear"), i), c));
    }
    WhelerSurface::Biquadratic q;
    const json& qj = require_array(require(j, "biquadratic", path), dot(path, "biquadratic"), 6);
    for (std::size_t i = 0; i < 6; ++i) {
        require_array(qj[i], at(dot(path, "biquadratic"), i), 6);
        for (std::size_t c = 0; c < 6; ++c) q[i][c] = rational_field(qj[i][c], at(at(dot(path, "biquadratic"), i), c));
    }
    try {
        return WhelerSurface(b, q, model);
    } catch (const InputError& e) {
        fail(path, e.what());
    }
}

PnMorphism morphism_field(const json& j, const std::string& path) {
    const std::size_t n = size_field(require(j, "N", path), dot(path, "N"));
    const std::size_t d = size_field(require(j, "d", path), dot(path, "d"));
    const json& pj = require_array(require(j, "polys", path), dot(path, "polys"), n + 1);
    std::vector<HomogeneousPoly> polys;
    for (std::size_t i = 0; i < pj.size(); ++i) {
        const std::string ppath = at(dot(path, "polys"), i);
        require_array(pj[i], ppath);
        HomogeneousPoly poly;
        for (std::size_t t = 0; t < pj[i].size(); ++t) {
            const std::string tpath = at(ppath, t);
            Monomial m;
            const json& ej = require_array(require(pj[i][t], "exp", tpath), dot(tpath, "exp"), n + 1);
            for (std::size_t e = 0; e < ej.size(); ++e)
                m.exponents.push_back(static_cast<unsigned>(size_field(ej[e], at(dot(tpath, "exp"), e))));
            m.coeff = rational_field(require(pj[i][t], "c", tpath), dot(tpath, "c"));
            poly.push_back(std::move(m));
        }
        polys.push_back(std::move(poly));
    }
    try {
        return PnMorphism(n, static_cast<unsigned>(d), std::move(polys));
    } catch (const InputError& e) {
        fail(path, e.what());
    }
}

MultiProjPoint point_field(const json& j, const std::string& path) {
    require_array(j, path);
    if (j.empty()) fail(path, "empty point");
    std::vector<json> factors;
    if (j[0].is_string() || j[0].is_number()) factors.push_back(j);
    else factors.assign(j.begin(), j.end());
    MultiProjPoint p;
    for (std::size_t f = 0; f < factors.size(); ++f) {
        const std::string fpath = factors.size() == 1 && !j[0].is_array() ? path : at(path, f);
        require_array(factors[f], fpath);
        std::vector<Rational> raw;
        for (std::size_t c = 0; c < factors[f].size(); ++c) raw.push_back(rational_field(factors[f][c], at(fpath, c)));
        try {
            p.factors.push_back(normalize(raw));
        } catch (const InputError& e) {
            fail(fpath, e.what());
        }
    }
    return p;
}

json rational_json(const Rational& q) { return q.get_str(); }

json matrix_json(const NsMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(rational_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json generators_json(const GeneratorSet& g) {
    json mats = json::array();
    for (const auto& m : g.matrices()) mats.push_back(matrix_json(m));
    return mats;
}

json point_json(const MultiProjPoint& p) {
    json out = json::array();
    for (const auto& f : p.factors) {
        json coords = json::array();
        for (const auto& c : f.coords()) coords.push_back(c.get_str());
        out.push_back(coords);
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Shifts coefficients (within [-bound, bound]) until sum c_i w_i = 0, taking
// the largest weights first. The weight list must end with a weight of 1.
bool balance(std::vector<long>& coeffs, const std::vector<BigInt>& weights, long bound) {
    BigInt sum = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) sum += coeffs[i] * weights[i];
    std::vector<std::size_t> order(coeffs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return mpz_cmpabs(weights[a].get_mpz_t(), weights[b].get_mpz_t()) > 0;
    });
    for (std::size_t i : order) {
        if (sgn(sum) == 0) break;
        if (sgn(weights[i]) == 0) continue;
        BigInt step = -sum / weights[i]; // truncates toward zero
        long delta = step.fits_slong_p() ? step.get_si() : (sgn(step) > 0 ? 2 * bound : -2 * bound);
        delta = std::clamp(delta, -bound - coeffs[i], bound - coeffs[i]);
        coeffs[i] += delta;
        sum += delta * weights[i];
    }
    return sgn(sum) == 0;
}

// A (1,1)+(2,2) surface through a seed point: coefficients are drawn from
// [-bound, bound], then shifted by balance() so that both forms vanish at
// the seed; the draw is repeated until that succeeds and both involutions
// move the seed and its two neighbours.
WhelerSurface surface_through(const MultiProjPoint& seed, Lcg& rng, long bound) {
    const auto& x = seed.factors[0].coords();
    const auto& y = seed.factors[1].coords();
    // weights listed with the x_0 y_0 (resp. x_0^2 y_0^2) term, of weight 1, last
    std::vector<BigInt> bw, qw;
    for (std::size_t k = 1; k <= 9; ++k) {
        const std::size_t idx = k % 9;
        bw.push_back(x[idx / 3] * y[idx % 3]);
    }
    for (std::size_t k = 1; k <= 36; ++k) {
        const std::size_t idx = k % 36;
        const std::size_t a = idx / 6, c = idx % 6;
        qw.push_back(x[kQuadraticMonomials[a][0]] * x[kQuadraticMonomials[a][1]] * y[kQuadraticMonomials[c][0]] *
                     y[kQuadraticMonomials[c][1]]);
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<long> bc(9), qc(36);
        for (auto& c : bc) c = rng.uniform(-bound, bound);
        for (auto& c : qc) c = rng.uniform(-bound, bound);
        if (!balance(bc, bw, bound) || !balance(qc, qw, bound)) continue;

        WhelerSurface::Bilinear b;
        for (std::size_t k = 1; k <= 9; ++k) b[(k % 9) / 3][(k % 9) % 3] = bc[k - 1];
        // a singular bilinear form makes the surface degenerate
        const Rational det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                             b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                             b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        if (sgn(det) == 0) continue;
        WhelerSurface::Biquadratic q;
        for (std::size_t k = 1; k <= 36; ++k) q[(k % 36) / 6][(k % 36) % 6] = qc[k - 1];
        try {
            WhelerSurface s(b, q);
            const MultiProjPoint p1 = sigma(s, seed, 1);
            const MultiProjPoint p2 = sigma(s, seed, 2);
            if (p1 == seed || p2 == seed) continue;
            if (sigma(s, p1, 2) == p1 || sigma(s, p2, 1) == p2) continue;
            return s;
        } catch (const Error&) {
            continue;
        }
    }
    throw ComputationError("no nondegenerate surface through the seed point after 1000 draws");
}

json wheler_surface_json(const WhelerSurface& s) {
    json b = json::array(), q = json::array();
    for (const auto& row : s.bilinear()) {
        json r = json::array();
        for (const auto& v : row) r.push_back(rational_json(v));
        b.push_back(r);
    }
    for (const auto& row : s.biquadratic()) {
        json r = json::array();
        for (const auto& v : row) r.push_back(rational_json(v));
        q.push_back(r);
    }
    return json{{"model", to_string(s.model())}, {"bilinear", b}, {"biquadratic", q}};
}

json squaring_map_json() {
    return json{{"N", 1},
                {"d", 2},
                {"polys", json::array({json::array({json{{"exp", {2, 0}}, {"c", "1"}}}),
                                       json::array({json{{"exp", {0, 2}}, {"c", "1"}}})})}};
}

} // namespace

SystemKind parse_system_kind(const std::string& name) {
    if (name == "matrix_only") return SystemKind::MatrixOnly;
    if (name == "k3_wheler") return SystemKind::K3Wheler;
    if (name == "pn_morphisms") return SystemKind::PnMorphisms;
    throw ConfigError("kind: unknown system kind '" + name + "'");
}

std::string to_string(SystemKind kind) {
    switch (kind) {
    case SystemKind::MatrixOnly: return "matrix_only";
    case SystemKind::K3Wheler: return "k3_wheler";
    case SystemKind::PnMorphisms: return "pn_morphisms";
    }
    return "matrix_only";
}

SystemConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    SystemConfig cfg;
    cfg.source = doc;
    cfg.kind = parse_system_kind(require(doc, "kind", "").get<std::string>());

    switch (cfg.kind) {
    case SystemKind::MatrixOnly:
        cfg.generators = generators_field(doc);
        break;
    case SystemKind::K3Wheler:
        cfg.surface = surface_field(require(doc, "surface", ""));
        cfg.generators = doc.contains("generators") ? generators_field(doc) : pullback_matrices(*cfg.surface);
        cfg.ample_coeffs = {1.0, 1.0};
        if (cfg.surface->model() == WhelerModel::Bidegree11_22) cfg.eigen = EigenData{4.0, {1.0, 1.0}};
        break;
    case SystemKind::PnMorphisms: {
        const json& mj = require_array(require(doc, "morphisms", ""), "morphisms");
        if (mj.empty()) fail("morphisms", "need at least one morphism");
        for (std::size_t i = 0; i < mj.size(); ++i) {
            cfg.morphisms.push_back(morphism_field(mj[i], at("morphisms", i)));
            if (cfg.morphisms.back().dimension() != cfg.morphisms.front().dimension())
                fail(at("morphisms", i), "all morphisms must act on the same P^N");
        }
        std::vector<NsMatrix> gens;
        double beta = 0.0;
        for (const auto& f : cfg.morphisms) {
            gens.push_back(ns_matrix(f));
            beta += f.degree();
        }
        cfg.generators = GeneratorSet(std::move(gens));
        cfg.ample_coeffs = {1.0};
        if (beta > static_cast<double>(cfg.morphisms.size())) cfg.eigen = EigenData{beta, {1.0}};
        break;
    }
    }

    if (auto it = doc.find("ample_coeffs"); it != doc.end()) cfg.ample_coeffs = coeffs_field(*it, "ample_coeffs");
    if (auto it = doc.find("alt_coeffs"); it != doc.end()) cfg.alt_coeffs = coeffs_field(*it, "alt_coeffs");
    for (std::size_t i = 0; i < cfg.ample_coeffs.size(); ++i)
        if (!(cfg.ample_coeffs[i] > 0)) fail(at("ample_coeffs", i), "ample coefficients must be positive");
    if (cfg.alt_coeffs)
        for (std::size_t i = 0; i < cfg.alt_coeffs->size(); ++i)
            if (!((*cfg.alt_coeffs)[i] > 0)) fail(at("alt_coeffs", i), "coefficients must be positive");

    if (auto it = doc.find("eigen"); it != doc.end()) {
        EigenData e;
        e.beta = real_field(require(*it, "beta", "eigen"), "eigen.beta");
        e.d_coeffs = coeffs_field(require(*it, "d_coeffs", "eigen"), "eigen.d_coeffs");
        cfg.eigen = e;
    }

    if (auto it = doc.find("points"); it != doc.end()) {
        require_array(*it, "points");
        for (std::size_t i = 0; i < it->size(); ++i) {
            MultiProjPoint p = point_field((*it)[i], at("points", i));
            if (cfg.kind == SystemKind::K3Wheler) {
                if (p.size() != 2 || p.factors[0].size() != 3 || p.factors[1].size() != 3)
                    fail(at("points", i), "expected a point of P^2 x P^2");
                if (!contains(*cfg.surface, p)) fail(at("points", i), "point is not on the surface");
            } else if (cfg.kind == SystemKind::PnMorphisms) {
                if (p.size() != 1 || p.factors[0].size() != cfg.morphisms.front().dimension() + 1)
                    fail(at("points", i), "expected a point of P^" +
                                              std::to_string(cfg.morphisms.front().dimension()));
            }
            cfg.points.push_back(std::move(p));
        }
    }

    if (auto it = doc.find("limits"); it != doc.end()) {
        const json& l = *it;
        if (l.contains("n_max")) cfg.limits.n_max = size_field(l["n_max"], "limits.n_max");
        if (l.contains("word_budget")) cfg.limits.word_budget = size_field(l["word_budget"], "limits.word_budget");
        if (l.contains("digit_cap")) cfg.limits.digit_cap = size_field(l["digit_cap"], "limits.digit_cap");
        if (l.contains("delta_len")) cfg.limits.delta_len = size_field(l["delta_len"], "limits.delta_len");
        if (cfg.limits.n_max < 1) fail("limits.n_max", "must be at least 1");
        if (cfg.limits.delta_len < 1) fail("limits.delta_len", "must be at least 1");
    }
    if (auto it = doc.find("tolerances"); it != doc.end()) {
        const json& t = *it;
        auto set = [&](const char* key, double& slot) {
            if (t.contains(key)) slot = real_field(t[key], std::string("tolerances.") + key);
        };
        set("tol", cfg.tolerances.tol);
        set("delta_tol", cfg.tolerances.delta_tol);
        set("epsilon", cfg.tolerances.epsilon);
        set("alpha_slack", cfg.tolerances.alpha_slack);
        set("monotonicity_slack", cfg.tolerances.monotonicity_slack);
        set("independence_max", cfg.tolerances.independence_max);
        set("growth_ratio", cfg.tolerances.growth_ratio);
        set("functional_residual_max", cfg.tolerances.functional_residual_max);
        set("height_cap", cfg.tolerances.height_cap);
    }

    if (cfg.has_points_system()) {
        if (cfg.ample_coeffs.size() != (cfg.kind == SystemKind::K3Wheler ? 2u : 1u))
            fail("ample_coeffs", "expected one coefficient per projective factor");
        if (cfg.alt_coeffs && cfg.alt_coeffs->size() != cfg.ample_coeffs.size())
            fail("alt_coeffs", "expected one coefficient per projective factor");
        if (cfg.eigen) {
            if (cfg.eigen->d_coeffs.size() != cfg.ample_coeffs.size())
                fail("eigen.d_coeffs", "expected one coefficient per projective factor");
            if (!(cfg.eigen->beta > static_cast<double>(cfg.generators.size())))
                fail("eigen.beta", "must exceed the number of maps");
        }
    }
    return cfg;
}

SystemConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                          e.what());
    }
    try {
        return parse_config(doc);
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const InputError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

DynamicalSystem SystemConfig::system() const {
    DynamicalSystem sys;
    switch (kind) {
    case SystemKind::MatrixOnly:
        throw ConfigError("kind: matrix_only configs have no concrete maps");
    case SystemKind::K3Wheler:
        sys = make_k3_system(*surface);
        break;
    case SystemKind::PnMorphisms:
        sys = make_pn_system(morphisms);
        break;
    }
    sys.generators = generators;
    sys.ample_coeffs = ample_coeffs;
    sys.eigen = eigen;
    sys.digit_cap = limits.digit_cap;
    sys.validate();
    return sys;
}

std::string SystemConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(source.dump())));
    return buf;
}

std::vector<std::string> fixture_kinds() {
    return {"matrix_only_ex33", "matrix_only_ex34", "matrix_only_ex35", "p1_doubling", "k3"};
}

SystemConfig make_fixture(const std::string& kind, std::uint64_t seed) {
    json doc;
    if (kind == "matrix_only_ex33" || kind == "matrix_only_ex34" || kind == "matrix_only_ex35") {
        const GeneratorSet g = kind == "matrix_only_ex33"   ? pullback_matrices(WhelerModel::Bidegree11_22)
                               : kind == "matrix_only_ex34" ? pullback_matrices(WhelerModel::Bidegree12_21)
                                                            : pullback_matrices_tridegree222();
        doc = json{{"kind", "matrix_only"},
                   {"generators", generators_json(g)},
                   {"labels", g.labels()},
                   {"limits", {{"delta_len", kind == "matrix_only_ex35" ? 9 : 12}}}};
    } else if (kind == "p1_doubling") {
        doc = json{{"kind", "pn_morphisms"},
                   {"morphisms", json::array({squaring_map_json(), squaring_map_json()})},
                   {"points", json::array({json::array({json::array({"2", "1"})}),
                                           json::array({json::array({"1", "1"})}),
                                           json::array({json::array({"0", "1"})}),
                                           json::array({json::array({"1", "0"})})})},
                   {"ample_coeffs", {"1"}},
                   {"alt_coeffs", {"3"}},
                   {"eigen", {{"beta", "4"}, {"d_coeffs", {"1"}}}},
                   {"limits", {{"n_max", 12}, {"delta_len", 12}}}};
    } else if (kind == "k3") {
        Lcg rng(seed);
        std::vector<BigInt> x{1, rng.uniform(-2, 2), rng.uniform(-2, 2)};
        std::vector<BigInt> y{1, rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const MultiProjPoint p{{normalize(x), normalize(y)}};
        // also redrawn when the orbit outgrows the digit cap one level past n_max,
        // which the checks at f_i(P) reach
        std::optional<WhelerSurface> s;
        for (int attempt = 0; attempt < 100 && !s; ++attempt) {
            s = surface_through(p, rng, 10);
            try {
                const DynamicalSystem sys = make_k3_system(*s);
                Orbit(sys, p).level(9);
            } catch (const DigitCapExceeded&) {
                s.reset();
            }
        }
        if (!s) throw ComputationError("no surface keeps the seed orbit within the digit cap");
        doc = json{{"kind", "k3_wheler"},
                   {"surface", wheler_surface_json(*s)},
                   {"points", json::array({point_json(p)})},
                   {"ample_coeffs", {"1", "1"}},
                   {"alt_coeffs", {"2", "3"}},
                   {"eigen", {{"beta", "4"}, {"d_coeffs", {"1", "1"}}}},
                   {"seed", seed},
                   {"limits", {{"n_max", 8}, {"delta_len", 12}}}};
    } else {
        throw ConfigError("unknown fixture kind '" + kind + "'");
    }
    return parse_config(doc);
}

} // namespace orbitdeg
