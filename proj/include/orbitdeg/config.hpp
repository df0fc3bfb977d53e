#pragma once

// JSON system configuration: loading, validation and fixture synthesis.

#include "orbitdeg/degrees.hpp"
#include "orbitdeg/k3_wheler.hpp"
#include "orbitdeg/nsr_algebra.hpp"
#include "orbitdeg/pn_systems.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace orbitdeg {

/// Bad config file: JSON syntax (with line/column) or a field that fails
/// validation (with its path, e.g. "generators[0]").
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

enum class SystemKind { MatrixOnly, K3Wheler, PnMorphisms };

SystemKind parse_system_kind(const std::string& name);
std::string to_string(SystemKind kind);

struct Limits {
    std::size_t n_max = 8;
    std::uint64_t word_budget = kDefaultWordBudget;
    std::size_t digit_cap = kDefaultDigitCap;
    std::size_t delta_len = 12;
};

/// Default thresholds for the empirical checks.
struct Tolerances {
    double tol = 1e-3;                  // Cauchy tolerance for canonical heights
    double delta_tol = 0.5;             // bracket width counted as converged
    double epsilon = 0.5;               // growth bound slack in delta + epsilon
    double alpha_slack = 0.1;           // alpha <= delta + slack
    double monotonicity_slack = 0.1;
    double independence_max = 0.2;
    double growth_ratio = 1.05;
    double functional_residual_max = 0.05;
    double height_cap = 1e4;            // for preperiodicity by height growth
};

struct SystemConfig {
    SystemKind kind = SystemKind::MatrixOnly;
    GeneratorSet generators;
    std::optional<WhelerSurface> surface;
    std::vector<PnMorphism> morphisms;
    std::vector<MultiProjPoint> points;
    std::optional<EigenData> eigen;
    DivisorCoeffs ample_coeffs;
    std::optional<DivisorCoeffs> alt_coeffs; // second ample height for independence checks
    Limits limits;
    Tolerances tolerances;
    nlohmann::json source;                   // the validated input document

    bool has_points_system() const { return kind != SystemKind::MatrixOnly; }
    /// The concrete system; ConfigError for matrix-only configs.
    DynamicalSystem system() const;
    /// FNV-1a 64-bit hash of the compact JSON dump, as 16 hex digits.
    std::string hash() const;
};

SystemConfig parse_config(const nlohmann::json& doc);
SystemConfig parse_config_text(const std::string& text);
SystemConfig load_config(const std::string& path);

/// Deterministic configs: "matrix_only_ex33", "matrix_only_ex34",
/// "matrix_only_ex35", "p1_doubling", "k3".
SystemConfig make_fixture(const std::string& kind, std::uint64_t seed);
std::vector<std::string> fixture_kinds();

} // namespace orbitdeg
