#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pnkit/hermitian_model.hpp"
#include "pnkit/orbit.hpp"

namespace pnkit {

/// Suite configuration. Tolerances not set explicitly fall back to the
/// registry defaults; an empty check list means the full registry.
struct RunConfig {
    std::string manifold = "cpn";  // "cpn" or "grassmannian"
    int n = 2;
    int k = 1;
    std::vector<double> t_values = {-3.0, -1.0, 0.0, 1.0};
    int samples = 50;
    std::uint64_t seed = 1;
    double fd_step = 1e-5;
    FDScheme fd_scheme = FDScheme::Central2;
    std::map<std::string, double> tolerances;
    std::vector<std::string> checks;
    std::optional<double> pin_c;
    std::optional<double> pin_kappa;

    void validate() const;  // throws ConfigError
    OrbitSpec orbit() const;
    FDConfig fd() const { return FDConfig{fd_step, fd_scheme}; }
    double tolerance(const std::string& check) const;
};

struct CheckResult {
    std::string name;
    long points_evaluated = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<Eigen::VectorXd> witnesses;  // up to 3 failing chart points
    std::string note;
};

struct VerificationReport {
    RunConfig config;
    double c = 0.0;
    double kappa = 0.0;
    double calibration_distance = 0.0;
    std::vector<CheckResult> results;
    double wall_time_ms = 0.0;
    std::string version;

    bool all_pass() const;
};

/// Names of every registered check, in execution order. The default check
/// list of run_suite is exactly this registry.
const std::vector<std::string>& check_registry();
double default_tolerance(const std::string& check);

/// Runs the requested checks; failures never abort the remaining ones.
/// Deterministic given (config, seed).
VerificationReport run_suite(const RunConfig& config);

/// JSON serialization with stable key order.
std::string report_to_json(const VerificationReport& report);

/// Results array only (used by the determinism contract).
std::string results_to_json(const std::vector<CheckResult>& results);

/// CSV table: chart coords, GT values, N eigenvalues, match distance,
/// smoothness flags, smooth-locus flag.
std::string spectrum_dump(const RunConfig& config, const std::vector<ChartPoint>& points);

/// Groupoid subcommands over JSON payloads: "compose", "member", "target",
/// "pair-map". Throws the operation's guard errors.
std::string groupoid_cli(const std::string& subcommand, const std::string& args_json);

}  // namespace pnkit
