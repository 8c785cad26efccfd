// pnkit: verification driver for Poisson-Nijenhuis structures on Gr(k,n)
// and CP^{n-1} orbits, with a Gelfand-Tsetlin groupoid calculator.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 config error,
// 3 numerical-guard error; the groupoid subcommand additionally uses
// 4 (not composable) and 5 (target outside the polytope).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnkit/errors.hpp"
#include "pnkit/orbit.hpp"
#include "pnkit/verification.hpp"

namespace {

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::string> parse_names(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

void write_or_print(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) throw pnkit::ConfigError("cannot open output file: " + path);
    out << payload;
}

struct VerifyArgs {
    std::string manifold = "cpn";
    int n = 2, k = 1;
    std::string t_csv = "-3,-1,0,1";
    int samples = 50;
    std::uint64_t seed = 1;
    double fd_step = 1e-5;
    std::string fd_scheme = "central-2";
    std::vector<std::string> tol_kv;
    std::string checks_csv;
    double pin_c = 0.0, pin_kappa = 0.0;
    bool has_pin_c = false, has_pin_kappa = false;
    std::string out_path;
};

pnkit::RunConfig to_config(const VerifyArgs& a) {
    pnkit::RunConfig cfg;
    cfg.manifold = a.manifold == "grass" ? "grassmannian" : a.manifold;
    cfg.n = a.n;
    cfg.k = a.k;
    cfg.t_values = parse_doubles(a.t_csv);
    cfg.samples = a.samples;
    cfg.seed = a.seed;
    cfg.fd_step = a.fd_step;
    if (a.fd_scheme == "central-2")
        cfg.fd_scheme = pnkit::FDScheme::Central2;
    else if (a.fd_scheme == "central-4")
        cfg.fd_scheme = pnkit::FDScheme::Central4;
    else
        throw pnkit::ConfigError("fd scheme must be central-2 or central-4");
    for (const auto& kv : a.tol_kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw pnkit::ConfigError("--tol expects NAME=VALUE");
        cfg.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    if (!a.checks_csv.empty()) cfg.checks = parse_names(a.checks_csv);
    if (a.has_pin_c) cfg.pin_c = a.pin_c;
    if (a.has_pin_kappa) cfg.pin_kappa = a.pin_kappa;
    return cfg;
}

int run_verify(const VerifyArgs& a) {
    const pnkit::RunConfig cfg = to_config(a);
    const pnkit::VerificationReport report = pnkit::run_suite(cfg);
    for (const auto& r : report.results) {
        std::printf("[%s] %-24s max_residual %.3e  tol %.3e  (%ld points)%s%s\n",
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.max_residual, r.tolerance,
                    r.points_evaluated, r.note.empty() ? "" : "  ", r.note.c_str());
    }
    std::printf("calibration: c = %.12g, kappa = %.12g\n", report.c, report.kappa);
    if (!a.out_path.empty()) write_or_print(a.out_path, pnkit::report_to_json(report));
    return report.all_pass() ? 0 : 1;
}

int run_spectrum(const VerifyArgs& a, const std::string& points_path) {
    const pnkit::RunConfig cfg = to_config(a);
    cfg.validate();
    std::ifstream in(points_path);
    if (!in) throw pnkit::ConfigError("cannot open points file: " + points_path);
    const auto points = pnkit::read_points_csv(in, cfg.orbit());
    write_or_print(a.out_path, pnkit::spectrum_dump(cfg, points));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson-Nijenhuis verification toolkit for unitary orbits"};
    app.require_subcommand(1);

    VerifyArgs va;
    std::string points_path;
    std::string groupoid_sub;
    std::string groupoid_json;

    auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--manifold", va.manifold, "cpn or grass")
            ->check(CLI::IsMember({"cpn", "grass", "grassmannian"}));
        cmd->add_option("--n", va.n, "matrix size n of u(n)");
        cmd->add_option("--k", va.k, "rank k (cpn requires k = 1)");
        cmd->add_option("--seed", va.seed, "sampling seed");
        cmd->add_option("--fd-step", va.fd_step, "finite-difference step");
        cmd->add_option("--fd-scheme", va.fd_scheme, "central-2 or central-4");
        cmd->add_option("--pin-c", va.pin_c, "pin the r-matrix constant")
            ->each([&](const std::string&) { va.has_pin_c = true; });
        cmd->add_option("--pin-kappa", va.pin_kappa, "pin the GT constant")
            ->each([&](const std::string&) { va.has_pin_kappa = true; });
        cmd->add_option("--out", va.out_path, "output file (stdout when omitted)");
    };

    auto* verify = app.add_subcommand("verify", "run the verification suite");
    add_model_flags(verify);
    verify->add_option("--t", va.t_csv, "comma-separated pencil parameters");
    verify->add_option("--samples", va.samples, "number of chart samples");
    verify->add_option("--tol", va.tol_kv, "tolerance override NAME=VALUE")->take_all();
    verify->add_option("--checks", va.checks_csv, "comma-separated check names");

    auto* spectrum = app.add_subcommand("spectrum", "tabulate GT and Nijenhuis spectra");
    add_model_flags(spectrum);
    spectrum->add_option("--points", points_path, "points CSV file")->required();

    auto* groupoid = app.add_subcommand("groupoid", "groupoid element calculator");
    groupoid->add_option("subcommand", groupoid_sub, "compose | member | target | pair-map")
        ->required()
        ->check(CLI::IsMember({"compose", "member", "target", "pair-map"}));
    groupoid->add_option("--json", groupoid_json, "JSON arguments")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) return run_verify(va);
        if (spectrum->parsed()) return run_spectrum(va, points_path);
        if (groupoid->parsed()) {
            std::cout << pnkit::groupoid_cli(groupoid_sub, groupoid_json) << "\n";
            return 0;
        }
    } catch (const pnkit::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const pnkit::NotComposable& e) {
        std::fprintf(stderr, "{\"error\":{\"type\":\"NotComposable\",\"message\":\"%s\"}}\n",
                     e.what());
        return 4;
    } catch (const pnkit::TargetOutsidePolytope& e) {
        std::fprintf(stderr,
                     "{\"error\":{\"type\":\"TargetOutsidePolytope\",\"message\":\"%s\"}}\n",
                     e.what());
        return 5;
    } catch (const pnkit::Error& e) {
        std::fprintf(stderr, "numerical guard: %s\n", e.what());
        return 3;
    }
    return 2;
}
