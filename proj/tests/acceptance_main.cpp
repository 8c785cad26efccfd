// Acceptance suite: one line per criterion, nonzero exit when any fails.
//
// Covers the full identity battery on CP^1, CP^2, CP^3 and Gr(2,4) at 100
// seeded points with the pencil grid t in {-3, -1, 0, 1}, the groupoid
// randomized suites at 10,000 cases per t-case, the pair-chart transport on
// CP^2, negative controls, and byte-level determinism of the report.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "pnkit/groupoid.hpp"
#include "pnkit/hermitian_model.hpp"
#include "pnkit/verification.hpp"

using namespace pnkit;

namespace {

int failures = 0;

void criterion(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

struct SuiteRun {
    std::string label;
    VerificationReport report;
    double seconds = 0.0;

    const CheckResult& operator[](const std::string& name) const {
        for (const auto& r : report.results)
            if (r.name == name) return r;
        std::fprintf(stderr, "missing check %s\n", name.c_str());
        std::exit(2);
    }
};

}  // namespace

int main() {
    // The four manifolds of the acceptance battery.
    const std::vector<std::pair<std::string, RunConfig>> setups = [] {
        std::vector<std::pair<std::string, RunConfig>> v;
        auto base = [](const char* manifold, int n, int k) {
            RunConfig cfg;
            cfg.manifold = manifold;
            cfg.n = n;
            cfg.k = k;
            cfg.t_values = {-3.0, -1.0, 0.0, 1.0};
            cfg.samples = 100;
            cfg.seed = 42;
            cfg.fd_step = 1e-5;
            return cfg;
        };
        v.emplace_back("cp1", base("cpn", 2, 1));
        v.emplace_back("cp2", base("cpn", 3, 1));
        v.emplace_back("cp3", base("cpn", 4, 1));
        v.emplace_back("gr24", base("grassmannian", 4, 2));
        return v;
    }();

    std::vector<SuiteRun> runs;
    for (const auto& [label, cfg] : setups) {
        const auto start = std::chrono::steady_clock::now();
        SuiteRun run{label, run_suite(cfg), 0.0};
        run.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        runs.push_back(std::move(run));
    }

    auto max_over = [&](const std::string& check) {
        double worst = 0.0;
        for (const auto& run : runs) worst = std::max(worst, run[check].max_residual);
        return worst;
    };
    auto slowest = [&]() {
        double worst = 0.0;
        for (const auto& run : runs) worst = std::max(worst, run.seconds);
        return worst;
    };

    // 1. Torsion of N_t vanishes on every manifold, every coordinate pair.
    {
        const double worst = max_over("torsion");
        criterion("torsion-vanishing", worst < 1e-5 && slowest() < 120.0,
                  fmt("max |T(N_t)| = %.3e < 1e-5, slowest manifold %.1f s", worst, slowest()));
    }

    // 2. Compatibility [pi, w^-1] = 0 and Jacobi [pi_t, pi_t] = 0.
    {
        const double worst = std::max(max_over("compatibility"), max_over("jacobi"));
        criterion("compatibility-and-jacobi", worst < 1e-5,
                  fmt("max Schouten residual = %.3e < 1e-5", worst));
    }

    // 3. Hierarchy compatibility [P_j, P_s] = 0 for j, s <= 3.
    {
        const double worst = max_over("hierarchy_compatibility");
        criterion("hierarchy-compatibility", worst < 1e-5,
                  fmt("max |[P_j, P_s]| = %.3e < 1e-5", worst));
    }

    // 4. Canonical Lenart relation for k <= 4, plus the log-det extension.
    {
        const double worst = std::max(max_over("lenart"), max_over("logdet_extension"));
        criterion("lenart-and-logdet", worst < 1e-5,
                  fmt("max gradient residual = %.3e < 1e-5", worst));
    }

    // 5. Involution of I_k, I_r under P_1, P_2.
    {
        const double worst = max_over("involution");
        criterion("involution", worst < 1e-6, fmt("max |{I_k, I_r}_{P_s}| = %.3e < 1e-6", worst));
    }

    // 6. Spectrum matching after calibration, holdout included.
    {
        const double worst = max_over("spectrum_match");
        criterion("spectrum-matching", worst < 1e-6,
                  fmt("max pairing distance = %.3e < 1e-6 (holdout included)", worst));
    }

    // 7. Eigenvalue equation at smooth points and Vandermonde independence.
    {
        const double eig = max_over("eigenvalue_equation");
        const double vdm = max_over("vandermonde");  // 1e-8 / min |det B|
        criterion("eigenvalue-equation", eig < 1e-5 && vdm <= 1.0,
                  fmt("max residual = %.3e < 1e-5, min |det B| > 1e-8 (ratio %.3e)", eig, vdm));
    }

    // 8. Double degeneracy: no odd-multiplicity clusters anywhere.
    {
        const double worst = max_over("double_degeneracy");
        criterion("double-degeneracy", worst == 0.0,
                  fmt("odd-multiplicity events = %.0f", worst));
    }

    // 9. Gelfand-Tsetlin interlacing within 1e-9.
    {
        const double worst = max_over("gt_interlacing");
        criterion("gt-interlacing", worst < 1e-9, fmt("max violation = %.3e < 1e-9", worst));
    }

    // 10. Groupoid axioms and the wide-subgroupoid closure, 10k cases per
    //     t-case with forced collisions at -t.
    {
        const double axioms = max_over("groupoid_axioms");
        const double closure = max_over("prop4_closure");
        long cases = 0;
        for (const auto& run : runs) cases = std::max(cases, run["prop4_closure"].points_evaluated);
        const bool pass = axioms < 1e-12 && closure == 0.0 && cases >= 30000;
        criterion("groupoid-axioms-closure", pass,
                  fmt("assoc/id/inv dev = %.3e < 1e-12, closure violations = %.0f", axioms,
                      closure) +
                      " (" + std::to_string(cases) + " closure cases)");
    }

    // 11. Cocycle transport on CP^2 at t = 1: composition exact in h,
    //     targets reproduced, over 100 fresh pairs.
    {
        const OrbitSpec spec{3, 1, 1.0};
        const Model model = Model::calibrated(spec);
        const auto pts = sample_chart_points(spec, 102, 4242);
        const double t = 1.0;
        double h_dev = 0.0, tgt_dev = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i + 2 < pts.size() && pairs < 100; ++i) {
            const auto gxy = pair_to_element(pts[i], pts[i + 1], t, model);
            const auto gyz = pair_to_element(pts[i + 1], pts[i + 2], t, model);
            const auto gxz = pair_to_element(pts[i], pts[i + 2], t, model);
            const auto composed = compose(gxy, gyz, 1e-6, Polytope::simplex(model.m()));
            h_dev = std::max(h_dev, (composed.h - gxz.h).cwiseAbs().maxCoeff());
            tgt_dev = std::max(
                tgt_dev,
                (target_unchecked(gxy) - model.gt(pts[i + 1]).flattened()).cwiseAbs().maxCoeff());
            ++pairs;
        }
        criterion("cocycle-morphism", h_dev < 1e-12 && tgt_dev < 1e-8 && pairs == 100,
                  fmt("h transport dev = %.3e < 1e-12, target dev = %.3e < 1e-8", h_dev,
                      tgt_dev) +
                      " over " + std::to_string(pairs) + " pairs");
    }

    // 12. Negative controls: random tensors fail the identities.
    {
        const double worst = max_over("negative_controls");
        criterion("negative-controls", worst == 0.0,
                  fmt("vacuous-tolerance events = %.0f (all controls > 1e-2)", worst));
    }

    // 13. Determinism: identical config and seed give byte-identical results.
    {
        RunConfig cfg = setups[0].second;
        cfg.samples = 25;
        const auto a = run_suite(cfg);
        const auto b = run_suite(cfg);
        const bool same = results_to_json(a.results) == results_to_json(b.results);
        criterion("determinism", same,
                  same ? "two runs, byte-identical result arrays" : "result arrays differ");
    }

    std::printf("%d/13 criteria passed\n", 13 - failures);
    return failures == 0 ? 0 : 1;
}
