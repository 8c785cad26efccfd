#include "pnkit/verification.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "pnkit/errors.hpp"
#include "pnkit/groupoid.hpp"
#include "pnkit/tensor_calculus.hpp"

namespace pnkit {

namespace {

constexpr const char* kVersion = "pnkit 0.1.0";

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Cached stencil: (omega, pi, GT) evaluated once per stencil node; every
// pencil / hierarchy / hamiltonian quantity is derived from these.

struct Node {
    Eigen::MatrixXd omega;
    Eigen::MatrixXd pi;
    Eigen::VectorXd gt;
};

struct Stencil {
    ChartPoint p;
    FDConfig fd;
    Node center;
    std::vector<std::array<Node, 2>> pm;   // [l] -> { +h, -h }
    std::vector<std::array<Node, 2>> pm2;  // central-4 only: { +2h, -2h }

    template <typename F>
    auto partial(int l, F&& derive) const {
        const double h = fd.step;
        if (fd.scheme == FDScheme::Central2) {
            auto a = derive(pm[l][0]);
            auto b = derive(pm[l][1]);
            return decltype(a)((a - b) * (1.0 / (2.0 * h)));
        }
        auto a = derive(pm[l][0]);
        auto b = derive(pm[l][1]);
        auto c = derive(pm2[l][0]);
        auto d = derive(pm2[l][1]);
        return decltype(a)((d - c + (a - b) * 8.0) * (1.0 / (12.0 * h)));
    }

    template <typename F>
    std::vector<Eigen::MatrixXd> matrix_partials(F&& derive) const {
        std::vector<Eigen::MatrixXd> out;
        out.reserve(pm.size());
        for (int l = 0; l < static_cast<int>(pm.size()); ++l)
            out.push_back(partial(l, derive));
        return out;
    }

    template <typename F>
    Eigen::VectorXd scalar_gradient(F&& derive) const {
        Eigen::VectorXd g(static_cast<int>(pm.size()));
        for (int l = 0; l < static_cast<int>(pm.size()); ++l) {
            const double h = fd.step;
            if (fd.scheme == FDScheme::Central2) {
                g[l] = (derive(pm[l][0]) - derive(pm[l][1])) / (2.0 * h);
            } else {
                g[l] = (derive(pm2[l][1]) - derive(pm2[l][0]) +
                        8.0 * (derive(pm[l][0]) - derive(pm[l][1]))) /
                       (12.0 * h);
            }
        }
        return g;
    }
};

Node eval_node(const Model& model, const ChartPoint& p) {
    const auto t = model.tensors(p);
    return Node{t.omega, t.pi, t.gt};
}

Stencil build_stencil(const Model& model, const ChartPoint& p, const FDConfig& fd) {
    Stencil st;
    st.p = p;
    st.fd = fd;
    st.center = eval_node(model, p);
    const int d = static_cast<int>(p.coords.size());
    st.pm.resize(d);
    if (fd.scheme == FDScheme::Central4) st.pm2.resize(d);
    for (int l = 0; l < d; ++l) {
        for (int s = 0; s < 2; ++s) {
            const double sign = s == 0 ? 1.0 : -1.0;
            ChartPoint q = p;
            q.coords[l] += sign * fd.step;
            st.pm[l][s] = eval_node(model, q);
            if (fd.scheme == FDScheme::Central4) {
                ChartPoint q2 = p;
                q2.coords[l] += 2.0 * sign * fd.step;
                st.pm2[l][s] = eval_node(model, q2);
            }
        }
    }
    return st;
}

Eigen::MatrixXd node_N(const Node& n, double t = 0.0) {
    Eigen::MatrixXd N = n.pi * n.omega;
    if (t != 0.0) N += t * Eigen::MatrixXd::Identity(N.rows(), N.cols());
    return N;
}

Eigen::MatrixXd node_pi_t(const Node& n, double t) {
    if (t == 0.0) return n.pi;
    Eigen::MatrixXd r = n.pi + t * n.omega.inverse();
    return 0.5 * (r - r.transpose().eval());
}

Eigen::MatrixXd node_P(const Node& n, int j) {
    Eigen::MatrixXd P = n.omega.inverse();
    const Eigen::MatrixXd N = n.pi * n.omega;
    for (int i = 1; i < j; ++i) P = N * P;
    return 0.5 * (P - P.transpose().eval());
}

double node_I(const Node& n, int k, double t = 0.0) {
    const Eigen::MatrixXd N = node_N(n, t);
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(N.rows(), N.cols());
    for (int i = 0; i < k; ++i) R = R * N;
    return R.trace() / static_cast<double>(k);
}

std::vector<double> sorted_real_eigenvalues(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    std::vector<double> v;
    v.reserve(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) v.push_back(es.eigenvalues()[i].real());
    std::sort(v.begin(), v.end());
    return v;
}

// ---------------------------------------------------------------------------
// Suite context and bookkeeping.

struct Ctx {
    const RunConfig& cfg;
    OrbitSpec spec;
    Model model;
    std::vector<ChartPoint> samples;
    double calibration_distance = 0.0;
    std::vector<std::optional<Stencil>> stencil_cache;

    const Stencil& stencil(int i) {
        if (!stencil_cache[i])
            stencil_cache[i] = build_stencil(model, samples[i], cfg.fd());
        return *stencil_cache[i];
    }
};

struct Tracker {
    std::string name;
    double tol = 0.0;
    long count = 0;
    double max_res = 0.0;
    std::vector<Eigen::VectorXd> witnesses;
    std::string note;

    Tracker(std::string n, double t) : name(std::move(n)), tol(t) {}

    void add(double r, const ChartPoint& p) {
        ++count;
        if (r > max_res) max_res = r;
        if (r > tol && witnesses.size() < 3) witnesses.push_back(p.coords);
    }
    void add(double r) {
        ++count;
        if (r > max_res) max_res = r;
    }

    CheckResult result() const {
        CheckResult cr;
        cr.name = name;
        cr.points_evaluated = count;
        cr.max_residual = max_res;
        cr.tolerance = tol;
        cr.pass = max_res <= tol;
        cr.witnesses = witnesses;
        cr.note = note;
        return cr;
    }
};

ChartPoint opposite_chart_origin(const OrbitSpec& spec) {
    ChartPoint p = ChartPoint::origin(spec);
    p.chart_id.resize(spec.k);
    for (int j = 0; j < spec.k; ++j) p.chart_id[j] = spec.n - spec.k + j;
    return p;
}

double pair_case_t(const RunConfig& cfg) {
    for (double t : cfg.t_values)
        if (t < -2.0 || t > 0.0) return t;
    return 1.0;
}

// ---------------------------------------------------------------------------
// Checks. Guard errors inside a check surface as a failed result and never
// abort the remaining checks.

CheckResult check_spectrum_preservation(Ctx& ctx, double tol) {
    Tracker tr("spectrum_preservation", tol);
    std::vector<double> ref(ctx.spec.n, 0.0);
    for (int j = ctx.spec.n - ctx.spec.k; j < ctx.spec.n; ++j) ref[j] = ctx.spec.scale;
    for (const auto& p : ctx.samples) {
        const EmbeddedPoint x = embed(ctx.spec, p);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Complex(0, -1) * x.matrix);
        double dev = 0.0;
        for (int j = 0; j < ctx.spec.n; ++j)
            dev = std::max(dev, std::abs(es.eigenvalues()[j] - ref[j]));
        tr.add(dev, p);
    }
    return tr.result();
}

CheckResult check_frame_rank(Ctx& ctx, double tol) {
    Tracker tr("frame_rank", tol);
    for (const auto& p : ctx.samples) {
        double violation = 0.0;
        try {
            (void)tangent_frame(ctx.spec, p, ctx.cfg.fd());
        } catch (const Error&) {
            violation = 1.0;
        }
        tr.add(violation, p);
    }
    return tr.result();
}

CheckResult check_generator_roundtrip(Ctx& ctx, double tol) {
    Tracker tr("generator_roundtrip", tol);
    std::mt19937_64 rng(ctx.cfg.seed ^ 0x9d2c5680u);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    const auto& basis = skew_hermitian_basis(ctx.spec.n);
    for (const auto& p : ctx.samples) {
        const EmbeddedPoint x = embed(ctx.spec, p);
        Eigen::MatrixXcd X0 = Eigen::MatrixXcd::Zero(ctx.spec.n, ctx.spec.n);
        for (const auto& e : basis) X0 += uniform() * e;
        const Eigen::MatrixXcd v = X0 * x.matrix - x.matrix * X0;
        const Eigen::MatrixXcd X = solve_generator(x, v);
        const double res = (X * x.matrix - x.matrix * X - v).cwiseAbs().maxCoeff() /
                           std::max(1.0, v.cwiseAbs().maxCoeff());
        tr.add(res, p);
    }
    return tr.result();
}

CheckResult check_fd_convergence(Ctx& ctx, double tol) {
    Tracker tr("fd_convergence", tol);
    const int d = ctx.spec.dim();
    Eigen::VectorXd alpha(d);
    for (int j = 0; j < d; ++j) alpha[j] = 0.3 + 0.5 * j / std::max(1, d - 1);
    ScalarField f = [&](const ChartPoint& q) { return std::sin(alpha.dot(q.coords) + 0.3); };
    const int npts = std::min<int>(3, static_cast<int>(ctx.samples.size()));
    for (int i = 0; i < npts; ++i) {
        const ChartPoint& p = ctx.samples[i];
        const double c = std::cos(alpha.dot(p.coords) + 0.3);
        for (int j = 0; j < d; ++j) {
            const double exact = alpha[j] * c;
            const double h2 = 1e-3;
            const double e2 =
                std::abs(fd_directional(f, p, j, FDConfig{h2, FDScheme::Central2}) - exact);
            tr.add(e2 / (h2 * h2), p);
            const double h4 = 1e-2;
            const double e4 =
                std::abs(fd_directional(f, p, j, FDConfig{h4, FDScheme::Central4}) - exact);
            tr.add(e4 / (h4 * h4 * h4 * h4), p);
        }
    }
    return tr.result();
}

CheckResult check_calibration(Ctx& ctx, double tol) {
    Tracker tr("calibration", tol);
    const int npts = std::min<int>(16, static_cast<int>(ctx.samples.size()));
    for (int i = 0; i < npts; ++i) {
        const auto& st = ctx.stencil(i);
        const auto nspec = nijenhuis_spectrum(EndomorphismAtPoint{node_N(st.center)}, 1e-6);
        const auto rep = match_spectra(nspec, ctx.model.gt(ctx.samples[i]), tol);
        tr.add(rep.unmatched > 0 ? 1.0 : rep.max_distance, ctx.samples[i]);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "c=%.12g kappa=%.12g", ctx.model.c(), ctx.model.kappa());
    tr.note = buf;
    return tr.result();
}

CheckResult check_kks_closedness(Ctx& ctx, double tol) {
    Tracker tr("kks_closedness", tol);
    const int d = ctx.spec.dim();
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const auto& st = ctx.stencil(static_cast<int>(i));
        const auto dW = st.matrix_partials([](const Node& n) { return n.omega; });
        double worst = 0.0;
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b)
                for (int c = b + 1; c < d; ++c)
                    worst = std::max(worst, std::abs(dW[a](b, c) + dW[b](c, a) + dW[c](a, b)));
        tr.add(worst, ctx.samples[i]);
    }
    return tr.result();
}

CheckResult check_bruhat_fixed_point(Ctx& ctx, double tol) {
    Tracker tr("bruhat_fixed_point", tol);
    const ChartPoint p = opposite_chart_origin(ctx.spec);
    tr.add(ctx.model.pi(p).components.cwiseAbs().maxCoeff(), p);
    tr.note = "evaluated at the Bruhat fixed point x0 (opposite-chart origin)";
    return tr.result();
}

CheckResult check_spectrum_match(Ctx& ctx, double tol) {
    Tracker tr("spectrum_match", tol);
    auto run = [&](const ChartPoint& p, const Node& n) {
        const auto nspec = nijenhuis_spectrum(EndomorphismAtPoint{node_N(n)}, 1e-6);
        const auto rep = match_spectra(nspec, ctx.model.gt(p), tol);
        tr.add(rep.unmatched > 0 ? 1.0 : rep.max_distance, p);
    };
    for (std::size_t i = 0; i < ctx.samples.size(); ++i)
        run(ctx.samples[i], ctx.stencil(static_cast<int>(i)).center);
    // Holdout: fresh points, no re-calibration.
    const auto holdout = sample_chart_points(ctx.spec, std::min(ctx.cfg.samples, 50),
                                             ctx.cfg.seed ^ 0x9e3779b97f4a7c15ull);
    for (const auto& p : holdout) run(p, eval_node(ctx.model, p));
    return tr.result();
}

CheckResult check_gt_interlacing(Ctx& ctx, double tol) {
    Tracker tr("gt_interlacing", tol);
    for (const auto& p : ctx.samples)
        tr.add(ctx.model.gt(p).interlacing_violation(ctx.model.shape().top), p);
    return tr.result();
}

CheckResult check_gt_count(Ctx& ctx, double tol) {
    Tracker tr("gt_count", tol);
    for (const auto& p : ctx.samples) {
        double violation = 0.0;
        try {
            (void)ctx.model.gt(p);
        } catch (const CountMismatch&) {
            violation = 1.0;
        }
        tr.add(violation, p);
    }
    return tr.result();
}

CheckResult check_pencil_nondegeneracy(Ctx& ctx, double tol) {
    Tracker tr("pencil_nondegeneracy", tol);
    for (double t : {-3.0, 0.5, 1.0}) {
        for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
            const double det = node_pi_t(ctx.stencil(static_cast<int>(i)).center, t).determinant();
            tr.add(std::abs(det) < 1e-8 ? 1.0 : 0.0, ctx.samples[i]);
        }
    }
    // Degeneracy witness for t = -1: a GT value near or crossing 1.
    bool witness = false;
    for (std::size_t i = 0; i < ctx.samples.size() && !witness; ++i) {
        const Eigen::VectorXd gt = ctx.stencil(static_cast<int>(i)).center.gt;
        for (Eigen::Index j = 0; j < gt.size(); ++j)
            if (std::abs(gt[j] - 1.0) < 0.05) witness = true;
    }
    for (std::size_t i = 0; i + 1 < ctx.samples.size() && !witness; ++i) {
        const Eigen::VectorXd a = ctx.stencil(static_cast<int>(i)).center.gt;
        const Eigen::VectorXd b = ctx.stencil(static_cast<int>(i + 1)).center.gt;
        for (Eigen::Index j = 0; j < a.size(); ++j)
            if ((a[j] - 1.0) * (b[j] - 1.0) < 0.0) witness = true;
    }
    tr.add(witness ? 0.0 : 1.0);
    if (!witness) tr.note = "no sample witnessed the t=-1 degeneracy locus";
    return tr.result();
}

CheckResult check_jacobi(Ctx& ctx, double tol) {
    Tracker tr("jacobi", tol);
    for (double t : ctx.cfg.t_values) {
        auto derive = [t](const Node& n) { return node_pi_t(n, t); };
        for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
            const auto& st = ctx.stencil(static_cast<int>(i));
            const Eigen::MatrixXd P0 = derive(st.center);
            const auto dP = st.matrix_partials(derive);
            tr.add(schouten_from_partials(P0, dP, P0, dP).max_abs(), ctx.samples[i]);
        }
    }
    return tr.result();
}

CheckResult check_compatibility(Ctx& ctx, double tol) {
    Tracker tr("compatibility", tol);
    auto dpi = [](const Node& n) { return n.pi; };
    auto dwi = [](const Node& n) -> Eigen::MatrixXd { return n.omega.inverse(); };
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const auto& st = ctx.stencil(static_cast<int>(i));
        tr.add(schouten_from_partials(dpi(st.center), st.matrix_partials(dpi), dwi(st.center),
                                      st.matrix_partials(dwi))
                   .max_abs(),
               ctx.samples[i]);
    }
    return tr.result();
}

CheckResult check_hierarchy_compatibility(Ctx& ctx, double tol) {
    Tracker tr("hierarchy_compatibility", tol);
    for (int j = 1; j <= 3; ++j) {
        for (int s = j; s <= 3; ++s) {
            auto dj = [j](const Node& n) { return node_P(n, j); };
            auto ds = [s](const Node& n) { return node_P(n, s); };
            for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
                const auto& st = ctx.stencil(static_cast<int>(i));
                tr.add(schouten_from_partials(dj(st.center), st.matrix_partials(dj), ds(st.center),
                                              st.matrix_partials(ds))
                           .max_abs(),
                       ctx.samples[i]);
            }
        }
    }
    return tr.result();
}

CheckResult check_torsion(Ctx& ctx, double tol) {
    Tracker tr("torsion", tol);
    for (double t : ctx.cfg.t_values) {
        auto derive = [t](const Node& n) { return node_N(n, t); };
        for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
            const auto& st = ctx.stencil(static_cast<int>(i));
            tr.add(torsion_max_from_partials(derive(st.center), st.matrix_partials(derive)),
                   ctx.samples[i]);
        }
    }
    return tr.result();
}

CheckResult check_np_symmetry_suite(Ctx& ctx, double tol) {
    Tracker tr("np_symmetry", tol);
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const Node& n = ctx.stencil(static_cast<int>(i)).center;
        double worst = 0.0;
        for (double t : ctx.cfg.t_values) {
            const Eigen::MatrixXd Nt = node_N(n, t);
            const Eigen::MatrixXd Pt = node_pi_t(n, t);
            worst =
                std::max(worst, check_np_symmetry(BivectorAtPoint{Pt}, EndomorphismAtPoint{Nt}));
        }
        const Eigen::MatrixXd N0 = node_N(n);
        for (int j = 1; j <= 3; ++j)
            worst = std::max(
                worst, check_np_symmetry(BivectorAtPoint{node_P(n, j)}, EndomorphismAtPoint{N0}));
        tr.add(worst, ctx.samples[i]);
    }
    return tr.result();
}

CheckResult check_lenart(Ctx& ctx, double tol) {
    Tracker tr("lenart", tol);
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const auto& st = ctx.stencil(static_cast<int>(i));
        const Eigen::MatrixXd N0 = node_N(st.center);
        for (int k = 1; k <= 4; ++k) {
            const Eigen::VectorXd gk =
                st.scalar_gradient([k](const Node& n) { return node_I(n, k); });
            const Eigen::VectorXd gk1 =
                st.scalar_gradient([k](const Node& n) { return node_I(n, k + 1); });
            tr.add((N0.transpose() * gk - gk1).cwiseAbs().maxCoeff(), ctx.samples[i]);
        }
    }
    return tr.result();
}

CheckResult check_logdet_extension_suite(Ctx& ctx, double tol) {
    Tracker tr("logdet_extension", tol);
    std::vector<double> admissible;
    for (double t : ctx.cfg.t_values) {
        bool ok = true;
        for (std::size_t i = 0; i < ctx.samples.size() && ok; ++i) {
            const Eigen::VectorXd gt = ctx.stencil(static_cast<int>(i)).center.gt;
            for (Eigen::Index j = 0; j < gt.size(); ++j)
                if (std::abs(gt[j] + t) < 0.25) ok = false;
        }
        if (ok) admissible.push_back(t);
    }
    for (double t : admissible) {
        for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
            const auto& st = ctx.stencil(static_cast<int>(i));
            const Eigen::MatrixXd Nt0 = node_N(st.center, t);
            const Eigen::VectorXd g0 = st.scalar_gradient([t](const Node& n) {
                const double det = node_N(n, t).determinant();
                if (std::abs(det) < 1e-10) throw SingularNt("det(N_t) vanished on the stencil");
                return std::log(std::abs(det));
            });
            const Eigen::VectorXd g1 =
                st.scalar_gradient([t](const Node& n) { return node_I(n, 1, t); });
            tr.add((Nt0.transpose() * g0 - g1).cwiseAbs().maxCoeff(), ctx.samples[i]);
        }
    }
    if (admissible.empty()) tr.note = "no t in the grid keeps det N_t bounded away from 0";
    return tr.result();
}

CheckResult check_involution(Ctx& ctx, double tol) {
    Tracker tr("involution", tol);
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const auto& st = ctx.stencil(static_cast<int>(i));
        std::array<Eigen::VectorXd, 3> g;
        for (int k = 1; k <= 3; ++k)
            g[k - 1] = st.scalar_gradient([k](const Node& n) { return node_I(n, k); });
        double worst = 0.0;
        for (int s = 1; s <= 2; ++s) {
            const Eigen::MatrixXd Ps = node_P(st.center, s);
            for (int k = 1; k <= 3; ++k)
                for (int r = k + 1; r <= 3; ++r)
                    worst = std::max(worst, std::abs(g[k - 1].dot(Ps * g[r - 1])));
        }
        tr.add(worst, ctx.samples[i]);
    }
    return tr.result();
}

CheckResult check_koszul_involution(Ctx& ctx, double tol) {
    Tracker tr("koszul_involution", tol);
    const int m = ctx.spec.m();
    // The eigenvalue one-forms get steep near level crossings; keep the points
    // well separated and use a fourth-order outer stencil.
    const FDConfig fd_outer{1e-3, FDScheme::Central4};
    const TensorField pi = ctx.model.pi_field();
    const int npts = std::min<int>(8, static_cast<int>(ctx.samples.size()));
    const int nidx = std::min(m, 3);
    for (int i = 0; i < npts; ++i) {
        const ChartPoint& p = ctx.samples[i];
        if (ctx.model.gt(p).min_gap() < 0.05) continue;
        if (m == 1) {
            // antisymmetry: {df, df} = 0
            const Eigen::VectorXd br = koszul_bracket_forms(
                pi, ctx.model.gt_gradient_field(0), ctx.model.gt_gradient_field(0), p, fd_outer);
            tr.add(br.cwiseAbs().maxCoeff(), p);
            continue;
        }
        for (int a = 0; a < nidx; ++a)
            for (int b = a + 1; b < nidx; ++b) {
                const Eigen::VectorXd br =
                    koszul_bracket_forms(pi, ctx.model.gt_gradient_field(a),
                                         ctx.model.gt_gradient_field(b), p, fd_outer);
                tr.add(br.cwiseAbs().maxCoeff(), p);
            }
    }
    return tr.result();
}

CheckResult check_double_degeneracy(Ctx& ctx, double tol) {
    Tracker tr("double_degeneracy", tol);
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const Eigen::MatrixXd N0 = node_N(ctx.stencil(static_cast<int>(i)).center);
        double violation = 0.0;
        try {
            (void)nijenhuis_spectrum(EndomorphismAtPoint{N0}, 1e-6);
        } catch (const Error&) {
            violation = 1.0;
        }
        tr.add(violation, ctx.samples[i]);
    }
    return tr.result();
}

CheckResult check_eigenvalue_equation(Ctx& ctx, double tol) {
    Tracker tr("eigenvalue_equation", tol);
    const int m = ctx.spec.m();
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const auto& st = ctx.stencil(static_cast<int>(i));
        const auto flags = ctx.model.gt(ctx.samples[i]).flattened_smooth();
        const Eigen::MatrixXd N0 = node_N(st.center);
        for (int j = 0; j < m; ++j) {
            if (!flags[j]) continue;
            const Eigen::VectorXd g = st.scalar_gradient([j](const Node& n) { return n.gt[j]; });
            tr.add((N0.transpose() * g - st.center.gt[j] * g).cwiseAbs().maxCoeff(),
                   ctx.samples[i]);
        }
    }
    return tr.result();
}

CheckResult check_vandermonde(Ctx& ctx, double tol) {
    Tracker tr("vandermonde", tol);
    double min_detB = 1e300;
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const auto gt = ctx.model.gt(ctx.samples[i]);
        // det B multiplies every pairwise gap, so the certificate needs a
        // wider berth from the degeneracy locus than one smooth eigenvalue
        if (!gt.in_smooth_locus(1e-2)) continue;
        const Eigen::VectorXd flat = gt.flattened();
        const auto dets = vandermonde_checks({flat.data(), flat.data() + flat.size()});
        min_detB = std::min(min_detB, std::abs(dets.first));
        tr.add(0.0, ctx.samples[i]);
    }
    tr.max_res = tr.count == 0 ? 1e300 : 1e-8 / min_detB;
    if (tr.count == 0) tr.note = "no smooth-locus points sampled";
    return tr.result();
}

CheckResult check_hamiltonian_forms(Ctx& ctx, double tol) {
    Tracker tr("hamiltonian_forms", tol);
    const int m = ctx.spec.m();
    const FDConfig fd_outer{1e-3, FDScheme::Central4};
    const TensorField N = ctx.model.nijenhuis_field();
    const int npts = std::min<int>(10, static_cast<int>(ctx.samples.size()));
    for (int i = 0; i < npts; ++i) {
        const ChartPoint& p = ctx.samples[i];
        if (ctx.model.gt(p).min_gap() < 0.05) continue;
        const auto flags = ctx.model.gt(p).flattened_smooth();
        for (int j = 0; j < m; ++j) {
            if (!flags[j]) continue;
            const auto res =
                hamiltonian_form_residual_form(ctx.model.gt_gradient_field(j), N, p, fd_outer);
            tr.add(std::max(res.first, res.second), p);
        }
    }
    return tr.result();
}

CheckResult check_modular_field(Ctx& ctx, double tol) {
    Tracker tr("modular_field", tol);
    // sigma_{I_1} = omega^{-1} grad Tr N. The trace is smooth across GT level
    // crossings, so a plain FD gradient keeps the nested derivative tame;
    // fourth order on both levels rides out the far-tail chart curvature.
    const FDConfig fd_inner{1e-3, FDScheme::Central4};
    const FDConfig fd_outer{1e-3, FDScheme::Central4};
    auto model = ctx.model;
    VectorField sigma = [model, fd_inner](const ChartPoint& q) -> Eigen::VectorXd {
        ScalarField trace = [&model](const ChartPoint& r) {
            const auto t = model.tensors(r);
            return (t.pi * t.omega).trace();
        };
        return model.omega(q).components.inverse() * gradient(trace, q, fd_inner);
    };
    const int npts = std::min<int>(6, static_cast<int>(ctx.samples.size()));
    for (int i = 0; i < npts; ++i) {
        const ChartPoint& p = ctx.samples[i];
        const double sigma_scale = 1.0 + sigma(p).cwiseAbs().maxCoeff();
        for (double t : ctx.cfg.t_values) {
            const auto L = lie_derivative_bivector(sigma, ctx.model.pi_t_field(t), p, fd_outer);
            // residual scaled by the local tensor norms
            const double scale =
                sigma_scale * (1.0 + ctx.model.pi_t(p, t).components.cwiseAbs().maxCoeff());
            tr.add(L.components.cwiseAbs().maxCoeff() / scale, p);
        }
    }
    return tr.result();
}

CheckResult check_spectral_shift(Ctx& ctx, double tol) {
    Tracker tr("spectral_shift", tol);
    for (std::size_t i = 0; i < ctx.samples.size(); ++i) {
        const Eigen::MatrixXd N0 = node_N(ctx.stencil(static_cast<int>(i)).center);
        const auto base = sorted_real_eigenvalues(N0);
        double worst = 0.0;
        for (double t : ctx.cfg.t_values) {
            const Eigen::MatrixXd Nt =
                N0 + t * Eigen::MatrixXd::Identity(N0.rows(), N0.cols());
            const auto shifted = sorted_real_eigenvalues(Nt);
            for (std::size_t j = 0; j < base.size(); ++j)
                worst = std::max(worst, std::abs(shifted[j] - (base[j] + t)));
        }
        tr.add(worst, ctx.samples[i]);
    }
    return tr.result();
}

// ---------------------------------------------------------------------------
// Groupoid suites.

struct GroupoidRng {
    std::mt19937_64 rng;
    explicit GroupoidRng(std::uint64_t seed) : rng(seed) {}
    double uniform() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int below(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
    bool coin() { return (rng() & 1u) != 0; }
};

// Membership-compliant random element at t; a collision block at -t is forced
// with probability 1/2 whenever -t lies inside [0, 2].
GroupoidElement random_member(GroupoidRng& rng, int m, double t, double h_max = 0.12) {
    const Polytope simplex = Polytope::simplex(m);
    const bool collide_possible = -t >= 0.0 && -t <= 2.0;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> lam(m);
        for (double& v : lam) v = rng.uniform(0.0, 2.0);
        std::sort(lam.begin(), lam.end());
        if (collide_possible && rng.coin()) {
            const int i = rng.below(m);
            const int j = std::min(m - 1, i + (m > 1 ? rng.below(2) : 0));
            for (int q = i; q <= j; ++q) lam[q] = -t;
            std::sort(lam.begin(), lam.end());
        }
        GroupoidElement g;
        g.t = t;
        g.lambda = Eigen::Map<Eigen::VectorXd>(lam.data(), m);
        g.h.resize(m);
        for (int q = 0; q < m; ++q) g.h[q] = rng.uniform(-h_max, h_max);
        const MembershipCase mcase = membership_case(t);
        if (mcase == MembershipCase::Boundary) {
            for (int q = 0; q < m; ++q)
                if (g.lambda[q] == -t) g.h[q] = 0.0;
        } else if (mcase == MembershipCase::Interior) {
            for (int q = 0; q < m;) {
                int r = q;
                while (r + 1 < m && g.lambda[r + 1] == -t && g.lambda[q] == -t) ++r;
                if (g.lambda[q] == -t)
                    for (int w = q; w <= r; ++w) g.h[w] = g.h[q];
                q = r + 1;
            }
        }
        if (simplex.contains(target_unchecked(g), 0.0)) return g;
    }
    throw NumericalDegeneracy("could not draw a valid groupoid element");
}

GroupoidElement random_member_from(GroupoidRng& rng, const Eigen::VectorXd& lambda, double t,
                                   double h_max = 0.12) {
    const int m = static_cast<int>(lambda.size());
    const Polytope simplex = Polytope::simplex(m);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        GroupoidElement g;
        g.t = t;
        g.lambda = lambda;
        g.h.resize(m);
        for (int q = 0; q < m; ++q) g.h[q] = rng.uniform(-h_max, h_max);
        const MembershipCase mcase = membership_case(t);
        if (mcase == MembershipCase::Boundary) {
            for (int q = 0; q < m; ++q)
                if (std::abs(g.lambda[q] + t) <= 1e-14) g.h[q] = 0.0;
        } else if (mcase == MembershipCase::Interior) {
            for (int q = 0; q < m;) {
                int r = q;
                while (r + 1 < m && std::abs(g.lambda[r + 1] + t) <= 1e-14 &&
                       std::abs(g.lambda[q] + t) <= 1e-14)
                    ++r;
                if (std::abs(g.lambda[q] + t) <= 1e-14)
                    for (int w = q; w <= r; ++w) g.h[w] = g.h[q];
                q = r + 1;
            }
        }
        if (simplex.contains(target_unchecked(g), 0.0)) return g;
    }
    throw NumericalDegeneracy("could not extend a groupoid chain");
}

CheckResult check_groupoid_axioms(Ctx& ctx, double tol) {
    Tracker tr("groupoid_axioms", tol);
    GroupoidRng rng(ctx.cfg.seed ^ 0xa5a5a5a5ull);
    const int m = std::max(2, std::min(ctx.spec.m(), 4));
    const int cases = std::max(100, 100 * ctx.cfg.samples);
    const std::vector<double> ts = {pair_case_t(ctx.cfg), -1.0, -2.0, 0.0};
    for (double t : ts) {
        for (int it = 0; it < cases; ++it) {
            const GroupoidElement g1 = random_member(rng, m, t);
            const GroupoidElement g2 = random_member_from(rng, target_unchecked(g1), t);
            const GroupoidElement g3 = random_member_from(rng, target_unchecked(g2), t);
            const GroupoidElement left = compose(compose(g1, g2, 1e-9), g3, 1e-9);
            const GroupoidElement right = compose(g1, compose(g2, g3, 1e-9), 1e-9);
            double dev = (left.h - right.h).cwiseAbs().maxCoeff();
            dev = std::max(dev, (left.lambda - right.lambda).cwiseAbs().maxCoeff());

            const GroupoidElement gid = compose(g1, identity_element(target_unchecked(g1), t), 1e-9);
            dev = std::max(dev, (gid.h - g1.h).cwiseAbs().maxCoeff());

            const GroupoidElement ginv = compose(g1, inverse(g1), 1e-9);
            dev = std::max(dev, ginv.h.cwiseAbs().maxCoeff());
            dev = std::max(dev, (ginv.lambda - g1.lambda).cwiseAbs().maxCoeff());
            tr.add(dev);
        }
    }
    return tr.result();
}

CheckResult check_action_law(Ctx& ctx, double tol) {
    Tracker tr("action_law", tol);
    GroupoidRng rng(ctx.cfg.seed ^ 0x5c5c5c5cull);
    const int m = std::max(2, std::min(ctx.spec.m(), 4));
    const int cases = std::max(100, 100 * ctx.cfg.samples);
    for (int it = 0; it < cases; ++it) {
        const double t = rng.uniform(-2.5, 1.5);
        Eigen::VectorXd lam(m), h1(m), h2(m);
        for (int q = 0; q < m; ++q) {
            lam[q] = rng.uniform(0.0, 2.0);
            h1[q] = rng.uniform(-0.4, 0.4);
            h2[q] = rng.uniform(-0.4, 0.4);
        }
        const Eigen::VectorXd a = act(h1 + h2, lam, t);
        const Eigen::VectorXd b = act(h1, act(h2, lam, t), t);
        tr.add((a - b).cwiseAbs().maxCoeff());
        tr.add((act(Eigen::VectorXd::Zero(m), lam, t) - lam).cwiseAbs().maxCoeff());
    }
    return tr.result();
}

CheckResult check_fixed_locus(Ctx& ctx, double tol) {
    Tracker tr("fixed_locus", tol);
    GroupoidRng rng(ctx.cfg.seed ^ 0x3c3c3c3cull);
    const int m = std::max(2, std::min(ctx.spec.m(), 4));
    const int cases = std::max(100, 10 * ctx.cfg.samples);
    for (int it = 0; it < cases; ++it) {
        const double t = rng.uniform(-2.0, 0.0);
        Eigen::VectorXd lam(m), h(m);
        for (int q = 0; q < m; ++q) {
            lam[q] = rng.coin() ? -t : rng.uniform(0.0, 2.0);
            h[q] = rng.uniform(-3.0, 3.0);
        }
        const Eigen::VectorXd out = act(h, lam, t);
        double dev = 0.0;
        for (int q = 0; q < m; ++q)
            if (lam[q] == -t) dev = std::max(dev, std::abs(out[q] + t));
        tr.add(dev);
    }
    return tr.result();
}

CheckResult check_prop4_closure(Ctx& ctx, double tol) {
    Tracker tr("prop4_closure", tol);
    GroupoidRng rng(ctx.cfg.seed ^ 0x77777777ull);
    const int m = std::max(2, std::min(ctx.spec.m(), 4));
    const int cases = std::max(100, 100 * ctx.cfg.samples);
    for (double t : {-1.0, -2.0, 0.0}) {
        for (int it = 0; it < cases; ++it) {
            const GroupoidElement g1 = random_member(rng, m, t);
            const GroupoidElement g2 = random_member_from(rng, target_unchecked(g1), t);
            double violation = 0.0;
            if (!closure_check(g1, g2, 1e-9)) violation = 1.0;
            if (!membership_cpn(inverse(g1), 1e-9)) violation = 1.0;
            tr.add(violation);
        }
    }
    return tr.result();
}

CheckResult check_cocycle_morphism(Ctx& ctx, double tol) {
    Tracker tr("cocycle_morphism", tol);
    const double t = pair_case_t(ctx.cfg);
    const Polytope polytope = ctx.spec.k == 1 ? Polytope::simplex(ctx.spec.m())
                                              : Polytope::gelfand_tsetlin(ctx.model.shape());
    const std::size_t triples = ctx.samples.size() >= 3 ? ctx.samples.size() - 2 : 0;
    for (std::size_t i = 0; i < std::min<std::size_t>(triples, 100); ++i) {
        const ChartPoint& x = ctx.samples[i];
        const ChartPoint& y = ctx.samples[i + 1];
        const ChartPoint& z = ctx.samples[i + 2];
        if (!ctx.model.gt(x).all_smooth() || !ctx.model.gt(y).all_smooth() ||
            !ctx.model.gt(z).all_smooth())
            continue;
        const GroupoidElement gxy = pair_to_element(x, y, t, ctx.model);
        const GroupoidElement gyz = pair_to_element(y, z, t, ctx.model);
        const GroupoidElement gxz = pair_to_element(x, z, t, ctx.model);
        const GroupoidElement composed = compose(gxy, gyz, 1e-6, polytope);
        const double h_dev = (composed.h - gxz.h).cwiseAbs().maxCoeff();
        const double tgt_dev =
            (target_unchecked(gxy) - ctx.model.gt(y).flattened()).cwiseAbs().maxCoeff();
        tr.add(std::max(h_dev / 1e-12, tgt_dev / 1e-8), x);
    }
    return tr.result();
}

CheckResult check_pair_surjectivity(Ctx& ctx, double tol) {
    Tracker tr("pair_surjectivity", tol);
    const double t = pair_case_t(ctx.cfg);
    const Polytope polytope = ctx.spec.k == 1 ? Polytope::simplex(ctx.spec.m())
                                              : Polytope::gelfand_tsetlin(ctx.model.shape());
    for (std::size_t i = 0; i + 1 < ctx.samples.size(); ++i) {
        const ChartPoint& x = ctx.samples[i];
        const ChartPoint& y = ctx.samples[i + 1];
        if (!ctx.model.gt(x).all_smooth() || !ctx.model.gt(y).all_smooth()) continue;
        double violation = 0.0;
        try {
            const GroupoidElement g = pair_to_element(x, y, t, ctx.model);
            const Eigen::VectorXd tgt = target(g, polytope, 1e-6).lambda;
            if ((tgt - ctx.model.gt(y).flattened()).cwiseAbs().maxCoeff() > 1e-6) violation = 1.0;
        } catch (const Error&) {
            violation = 1.0;
        }
        tr.add(violation, x);
    }
    return tr.result();
}

CheckResult check_negative_controls(Ctx& ctx, double tol) {
    Tracker tr("negative_controls", tol);
    const int d = ctx.spec.dim();
    GroupoidRng rng(ctx.cfg.seed ^ 0xdeadbeefull);

    std::vector<Eigen::MatrixXd> Pcoef(d + 1), Ncoef(d + 1);
    for (int l = 0; l <= d; ++l) {
        Eigen::MatrixXd A(d, d), B(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                A(i, j) = rng.uniform(-1.0, 1.0);
                B(i, j) = rng.uniform(-1.0, 1.0);
            }
        Pcoef[l] = 0.5 * (A - A.transpose().eval());
        Ncoef[l] = B;
    }
    TensorField Prand{TensorKind::Bivector, [Pcoef, d](const ChartPoint& q) {
                          Eigen::MatrixXd M = Pcoef[d];
                          for (int l = 0; l < d; ++l) M += q.coords[l] * Pcoef[l];
                          return M;
                      }};
    TensorField Nrand{TensorKind::Endomorphism, [Ncoef, d](const ChartPoint& q) {
                          Eigen::MatrixXd M = Ncoef[d];
                          for (int l = 0; l < d; ++l) M += q.coords[l] * Ncoef[l];
                          return M;
                      }};

    // Each control mirrors a suite check: its max residual over the sampled
    // points must sit well above the positive checks' tolerances.
    const int npts = std::min<int>(5, static_cast<int>(ctx.samples.size()));
    const double floor_res = 1e-2;
    double jacobi_max = 0.0, compat_max = 0.0, torsion_max = 0.0, eigen_max = 0.0, np_max = 0.0;
    ScalarField fake = [](const ChartPoint& q) { return q.coords[0] + 10.0; };
    for (int i = 0; i < npts; ++i) {
        const ChartPoint& p = ctx.samples[i];
        if (d > 2) {  // any bivector on a 2-dim chart is vacuously Poisson
            jacobi_max = std::max(
                jacobi_max, schouten_bivector_bivector(Prand, Prand, p, ctx.cfg.fd()).max_abs());
            compat_max = std::max(
                compat_max,
                schouten_bivector_bivector(Prand, ctx.model.omega_inv_field(), p, ctx.cfg.fd())
                    .max_abs());
        }
        torsion_max = std::max(torsion_max, nijenhuis_torsion_max(Nrand, p, ctx.cfg.fd()));
        eigen_max = std::max(
            eigen_max, check_eigen_equation(fake, ctx.model.nijenhuis_field(), p, ctx.cfg.fd()));
        np_max = std::max(np_max, check_np_symmetry(BivectorAtPoint{Prand.eval(p)},
                                                    EndomorphismAtPoint{Nrand.eval(p)}));
        tr.add(0.0, p);
    }
    double violations = 0.0;
    if (d > 2 && jacobi_max <= floor_res) violations += 1.0;
    if (d > 2 && compat_max <= floor_res) violations += 1.0;
    if (torsion_max <= floor_res) violations += 1.0;
    if (eigen_max <= floor_res) violations += 1.0;
    if (np_max <= floor_res) violations += 1.0;
    tr.max_res = violations;
    return tr.result();
}

CheckResult check_determinism(Ctx& ctx, double tol) {
    Tracker tr("determinism", tol);
    const auto s1 = sample_chart_points(ctx.spec, std::min(ctx.cfg.samples, 10), ctx.cfg.seed);
    const auto s2 = sample_chart_points(ctx.spec, std::min(ctx.cfg.samples, 10), ctx.cfg.seed);
    double violation = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i)
        if (!(s1[i].coords.array() == s2[i].coords.array()).all()) violation = 1.0;
    if (!s1.empty()) {
        const auto a = ctx.model.tensors(s1[0]);
        const auto b = ctx.model.tensors(s1[0]);
        if (!(a.pi.array() == b.pi.array()).all() ||
            !(a.omega.array() == b.omega.array()).all() || !(a.gt.array() == b.gt.array()).all())
            violation = 1.0;
    }
    tr.add(violation);
    return tr.result();
}

// ---------------------------------------------------------------------------
// Registry.

struct CheckDef {
    const char* name;
    double default_tol;
    CheckResult (*fn)(Ctx&, double);
};

const std::vector<CheckDef>& registry() {
    static const std::vector<CheckDef> defs = {
        {"spectrum_preservation", 1e-9, check_spectrum_preservation},
        {"frame_rank", 0.5, check_frame_rank},
        {"generator_roundtrip", 1e-9, check_generator_roundtrip},
        {"fd_convergence", 1.0, check_fd_convergence},
        {"calibration", 1e-6, check_calibration},
        {"kks_closedness", 1e-6, check_kks_closedness},
        {"bruhat_fixed_point", 1e-9, check_bruhat_fixed_point},
        {"spectrum_match", 1e-6, check_spectrum_match},
        {"gt_interlacing", 1e-9, check_gt_interlacing},
        {"gt_count", 0.5, check_gt_count},
        {"pencil_nondegeneracy", 0.5, check_pencil_nondegeneracy},
        {"jacobi", 1e-5, check_jacobi},
        {"compatibility", 1e-5, check_compatibility},
        {"hierarchy_compatibility", 1e-5, check_hierarchy_compatibility},
        {"torsion", 1e-6, check_torsion},
        {"np_symmetry", 1e-9, check_np_symmetry_suite},
        {"lenart", 1e-5, check_lenart},
        {"logdet_extension", 1e-5, check_logdet_extension_suite},
        {"involution", 1e-6, check_involution},
        {"koszul_involution", 1e-6, check_koszul_involution},
        {"double_degeneracy", 0.5, check_double_degeneracy},
        {"eigenvalue_equation", 1e-5, check_eigenvalue_equation},
        {"vandermonde", 1.0, check_vandermonde},
        {"hamiltonian_forms", 1e-5, check_hamiltonian_forms},
        {"modular_field", 1e-5, check_modular_field},
        {"spectral_shift", 1e-12, check_spectral_shift},
        {"groupoid_axioms", 1e-12, check_groupoid_axioms},
        {"action_law", 1e-12, check_action_law},
        {"fixed_locus", 1e-12, check_fixed_locus},
        {"prop4_closure", 0.5, check_prop4_closure},
        {"cocycle_morphism", 1.0, check_cocycle_morphism},
        {"pair_surjectivity", 0.5, check_pair_surjectivity},
        {"negative_controls", 0.5, check_negative_controls},
        {"determinism", 0.0, check_determinism},
    };
    return defs;
}

}  // namespace

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
    if (manifold != "cpn" && manifold != "grass" && manifold != "grassmannian")
        throw ConfigError("manifold must be cpn or grassmannian");
    if (manifold == "cpn" && k != 1) throw ConfigError("cpn requires k = 1");
    if (n < 2 || k < 1 || k >= n) throw ConfigError("invalid (n, k)");
    if (samples < 1) throw ConfigError("samples must be positive");
    if (!(fd_step > 0.0)) throw ConfigError("fd_step must be positive");
    for (const auto& [name, value] : tolerances) {
        if (!(value >= 0.0)) throw ConfigError("tolerance " + name + " must be non-negative");
        bool known = false;
        for (const auto& def : registry())
            if (name == def.name) known = true;
        if (!known) throw ConfigError("unknown tolerance name: " + name);
    }
    for (const auto& c : checks) {
        bool known = false;
        for (const auto& def : registry())
            if (c == def.name) known = true;
        if (!known) throw ConfigError("unknown check: " + c);
    }
    if (pin_c.has_value() != pin_kappa.has_value())
        throw ConfigError("pin both c and kappa or neither");
}

OrbitSpec RunConfig::orbit() const { return OrbitSpec{n, k, 1.0}; }

double RunConfig::tolerance(const std::string& check) const {
    auto it = tolerances.find(check);
    if (it != tolerances.end()) return it->second;
    return default_tolerance(check);
}

const std::vector<std::string>& check_registry() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& def : registry()) v.push_back(def.name);
        return v;
    }();
    return names;
}

double default_tolerance(const std::string& check) {
    for (const auto& def : registry())
        if (check == def.name) return def.default_tol;
    throw ConfigError("unknown check: " + check);
}

bool VerificationReport::all_pass() const {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

VerificationReport run_suite(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    const OrbitSpec spec = config.orbit();

    Model model = config.pin_c ? Model::pinned(spec, *config.pin_c, *config.pin_kappa, config.fd())
                               : Model::calibrated(spec, config.fd());
    double cal_distance = 0.0;
    if (!config.pin_c) {
        const auto cal_samples = sample_chart_points(spec, 24, kModelCalibrationSeed);
        cal_distance = calibrate(spec, cal_samples, config.fd()).max_distance;
    }

    Ctx ctx{config,       spec, model, sample_chart_points(spec, config.samples, config.seed),
            cal_distance, {}};
    ctx.stencil_cache.resize(ctx.samples.size());

    const std::vector<std::string> wanted =
        config.checks.empty() ? check_registry() : config.checks;

    VerificationReport report;
    report.config = config;
    report.c = model.c();
    report.kappa = model.kappa();
    report.calibration_distance = cal_distance;
    report.version = kVersion;

    for (const auto& name : wanted) {
        const CheckDef* def = nullptr;
        for (const auto& d : registry())
            if (name == d.name) def = &d;
        if (!def) throw ConfigError("unknown check: " + name);
        const double tol = config.tolerance(name);
        CheckResult cr;
        try {
            cr = def->fn(ctx, tol);
        } catch (const Error& e) {
            cr.name = name;
            cr.tolerance = tol;
            cr.max_residual = 1e300;
            cr.pass = false;
            cr.note = std::string("aborted: ") + e.what();
        }
        report.results.push_back(std::move(cr));
    }

    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

ordered_json result_to_json(const CheckResult& r) {
    ordered_json j;
    j["name"] = r.name;
    j["points_evaluated"] = r.points_evaluated;
    j["max_residual"] = r.max_residual;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    ordered_json w = ordered_json::array();
    for (const auto& v : r.witnesses)
        w.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    j["witnesses"] = w;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["manifold"] = c.manifold;
    j["n"] = c.n;
    j["k"] = c.k;
    j["t_values"] = c.t_values;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["fd_step"] = c.fd_step;
    j["fd_scheme"] = c.fd_scheme == FDScheme::Central2 ? "central-2" : "central-4";
    ordered_json tols = ordered_json::object();
    for (const auto& [name, v] : c.tolerances) tols[name] = v;
    j["tolerances"] = tols;
    j["checks"] = c.checks.empty() ? check_registry() : c.checks;
    if (c.pin_c)
        j["pinned"] = ordered_json{{"c", *c.pin_c}, {"kappa", *c.pin_kappa}};
    else
        j["pinned"] = nullptr;
    return j;
}

}  // namespace

std::string results_to_json(const std::vector<CheckResult>& results) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : results) arr.push_back(result_to_json(r));
    return arr.dump(2);
}

std::string report_to_json(const VerificationReport& report) {
    ordered_json j;
    j["config"] = config_to_json(report.config);
    j["calibration"] = ordered_json{{"c", report.c},
                                    {"kappa", report.kappa},
                                    {"max_distance", report.calibration_distance}};
    ordered_json arr = ordered_json::array();
    for (const auto& r : report.results) arr.push_back(result_to_json(r));
    j["results"] = arr;
    j["all_pass"] = report.all_pass();
    j["wall_time_ms"] = report.wall_time_ms;
    j["version"] = report.version;
    return j.dump(2);
}

std::string spectrum_dump(const RunConfig& config, const std::vector<ChartPoint>& points) {
    config.validate();
    const OrbitSpec spec = config.orbit();
    Model model = config.pin_c ? Model::pinned(spec, *config.pin_c, *config.pin_kappa, config.fd())
                               : Model::calibrated(spec, config.fd());
    const int d = spec.dim();
    const int m = spec.m();

    std::ostringstream out;
    for (int j = 0; j < d; ++j) out << "coord_" << j << ",";
    for (int j = 0; j < m; ++j) out << "gt_" << j << ",";
    for (int j = 0; j < m; ++j) out << "n_eig_" << j << ",";
    out << "match_distance,";
    for (int j = 0; j < m; ++j) out << "smooth_" << j << ",";
    out << "smooth_locus\n";

    char buf[40];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    };
    for (const auto& p : points) {
        const auto pt = model.tensors(p);
        const auto gt = model.gt(p);
        const auto nspec = nijenhuis_spectrum(EndomorphismAtPoint{pt.pi * pt.omega}, 1e-6);
        const auto rep = match_spectra(nspec, gt, 1e-6);

        std::vector<double> neig;
        for (const auto& [value, mult] : nspec)
            for (int q = 0; q < mult / 2; ++q) neig.push_back(value);
        const Eigen::VectorXd flat = gt.flattened();
        const auto flags = gt.flattened_smooth();

        for (int j = 0; j < d; ++j) {
            emit(p.coords[j]);
            out << ",";
        }
        for (int j = 0; j < m; ++j) {
            emit(flat[j]);
            out << ",";
        }
        for (int j = 0; j < m; ++j) {
            emit(j < static_cast<int>(neig.size()) ? neig[j] : std::nan(""));
            out << ",";
        }
        emit(rep.max_distance);
        out << ",";
        for (int j = 0; j < m; ++j) out << (flags[j] ? 1 : 0) << ",";
        out << (gt.in_smooth_locus() ? 1 : 0) << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Groupoid CLI surface.

namespace {

GroupoidElement element_from_json(const ordered_json& j) {
    if (!j.contains("lambda") || !j.contains("h") || !j.contains("t"))
        throw ConfigError("groupoid element needs lambda, h, t");
    const auto lam = j.at("lambda").get<std::vector<double>>();
    const auto h = j.at("h").get<std::vector<double>>();
    if (lam.size() != h.size() || lam.empty())
        throw ConfigError("lambda and h must be non-empty and equally sized");
    GroupoidElement g;
    g.lambda = Eigen::Map<const Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
    g.h = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
    g.t = j.at("t").get<double>();
    return g;
}

ordered_json element_to_json(const GroupoidElement& g) {
    ordered_json j;
    j["lambda"] = std::vector<double>(g.lambda.data(), g.lambda.data() + g.lambda.size());
    j["h"] = std::vector<double>(g.h.data(), g.h.data() + g.h.size());
    j["t"] = g.t;
    return j;
}

}  // namespace

std::string groupoid_cli(const std::string& subcommand, const std::string& args_json) {
    ordered_json args;
    try {
        args = ordered_json::parse(args_json);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad JSON: ") + e.what());
    }
    ordered_json out;
    if (subcommand == "target") {
        const GroupoidElement g = element_from_json(args);
        const Polytope polytope = Polytope::simplex(static_cast<int>(g.lambda.size()));
        const PolytopePoint r = target(g, polytope, args.value("tol", 1e-9));
        out["target"] = std::vector<double>(r.lambda.data(), r.lambda.data() + r.lambda.size());
    } else if (subcommand == "member") {
        const GroupoidElement g = element_from_json(args);
        out["member"] = membership_cpn(g, args.value("tol", 1e-9));
    } else if (subcommand == "compose") {
        if (!args.contains("g1") || !args.contains("g2"))
            throw ConfigError("compose needs g1 and g2");
        const GroupoidElement g1 = element_from_json(args.at("g1"));
        const GroupoidElement g2 = element_from_json(args.at("g2"));
        const GroupoidElement g = compose(g1, g2, args.value("tol", 1e-9));
        out["result"] = element_to_json(g);
        const Eigen::VectorXd r = target_unchecked(g);
        out["target"] = std::vector<double>(r.data(), r.data() + r.size());
    } else if (subcommand == "pair-map") {
        RunConfig cfg;
        cfg.manifold = args.value("manifold", std::string("cpn"));
        cfg.n = args.value("n", 2);
        cfg.k = args.value("k", 1);
        if (args.contains("c")) cfg.pin_c = args.at("c").get<double>();
        if (args.contains("kappa")) cfg.pin_kappa = args.at("kappa").get<double>();
        cfg.validate();
        const OrbitSpec spec = cfg.orbit();
        if (!args.contains("x") || !args.contains("y") || !args.contains("t"))
            throw ConfigError("pair-map needs x, y, t");
        const auto xv = args.at("x").get<std::vector<double>>();
        const auto yv = args.at("y").get<std::vector<double>>();
        if (static_cast<int>(xv.size()) != spec.dim() ||
            static_cast<int>(yv.size()) != spec.dim())
            throw ConfigError("x and y must have 2k(n-k) coordinates");
        ChartPoint x, y;
        x.coords = Eigen::Map<const Eigen::VectorXd>(xv.data(), spec.dim());
        y.coords = Eigen::Map<const Eigen::VectorXd>(yv.data(), spec.dim());
        const Model model = cfg.pin_c ? Model::pinned(spec, *cfg.pin_c, *cfg.pin_kappa)
                                      : Model::calibrated(spec);
        const GroupoidElement g = pair_to_element(x, y, args.at("t").get<double>(), model);
        out = element_to_json(g);
        const Eigen::VectorXd r = target_unchecked(g);
        out["target"] = std::vector<double>(r.data(), r.data() + r.size());
    } else {
        throw ConfigError("unknown groupoid subcommand: " + subcommand);
    }
    return out.dump(2);
}

}  // namespace pnkit
