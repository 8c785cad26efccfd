#include "pnkit/hermitian_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pnkit/errors.hpp"

namespace pnkit {

namespace {

const Complex kI(0.0, 1.0);

// Chart-frame coordinates of a batch of tangent matrices.
struct FrameSolver {
    Eigen::MatrixXd F;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;

    explicit FrameSolver(const TangentFrame& frame) {
        const int d = static_cast<int>(frame.basis.size());
        F.resize(2 * frame.basis[0].size(), d);
        for (int j = 0; j < d; ++j) F.col(j) = real_vec(frame.basis[j]);
        qr.compute(F);
        if (qr.rank() < d) throw FrameSolveFailure("tangent frame is rank deficient");
    }

    Eigen::VectorXd coords(const Eigen::MatrixXcd& tangent) const {
        Eigen::VectorXd b = real_vec(tangent);
        Eigen::VectorXd a = qr.solve(b);
        if ((F * a - b).norm() > 1e-6 * std::max(1.0, b.norm()))
            throw FrameSolveFailure("tangent vector outside the frame span");
        return a;
    }
};

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    return A * B - B * A;
}

double trace_pairing(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v) {
    return -(u * v).trace().real();
}

std::vector<double> level_eigenvalues(const EmbeddedPoint& x, int s, double kappa) {
    const Eigen::MatrixXcd H = kappa * (-kI) * moment_minor(x, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success) throw NumericalDegeneracy("minor eigensolver failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

RMatrixSpec RMatrixSpec::standard(int n, double c) {
    RMatrixSpec r;
    r.n = n;
    r.c = c;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
            A(i, j) = 1.0;
            A(j, i) = -1.0;
            Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
            B(i, j) = kI;
            B(j, i) = kI;
            r.pairs.push_back({std::move(A), std::move(B)});
        }
    }
    return r;
}

int GTShape::free_count() const {
    int c = 0;
    for (const auto& lvl : is_free)
        for (bool f : lvl) c += f ? 1 : 0;
    return c;
}

Eigen::VectorXd GTSpectrum::flattened() const {
    std::vector<double> flat;
    for (const auto& lvl : values) flat.insert(flat.end(), lvl.begin(), lvl.end());
    return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

std::vector<bool> GTSpectrum::flattened_smooth() const {
    std::vector<bool> flat;
    for (const auto& lvl : smooth) flat.insert(flat.end(), lvl.begin(), lvl.end());
    return flat;
}

bool GTSpectrum::all_smooth() const {
    for (const auto& lvl : smooth)
        for (bool f : lvl)
            if (!f) return false;
    return true;
}

double GTSpectrum::min_gap() const {
    double g = 1e300;
    for (const auto& lvl : gaps)
        for (double v : lvl) g = std::min(g, v);
    return g;
}

double GTSpectrum::min_pair_gap() const {
    const Eigen::VectorXd flat = flattened();
    double g = 1e300;
    for (Eigen::Index i = 0; i < flat.size(); ++i)
        for (Eigen::Index j = i + 1; j < flat.size(); ++j)
            g = std::min(g, std::abs(flat[i] - flat[j]));
    return g;
}

bool GTSpectrum::in_smooth_locus(double pair_tol) const {
    return all_smooth() && min_pair_gap() > pair_tol;
}

double GTSpectrum::interlacing_violation(double top) const {
    double v = 0.0;
    for (const auto& lvl : full) {
        for (double x : lvl) {
            v = std::max(v, -x);
            v = std::max(v, x - top);
        }
    }
    for (std::size_t s = 0; s + 1 < full.size(); ++s) {
        const auto& a = full[s];      // level s+1, size s+1
        const auto& b = full[s + 1];  // level s+2, size s+2
        for (std::size_t i = 0; i < a.size(); ++i) {
            v = std::max(v, b[i] - a[i]);
            v = std::max(v, a[i] - b[i + 1]);
        }
    }
    return v;
}

TwoFormAtPoint kks_form(const OrbitSpec& spec, const ChartPoint& p, const TangentFrame& frame,
                        double cond_threshold) {
    const int d = spec.dim();
    const EmbeddedPoint x = embed(spec, p);
    const auto gen = solve_generators(EmbeddedPoint{x.matrix}, frame.basis);

    Eigen::MatrixXd w(d, d);
    for (int a = 0; a < d; ++a) {
        w(a, a) = 0.0;
        for (int b = a + 1; b < d; ++b) {
            const double val = trace_pairing(x.matrix, commutator(gen[a], gen[b]));
            w(a, b) = val;
            w(b, a) = -val;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    const Eigen::VectorXd sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > cond_threshold)
        throw DegenerateForm("KKS form is numerically degenerate at this point");
    return TwoFormAtPoint{w};
}

BivectorAtPoint bruhat_poisson(const OrbitSpec& spec, const RMatrixSpec& r, const ChartPoint& p,
                               const TangentFrame& frame) {
    const int d = spec.dim();
    const EmbeddingData ed = embed_full(spec, p);
    const int n = spec.n;

    Eigen::MatrixXcd g(n, n);
    g.leftCols(n - spec.k) = ed.Qperp;
    g.rightCols(spec.k) = ed.Q;

    FrameSolver solver(frame);
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(d, d);
    for (const auto& pair : r.pairs) {
        const Eigen::MatrixXcd Ad_a = g * pair.a * g.adjoint();
        const Eigen::MatrixXcd Ad_b = g * pair.b * g.adjoint();
        const Eigen::VectorXd a0 = solver.coords(commutator(pair.a, ed.x));
        const Eigen::VectorXd b0 = solver.coords(commutator(pair.b, ed.x));
        const Eigen::VectorXd a1 = solver.coords(commutator(Ad_a, ed.x));
        const Eigen::VectorXd b1 = solver.coords(commutator(Ad_b, ed.x));
        pi += a1 * b1.transpose() - b1 * a1.transpose();
        pi -= a0 * b0.transpose() - b0 * a0.transpose();
    }
    pi *= r.c;
    pi = 0.5 * (pi - pi.transpose().eval());
    return BivectorAtPoint{pi};
}

BivectorAtPoint pencil_bivector(const BivectorAtPoint& pi, const TwoFormAtPoint& omega, double t) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(omega.components);
    const Eigen::VectorXd sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0))
        throw DegenerateForm("two-form is not invertible");
    Eigen::MatrixXd result = pi.components + t * omega.components.inverse();
    result = 0.5 * (result - result.transpose().eval());
    return BivectorAtPoint{result};
}

EndomorphismAtPoint nijenhuis_operator(const BivectorAtPoint& pi, const TwoFormAtPoint& omega) {
    return EndomorphismAtPoint{pi.components * omega.components};
}

Eigen::MatrixXcd moment_minor(const EmbeddedPoint& x, int s) {
    if (s < 1 || s > x.matrix.rows()) throw ConfigError("minor size out of range");
    return x.matrix.topLeftCorner(s, s);
}

GTShape discover_gt_shape(const OrbitSpec& spec, double kappa,
                          const std::vector<ChartPoint>& samples, double const_tol) {
    spec.validate();
    if (samples.empty()) throw ConfigError("shape discovery needs samples");
    const double top = kappa * spec.scale;

    GTShape shape;
    shape.n = spec.n;
    shape.k = spec.k;
    shape.top = top;
    shape.is_free.resize(spec.n);

    std::vector<std::vector<double>> lo(spec.n), hi(spec.n);
    for (const auto& p : samples) {
        const EmbeddedPoint x = embed(spec, p);
        for (int s = 1; s <= spec.n; ++s) {
            const auto ev = level_eigenvalues(x, s, kappa);
            auto& l = lo[s - 1];
            auto& h = hi[s - 1];
            if (l.empty()) {
                l = ev;
                h = ev;
            } else {
                for (int i = 0; i < s; ++i) {
                    l[i] = std::min(l[i], ev[i]);
                    h[i] = std::max(h[i], ev[i]);
                }
            }
        }
    }
    shape.const_value.resize(spec.n);
    for (int s = 1; s <= spec.n; ++s) {
        shape.is_free[s - 1].resize(s);
        shape.const_value[s - 1].assign(s, 0.0);
        for (int i = 0; i < s; ++i) {
            const double range = hi[s - 1][i] - lo[s - 1][i];
            const double mid = 0.5 * (hi[s - 1][i] + lo[s - 1][i]);
            const bool pinned =
                range < const_tol && (std::abs(mid) < 1e-6 || std::abs(mid - top) < 1e-6);
            shape.is_free[s - 1][i] = !pinned;
            if (pinned) shape.const_value[s - 1][i] = std::abs(mid) < 1e-6 ? 0.0 : top;
        }
    }
    if (shape.free_count() != spec.m())
        throw CountMismatch("non-constant GT count differs from k(n-k)");
    return shape;
}

GTSpectrum gt_spectrum(const EmbeddedPoint& x, const OrbitSpec& spec, double kappa,
                       const GTShape& shape, double smooth_tol) {
    GTSpectrum out;
    out.full.resize(spec.n);
    out.values.resize(spec.n);
    out.smooth.resize(spec.n);
    out.gaps.resize(spec.n);
    const double top = shape.top;

    int free_total = 0;
    for (int s = 1; s <= spec.n; ++s) {
        const auto ev = level_eigenvalues(x, s, kappa);
        out.full[s - 1] = ev;
        for (int i = 0; i < s; ++i) {
            if (!shape.is_free[s - 1][i]) {
                if (std::abs(ev[i] - shape.const_value[s - 1][i]) > 1e-7)
                    throw CountMismatch("constant GT slot moved away from its pinned value");
                continue;
            }
            ++free_total;
            double gap = std::min(std::abs(ev[i]), std::abs(ev[i] - top));
            for (int j = 0; j < s; ++j)
                if (j != i) gap = std::min(gap, std::abs(ev[i] - ev[j]));
            out.values[s - 1].push_back(ev[i]);
            out.smooth[s - 1].push_back(gap > smooth_tol);
            out.gaps[s - 1].push_back(gap);
        }
    }
    if (free_total != spec.m())
        throw CountMismatch("non-constant GT count differs from k(n-k)");
    return out;
}

MatchReport match_spectra(const std::vector<std::pair<double, int>>& nspec,
                          const GTSpectrum& gt, double tol) {
    std::vector<double> nvals;
    for (const auto& [value, mult] : nspec)
        for (int i = 0; i < mult / 2; ++i) nvals.push_back(value);
    std::sort(nvals.begin(), nvals.end());

    const Eigen::VectorXd flat = gt.flattened();
    std::vector<double> gvals(flat.data(), flat.data() + flat.size());
    std::sort(gvals.begin(), gvals.end());

    MatchReport report;
    const std::size_t paired = std::min(nvals.size(), gvals.size());
    report.unmatched = static_cast<int>(std::max(nvals.size(), gvals.size()) - paired);
    for (std::size_t i = 0; i < paired; ++i)
        report.max_distance = std::max(report.max_distance, std::abs(nvals[i] - gvals[i]));
    (void)tol;
    return report;
}

// ---------------------------------------------------------------------------
// Model

struct Model::Core {
    OrbitSpec spec;
    FDConfig frame_fd;
    RMatrixSpec r;
    double kappa = 2.0;
    GTShape shape;
    // flat GT index -> (level, position among that level's free slots, full slot)
    struct FlatSlot {
        int level;
        int free_pos;
        int full_slot;
    };
    std::vector<FlatSlot> flat_slots;

    TangentFrame frame(const ChartPoint& p) const { return tangent_frame(spec, p, frame_fd); }

    static std::shared_ptr<Core> make(const OrbitSpec& spec, double c, double kappa,
                                      const GTShape& shape, const FDConfig& frame_fd) {
        auto core = std::make_shared<Core>();
        core->spec = spec;
        core->frame_fd = frame_fd;
        core->r = RMatrixSpec::standard(spec.n, c);
        core->kappa = kappa;
        core->shape = shape;
        for (int s = 0; s < shape.n; ++s) {
            int free_pos = 0;
            for (int i = 0; i < s + 1; ++i) {
                if (shape.is_free[s][i]) {
                    core->flat_slots.push_back({s, free_pos, i});
                    ++free_pos;
                }
            }
        }
        return core;
    }
};


CalibrationResult calibrate(const OrbitSpec& spec, const std::vector<ChartPoint>& samples,
                            const FDConfig& frame_fd, double tol) {
    spec.validate();
    if (samples.size() < 10) throw ConfigError("calibration needs at least 10 samples");
    const double kappa = 2.0 / spec.scale;
    const GTShape shape = discover_gt_shape(spec, kappa, samples);

    // Eigenvalues of the c = 1 recursion operator and doubled GT values; the
    // former scale linearly in c, so the matching objective is convex in c.
    const RMatrixSpec r1 = RMatrixSpec::standard(spec.n, 1.0);
    std::vector<std::vector<double>> nvals, gvals;
    for (const auto& p : samples) {
        const TangentFrame frame = tangent_frame(spec, p, frame_fd);
        const TwoFormAtPoint w = kks_form(spec, p, frame);
        const BivectorAtPoint pi = bruhat_poisson(spec, r1, p, frame);
        const EndomorphismAtPoint N = nijenhuis_operator(pi, w);

        Eigen::EigenSolver<Eigen::MatrixXd> es(N.components);
        if (es.info() != Eigen::Success) throw CalibrationFailure("eigensolver failed");
        const Eigen::VectorXcd ev = es.eigenvalues();
        std::vector<double> nv;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev[i].imag()) > 1e-6 * std::max(1.0, ev.cwiseAbs().maxCoeff()))
                throw CalibrationFailure("recursion operator has a non-real spectrum");
            nv.push_back(ev[i].real());
        }
        std::sort(nv.begin(), nv.end());

        const GTSpectrum gt = gt_spectrum(embed(spec, p), spec, kappa, shape);
        const Eigen::VectorXd flat = gt.flattened();
        std::vector<double> gv;
        for (Eigen::Index i = 0; i < flat.size(); ++i) {
            gv.push_back(flat[i]);
            gv.push_back(flat[i]);
        }
        std::sort(gv.begin(), gv.end());
        if (gv.size() != nv.size()) throw CalibrationFailure("eigenvalue count mismatch");
        nvals.push_back(std::move(nv));
        gvals.push_back(std::move(gv));
    }

    auto objective = [&](double c) {
        double worst = 0.0;
        for (std::size_t s = 0; s < nvals.size(); ++s) {
            std::vector<double> scaled = nvals[s];
            for (double& v : scaled) v *= c;
            if (c < 0.0) std::reverse(scaled.begin(), scaled.end());
            for (std::size_t i = 0; i < scaled.size(); ++i)
                worst = std::max(worst, std::abs(scaled[i] - gvals[s][i]));
        }
        return worst;
    };

    double best_c = 1.0;
    double best = objective(1.0);
    for (int g = -60; g <= 60; ++g) {
        const double c = std::pow(10.0, g / 20.0);
        const double val = objective(c);
        if (val < best) {
            best = val;
            best_c = c;
        }
    }
    // Ternary refinement; the objective is convex in c.
    double lo = best_c * std::pow(10.0, -0.1);
    double hi = best_c * std::pow(10.0, 0.1);
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (objective(m1) <= objective(m2))
            hi = m2;
        else
            lo = m1;
    }
    best_c = 0.5 * (lo + hi);
    best = objective(best_c);
    if (best > tol)
        throw CalibrationFailure("no r-matrix constant matches the GT spectrum");
    return CalibrationResult{best_c, kappa, best};
}

Model Model::calibrated(const OrbitSpec& spec, const FDConfig& frame_fd) {
    const auto samples = sample_chart_points(spec, 24, kModelCalibrationSeed);
    const CalibrationResult cal = calibrate(spec, samples, frame_fd);
    const GTShape shape = discover_gt_shape(spec, cal.kappa, samples);
    return Model(Core::make(spec, cal.c, cal.kappa, shape, frame_fd));
}

Model Model::pinned(const OrbitSpec& spec, double c, double kappa, const FDConfig& frame_fd) {
    spec.validate();
    const auto samples = sample_chart_points(spec, 24, kModelCalibrationSeed);
    const GTShape shape = discover_gt_shape(spec, kappa, samples);
    return Model(Core::make(spec, c, kappa, shape, frame_fd));
}

const OrbitSpec& Model::spec() const { return core_->spec; }
double Model::c() const { return core_->r.c; }
double Model::kappa() const { return core_->kappa; }
const GTShape& Model::shape() const { return core_->shape; }
const FDConfig& Model::frame_fd() const { return core_->frame_fd; }
int Model::m() const { return core_->spec.m(); }

Model::PointTensors Model::tensors(const ChartPoint& p) const {
    const TangentFrame frame = core_->frame(p);
    PointTensors pt;
    pt.omega = kks_form(core_->spec, p, frame).components;
    pt.pi = bruhat_poisson(core_->spec, core_->r, p, frame).components;
    pt.gt = gt(p).flattened();
    return pt;
}

TwoFormAtPoint Model::omega(const ChartPoint& p) const {
    return kks_form(core_->spec, p, core_->frame(p));
}

BivectorAtPoint Model::omega_inv(const ChartPoint& p) const {
    return BivectorAtPoint{omega(p).components.inverse()};
}

BivectorAtPoint Model::pi(const ChartPoint& p) const {
    return bruhat_poisson(core_->spec, core_->r, p, core_->frame(p));
}

BivectorAtPoint Model::pi_t(const ChartPoint& p, double t) const {
    const TangentFrame frame = core_->frame(p);
    const TwoFormAtPoint w = kks_form(core_->spec, p, frame);
    const BivectorAtPoint b = bruhat_poisson(core_->spec, core_->r, p, frame);
    return pencil_bivector(b, w, t);
}

EndomorphismAtPoint Model::nijenhuis(const ChartPoint& p, double t) const {
    const TangentFrame frame = core_->frame(p);
    const TwoFormAtPoint w = kks_form(core_->spec, p, frame);
    const BivectorAtPoint b = bruhat_poisson(core_->spec, core_->r, p, frame);
    Eigen::MatrixXd N = b.components * w.components;
    if (t != 0.0) N += t * Eigen::MatrixXd::Identity(N.rows(), N.cols());
    return EndomorphismAtPoint{N};
}

GTSpectrum Model::gt(const ChartPoint& p) const { return gt(embed(core_->spec, p)); }

GTSpectrum Model::gt(const EmbeddedPoint& x) const {
    return gt_spectrum(x, core_->spec, core_->kappa, core_->shape);
}

TensorField Model::omega_field() const {
    auto core = core_;
    return TensorField{TensorKind::TwoForm, [core](const ChartPoint& p) {
                           return kks_form(core->spec, p, core->frame(p)).components;
                       }};
}

TensorField Model::omega_inv_field() const {
    auto core = core_;
    return TensorField{TensorKind::Bivector, [core](const ChartPoint& p) -> Eigen::MatrixXd {
                           return kks_form(core->spec, p, core->frame(p)).components.inverse();
                       }};
}

TensorField Model::pi_field() const {
    auto core = core_;
    return TensorField{TensorKind::Bivector, [core](const ChartPoint& p) {
                           return bruhat_poisson(core->spec, core->r, p, core->frame(p)).components;
                       }};
}

TensorField Model::pi_t_field(double t) const {
    auto core = core_;
    return TensorField{TensorKind::Bivector, [core, t](const ChartPoint& p) {
                           const TangentFrame frame = core->frame(p);
                           const TwoFormAtPoint w = kks_form(core->spec, p, frame);
                           const BivectorAtPoint b = bruhat_poisson(core->spec, core->r, p, frame);
                           return pencil_bivector(b, w, t).components;
                       }};
}

TensorField Model::nijenhuis_field(double t) const {
    auto core = core_;
    return TensorField{TensorKind::Endomorphism, [core, t](const ChartPoint& p) -> Eigen::MatrixXd {
                           const TangentFrame frame = core->frame(p);
                           const TwoFormAtPoint w = kks_form(core->spec, p, frame);
                           const BivectorAtPoint b =
                               bruhat_poisson(core->spec, core->r, p, frame);
                           Eigen::MatrixXd N = b.components * w.components;
                           if (t != 0.0)
                               N += t * Eigen::MatrixXd::Identity(N.rows(), N.cols());
                           return N;
                       }};
}

TensorField Model::hierarchy_field(int j) const {
    if (j < 1) throw ConfigError("hierarchy index starts at 1");
    auto core = core_;
    return TensorField{TensorKind::Bivector, [core, j](const ChartPoint& p) -> Eigen::MatrixXd {
                           const TangentFrame frame = core->frame(p);
                           const TwoFormAtPoint w = kks_form(core->spec, p, frame);
                           const BivectorAtPoint b =
                               bruhat_poisson(core->spec, core->r, p, frame);
                           const Eigen::MatrixXd N = b.components * w.components;
                           Eigen::MatrixXd P = w.components.inverse();
                           for (int i = 1; i < j; ++i) P = N * P;
                           P = 0.5 * (P - P.transpose().eval());
                           return P;
                       }};
}

ScalarField Model::gt_value_field(int flat_index) const {
    auto core = core_;
    if (flat_index < 0 || flat_index >= static_cast<int>(core->flat_slots.size()))
        throw ConfigError("GT index out of range");
    const auto slot = core->flat_slots[flat_index];
    return [core, slot](const ChartPoint& p) {
        const EmbeddedPoint x = embed(core->spec, p);
        const auto ev = level_eigenvalues(x, slot.level + 1, core->kappa);
        return ev[slot.full_slot];
    };
}

CovectorField Model::gt_gradient_field(int flat_index) const {
    auto core = core_;
    if (flat_index < 0 || flat_index >= static_cast<int>(core->flat_slots.size()))
        throw ConfigError("GT index out of range");
    const auto slot = core->flat_slots[flat_index];
    const int s = slot.level + 1;
    return [core, slot, s](const ChartPoint& p) -> Eigen::VectorXd {
        const EmbeddedPoint x = embed(core->spec, p);
        const TangentFrame frame = core->frame(p);
        const Eigen::MatrixXcd H = core->kappa * (-kI) * moment_minor(x, s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        const Eigen::VectorXcd q = es.eigenvectors().col(slot.full_slot);
        const int d = core->spec.dim();
        Eigen::VectorXd g(d);
        for (int a = 0; a < d; ++a) {
            const Eigen::MatrixXcd dH =
                core->kappa * (-kI) * frame.basis[a].topLeftCorner(s, s);
            g[a] = (q.adjoint() * dH * q)(0, 0).real();
        }
        return g;
    };
}

std::vector<ChartPoint> sample_chart_points(const OrbitSpec& spec, int count,
                                            std::uint64_t seed, double sigma) {
    spec.validate();
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    bool have_spare = false;
    double spare = 0.0;
    auto gauss = [&]() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare = mag * std::sin(2.0 * M_PI * u2);
        have_spare = true;
        return mag * std::cos(2.0 * M_PI * u2);
    };

    const int d = spec.dim();
    std::vector<ChartPoint> points;
    points.reserve(count);
    int guard = 0;
    while (static_cast<int>(points.size()) < count) {
        if (++guard > 100 * count + 1000)
            throw NumericalDegeneracy("chart sampling rejection loop stalled");
        ChartPoint p;
        p.coords = Eigen::VectorXd(d);
        for (int j = 0; j < d; ++j) p.coords[j] = sigma * gauss();
        try {
            (void)embed_full(spec, p);
        } catch (const NumericalDegeneracy&) {
            continue;
        }
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace pnkit
