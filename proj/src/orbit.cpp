#include "pnkit/orbit.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>

#include "pnkit/errors.hpp"

namespace pnkit {

namespace {

const Complex kI(0.0, 1.0);

std::vector<int> pivots_of(const OrbitSpec& spec, const ChartPoint& p) {
    if (p.chart_id.empty()) {
        std::vector<int> std_chart(spec.k);
        for (int j = 0; j < spec.k; ++j) std_chart[j] = j;
        return std_chart;
    }
    std::vector<int> piv = p.chart_id;
    std::sort(piv.begin(), piv.end());
    if (static_cast<int>(piv.size()) != spec.k) throw ConfigError("chart_id must list k pivotal rows");
    for (int v : piv)
        if (v < 0 || v >= spec.n) throw ConfigError("chart_id entry out of range");
    if (std::adjacent_find(piv.begin(), piv.end()) != piv.end())
        throw ConfigError("chart_id entries must be distinct");
    return piv;
}

// Spanning matrix of the chart subspace: pivotal rows = I_k, the rest = Z^T.
Eigen::MatrixXcd span_matrix(const OrbitSpec& spec, const ChartPoint& p) {
    const int n = spec.n, k = spec.k;
    if (p.coords.size() != spec.dim()) throw ConfigError("coordinate vector has wrong length");
    if (!p.coords.allFinite()) throw ConfigError("coordinate vector has non-finite entries");
    std::vector<int> piv = pivots_of(spec, p);
    std::vector<bool> is_piv(n, false);
    for (int v : piv) is_piv[v] = true;

    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n, k);
    for (int j = 0; j < k; ++j) W(piv[j], j) = 1.0;
    int r = 0;
    for (int row = 0; row < n; ++row) {
        if (is_piv[row]) continue;
        for (int j = 0; j < k; ++j) W(row, j) = p.z(spec, j, r);
        ++r;
    }
    return W;
}

}  // namespace

void OrbitSpec::validate() const {
    if (n < 2 || k <= 0 || k >= n) throw ConfigError("OrbitSpec requires 0 < k < n");
    if (!(scale > 0.0)) throw ConfigError("OrbitSpec requires scale > 0");
}

ChartPoint ChartPoint::origin(const OrbitSpec& spec) {
    return ChartPoint{Eigen::VectorXd::Zero(spec.dim()), {}};
}

Complex ChartPoint::z(const OrbitSpec& spec, int row, int col) const {
    const int idx = 2 * (row * (spec.n - spec.k) + col);
    return Complex(coords[idx], coords[idx + 1]);
}

EmbeddedPoint make_rho(const OrbitSpec& spec) {
    spec.validate();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(spec.n, spec.n);
    for (int j = 0; j < spec.k; ++j) rho(j, j) = spec.scale * kI;
    return EmbeddedPoint{rho};
}

EmbeddingData embed_full(const OrbitSpec& spec, const ChartPoint& p) {
    spec.validate();
    const int n = spec.n, k = spec.k;
    Eigen::MatrixXcd W = span_matrix(spec, p);

    // The pivotal identity block keeps sigma_min(W) >= 1, so the conditioning
    // of the representative is just its largest singular value; it blows up
    // toward the chart boundary where the projector loses relative accuracy.
    Eigen::JacobiSVD<Eigen::MatrixXcd> wsvd(W);
    if (wsvd.singularValues()(0) > 1e4)
        throw NumericalDegeneracy("chart representative is ill-conditioned (near the boundary)");

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
    Eigen::MatrixXcd Qfull = qr.householderQ();

    EmbeddingData ed;
    ed.Q = Qfull.leftCols(k);
    ed.Qperp = Qfull.rightCols(n - k);
    ed.x = spec.scale * kI * (ed.Q * ed.Q.adjoint());
    ed.x = 0.5 * (ed.x - ed.x.adjoint().eval());  // clean rounding
    return ed;
}

EmbeddedPoint embed(const OrbitSpec& spec, const ChartPoint& p) {
    return EmbeddedPoint{embed_full(spec, p).x};
}

TangentFrame tangent_frame(const OrbitSpec& spec, const ChartPoint& p, const FDConfig& fd) {
    const int d = spec.dim();
    TangentFrame frame;
    frame.basis.reserve(d);
    for (int j = 0; j < d; ++j) {
        auto f = [&](const Eigen::VectorXd& c) {
            return embed(spec, ChartPoint{c, p.chart_id}).matrix;
        };
        Eigen::MatrixXcd v = fd_partial<Eigen::MatrixXcd>(f, p.coords, j, fd);
        frame.basis.push_back(0.5 * (v - v.adjoint().eval()));
    }

    Eigen::MatrixXd F(2 * spec.n * spec.n, d);
    for (int j = 0; j < d; ++j) F.col(j) = real_vec(frame.basis[j]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(F);
    const Eigen::VectorXd sv = svd.singularValues();
    if (sv.size() < d || sv(d - 1) <= 1e-10 * sv(0))
        throw RankDeficiency("tangent frame is rank deficient");
    return frame;
}

std::vector<Eigen::MatrixXcd> solve_generators(const EmbeddedPoint& x,
                                               const std::vector<Eigen::MatrixXcd>& vs,
                                               double tol) {
    const int n = static_cast<int>(x.matrix.rows());
    const auto& basis = skew_hermitian_basis(n);
    const int nb = static_cast<int>(basis.size());

    Eigen::MatrixXd Aop(2 * n * n, nb);
    for (int e = 0; e < nb; ++e)
        Aop.col(e) = real_vec(basis[e] * x.matrix - x.matrix * basis[e]);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Aop);
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(vs.size());
    for (const auto& v : vs) {
        Eigen::VectorXd b = real_vec(v);
        Eigen::VectorXd sol = cod.solve(b);
        double residual = (Aop * sol - b).norm();
        if (residual > tol * std::max(1.0, b.norm()))
            throw NotTangent("right-hand side is not tangent to the orbit");
        Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, n);
        for (int e = 0; e < nb; ++e) X += sol[e] * basis[e];
        out.push_back(std::move(X));
    }
    return out;
}

Eigen::MatrixXcd solve_generator(const EmbeddedPoint& x, const Eigen::MatrixXcd& v, double tol) {
    return solve_generators(x, {v}, tol).front();
}

double fd_directional(const ScalarField& f, const ChartPoint& p, int j, const FDConfig& fd) {
    auto g = [&](const Eigen::VectorXd& c) { return f(ChartPoint{c, p.chart_id}); };
    return fd_partial<double>(g, p.coords, j, fd);
}

std::vector<ChartPoint> read_points_csv(std::istream& in, const OrbitSpec& spec) {
    const int d = spec.dim();
    std::vector<ChartPoint> points;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::string cleaned = line;
        std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
        std::istringstream row(cleaned);
        std::vector<std::string> tokens;
        std::string tok;
        while (row >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;

        bool numeric = true;
        std::vector<double> vals;
        for (const auto& t : tokens) {
            try {
                std::size_t pos = 0;
                vals.push_back(std::stod(t, &pos));
                if (pos != t.size()) numeric = false;
            } catch (...) {
                numeric = false;
            }
            if (!numeric) break;
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header row
            }
            throw ConfigError("non-numeric row in points CSV");
        }
        first = false;
        if (static_cast<int>(vals.size()) != d)
            throw ConfigError("points CSV row has wrong column count");
        ChartPoint p;
        p.coords = Eigen::Map<Eigen::VectorXd>(vals.data(), d);
        points.push_back(std::move(p));
    }
    return points;
}

Eigen::VectorXd real_vec(const Eigen::MatrixXcd& M) {
    const auto sz = M.size();
    Eigen::VectorXd v(2 * sz);
    Eigen::Map<const Eigen::VectorXcd> flat(M.data(), sz);
    v.head(sz) = flat.real();
    v.tail(sz) = flat.imag();
    return v;
}

const std::vector<Eigen::MatrixXcd>& skew_hermitian_basis(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<Eigen::MatrixXcd>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<Eigen::MatrixXcd> basis;
    basis.reserve(n * n);
    for (int j = 0; j < n; ++j) {
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
        D(j, j) = kI;
        basis.push_back(D);
    }
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
            A(j, k) = 1.0;
            A(k, j) = -1.0;
            basis.push_back(A);
            Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
            B(j, k) = kI;
            B(k, j) = kI;
            basis.push_back(B);
        }
    }
    return cache.emplace(n, std::move(basis)).first->second;
}

double skew_hermitian_residual(const Eigen::MatrixXcd& M) {
    return (M + M.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace pnkit
