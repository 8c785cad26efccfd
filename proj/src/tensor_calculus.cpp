#include "pnkit/tensor_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "pnkit/errors.hpp"

namespace pnkit {

namespace {

Eigen::MatrixXd eval_field(const TensorField& F, const ChartPoint& p) { return F.eval(p); }

// Partial derivatives of a matrix-valued chart field along every coordinate.
std::vector<Eigen::MatrixXd> field_partials(const TensorField& F, const ChartPoint& p,
                                            const FDConfig& fd) {
    const int d = static_cast<int>(p.coords.size());
    std::vector<Eigen::MatrixXd> dF;
    dF.reserve(d);
    auto f = [&](const Eigen::VectorXd& c) { return F.eval(ChartPoint{c, p.chart_id}); };
    for (int l = 0; l < d; ++l)
        dF.push_back(fd_partial<Eigen::MatrixXd>(f, p.coords, l, fd));
    return dF;
}

std::vector<Eigen::VectorXd> vector_field_partials(const VectorField& v, const ChartPoint& p,
                                                   const FDConfig& fd) {
    const int d = static_cast<int>(p.coords.size());
    std::vector<Eigen::VectorXd> dv;
    dv.reserve(d);
    auto f = [&](const Eigen::VectorXd& c) { return v(ChartPoint{c, p.chart_id}); };
    for (int l = 0; l < d; ++l)
        dv.push_back(fd_partial<Eigen::VectorXd>(f, p.coords, l, fd));
    return dv;
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& M, int k) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(M.rows(), M.cols());
    for (int i = 0; i < k; ++i) R = R * M;
    return R;
}

}  // namespace

double Rank3::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

double Rank3::antisymmetry_defect() const {
    double m = 0.0;
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
            for (int k = 0; k < d_; ++k) {
                const double t = (*this)(i, j, k);
                m = std::max(m, std::abs(t + (*this)(j, i, k)));
                m = std::max(m, std::abs(t + (*this)(i, k, j)));
            }
    return m;
}

double antisymmetry_residual(const Eigen::MatrixXd& M) {
    return (M + M.transpose()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd gradient(const ScalarField& f, const ChartPoint& p, const FDConfig& fd) {
    const int d = static_cast<int>(p.coords.size());
    Eigen::VectorXd g(d);
    for (int j = 0; j < d; ++j) g[j] = fd_directional(f, p, j, fd);
    return g;
}

Rank3 schouten_from_partials(const Eigen::MatrixXd& P0, const std::vector<Eigen::MatrixXd>& dP,
                             const Eigen::MatrixXd& Q0, const std::vector<Eigen::MatrixXd>& dQ) {
    const int d = static_cast<int>(P0.rows());
    Rank3 out(d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                double s = 0.0;
                for (int l = 0; l < d; ++l) {
                    s += P0(l, a) * dQ[l](b, c) + P0(l, b) * dQ[l](c, a) + P0(l, c) * dQ[l](a, b);
                    s += Q0(l, a) * dP[l](b, c) + Q0(l, b) * dP[l](c, a) + Q0(l, c) * dP[l](a, b);
                }
                out(a, b, c) = s;
            }
    return out;
}

Rank3 schouten_bivector_bivector(const TensorField& P, const TensorField& Q,
                                 const ChartPoint& p, const FDConfig& fd) {
    if (P.kind != TensorKind::Bivector || Q.kind != TensorKind::Bivector)
        throw KindMismatch("schouten bracket expects two bivector fields");
    const Eigen::MatrixXd P0 = eval_field(P, p);
    const Eigen::MatrixXd Q0 = eval_field(Q, p);
    const auto dP = field_partials(P, p, fd);
    const auto dQ = field_partials(Q, p, fd);
    return schouten_from_partials(P0, dP, Q0, dQ);
}

BivectorAtPoint lie_derivative_bivector(const VectorField& v, const TensorField& P,
                                        const ChartPoint& p, const FDConfig& fd) {
    if (P.kind != TensorKind::Bivector)
        throw KindMismatch("lie derivative expects a bivector field");
    const int d = static_cast<int>(p.coords.size());
    const Eigen::MatrixXd P0 = eval_field(P, p);
    const Eigen::VectorXd v0 = v(p);
    const auto dP = field_partials(P, p, fd);
    const auto dv = vector_field_partials(v, p, fd);

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int l = 0; l < d; ++l)
                s += v0[l] * dP[l](i, j) - P0(l, j) * dv[l][i] - P0(i, l) * dv[l][j];
            L(i, j) = s;
        }
    return BivectorAtPoint{L};
}

Eigen::VectorXd torsion_pair_from_partials(const Eigen::MatrixXd& N0,
                                           const std::vector<Eigen::MatrixXd>& dN, int a, int b) {
    const int d = static_cast<int>(N0.rows());
    Eigen::VectorXd T = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) {
            s += N0(l, a) * dN[l](i, b) - N0(l, b) * dN[l](i, a);
            s -= N0(i, l) * (dN[a](l, b) - dN[b](l, a));
        }
        T[i] = s;
    }
    return T;
}

double torsion_max_from_partials(const Eigen::MatrixXd& N0,
                                 const std::vector<Eigen::MatrixXd>& dN) {
    const int d = static_cast<int>(N0.rows());
    double m = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            m = std::max(m, torsion_pair_from_partials(N0, dN, a, b).cwiseAbs().maxCoeff());
    return m;
}

Eigen::VectorXd nijenhuis_torsion(const TensorField& N, int a, int b,
                                  const ChartPoint& p, const FDConfig& fd) {
    if (N.kind != TensorKind::Endomorphism)
        throw KindMismatch("torsion expects an endomorphism field");
    const Eigen::MatrixXd N0 = eval_field(N, p);
    const auto dN = field_partials(N, p, fd);
    return torsion_pair_from_partials(N0, dN, a, b);
}

double nijenhuis_torsion_max(const TensorField& N, const ChartPoint& p, const FDConfig& fd) {
    if (N.kind != TensorKind::Endomorphism)
        throw KindMismatch("torsion expects an endomorphism field");
    const Eigen::MatrixXd N0 = eval_field(N, p);
    const auto dN = field_partials(N, p, fd);
    return torsion_max_from_partials(N0, dN);
}

BivectorAtPoint hierarchy_bivector(const BivectorAtPoint& P, const EndomorphismAtPoint& N,
                                   int j, double tol) {
    Eigen::MatrixXd R = matrix_power(N.components, j) * P.components;
    const double defect = antisymmetry_residual(R);
    const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
    if (defect > tol * scale)
        throw AsymmetryResidual("N^j P is not antisymmetric; (P, N) incompatible");
    R = 0.5 * (R - R.transpose().eval());
    return BivectorAtPoint{R};
}

double check_np_symmetry(const BivectorAtPoint& P, const EndomorphismAtPoint& N) {
    return (N.components * P.components - P.components * N.components.transpose())
        .cwiseAbs()
        .maxCoeff();
}

double canonical_hamiltonian(const TensorField& N, int k, const ChartPoint& p) {
    if (N.kind != TensorKind::Endomorphism)
        throw KindMismatch("canonical hamiltonian expects an endomorphism field");
    return matrix_power(eval_field(N, p), k).trace() / static_cast<double>(k);
}

double check_lenart_canonical(const TensorField& N, int k, const ChartPoint& p,
                              const FDConfig& fd) {
    ScalarField Ik = [&](const ChartPoint& q) { return canonical_hamiltonian(N, k, q); };
    ScalarField Ik1 = [&](const ChartPoint& q) { return canonical_hamiltonian(N, k + 1, q); };
    const Eigen::MatrixXd N0 = eval_field(N, p);
    const Eigen::VectorXd gk = gradient(Ik, p, fd);
    const Eigen::VectorXd gk1 = gradient(Ik1, p, fd);
    return (N0.transpose() * gk - gk1).cwiseAbs().maxCoeff();
}

double check_logdet_extension(const TensorField& N, double t, const ChartPoint& p,
                              const FDConfig& fd, double det_threshold) {
    const int d = static_cast<int>(p.coords.size());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    ScalarField logdet = [&](const ChartPoint& q) {
        const Eigen::MatrixXd Nt = eval_field(N, q) + t * I;
        const double det = Nt.determinant();
        if (std::abs(det) < det_threshold)
            throw SingularNt("det(N + t) below threshold on the FD stencil");
        return std::log(std::abs(det));
    };
    ScalarField trace = [&](const ChartPoint& q) {
        return eval_field(N, q).trace() + t * d;
    };
    const Eigen::MatrixXd Nt0 = eval_field(N, p) + t * I;
    if (std::abs(Nt0.determinant()) < det_threshold)
        throw SingularNt("det(N + t) below threshold at the base point");
    const Eigen::VectorXd g0 = gradient(logdet, p, fd);
    const Eigen::VectorXd g1 = gradient(trace, p, fd);
    return (Nt0.transpose() * g0 - g1).cwiseAbs().maxCoeff();
}

Eigen::VectorXd koszul_bracket_forms(const TensorField& P, const CovectorField& df,
                                     const CovectorField& dg, const ChartPoint& p,
                                     const FDConfig& fd) {
    if (P.kind != TensorKind::Bivector)
        throw KindMismatch("koszul bracket expects a bivector field");
    const int d = static_cast<int>(p.coords.size());

    // Anchor contracts the first index, P(alpha)^i = alpha_j P^{ji}, so that
    // P(df)(g) = {f, g} and exact arguments satisfy {df, dg} = d{f, g}.
    VectorField X = [&](const ChartPoint& q) -> Eigen::VectorXd {
        return P.eval(q).transpose() * df(q);
    };
    VectorField Y = [&](const ChartPoint& q) -> Eigen::VectorXd {
        return P.eval(q).transpose() * dg(q);
    };
    ScalarField pairing = [&](const ChartPoint& q) { return df(q).dot(P.eval(q) * dg(q)); };

    const Eigen::VectorXd X0 = X(p), Y0 = Y(p);
    const Eigen::VectorXd df0 = df(p), dg0 = dg(p);
    const auto dX = vector_field_partials(X, p, fd);
    const auto dY = vector_field_partials(Y, p, fd);
    const auto dDf = vector_field_partials(df, p, fd);
    const auto dDg = vector_field_partials(dg, p, fd);
    const Eigen::VectorXd dpair = gradient(pairing, p, fd);

    Eigen::VectorXd out(d);
    for (int i = 0; i < d; ++i) {
        double lx = 0.0, ly = 0.0;
        for (int l = 0; l < d; ++l) {
            lx += X0[l] * dDg[l][i] + dg0[l] * dX[i][l];
            ly += Y0[l] * dDf[l][i] + df0[l] * dY[i][l];
        }
        out[i] = lx - ly - dpair[i];
    }
    return out;
}

CovectorField exact_form(const ScalarField& f, const FDConfig& fd) {
    return [f, fd](const ChartPoint& q) { return gradient(f, q, fd); };
}

Eigen::VectorXd koszul_bracket(const TensorField& P, const ScalarField& f, const ScalarField& g,
                               const ChartPoint& p, const FDConfig& fd) {
    return koszul_bracket_forms(P, exact_form(f, fd), exact_form(g, fd), p, fd);
}

double poisson_bracket(const BivectorAtPoint& P, const Eigen::VectorXd& df,
                       const Eigen::VectorXd& dg) {
    return df.dot(P.components * dg);
}

std::vector<std::pair<double, int>> nijenhuis_spectrum(const EndomorphismAtPoint& N, double tol) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(N.components);
    if (es.info() != Eigen::Success) throw ComplexSpectrum("eigensolver failed to converge");
    const Eigen::VectorXcd ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<double> vals;
    vals.reserve(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i].imag()) > tol * scale)
            throw ComplexSpectrum("eigenvalue has a non-real part beyond tolerance");
        vals.push_back(ev[i].real());
    }
    std::sort(vals.begin(), vals.end());

    // Agglomerative merge of eigenvalues separated by less than the relative gap.
    std::vector<std::pair<double, int>> clusters;
    std::size_t i = 0;
    while (i < vals.size()) {
        double sum = vals[i];
        int count = 1;
        std::size_t j = i + 1;
        while (j < vals.size() && vals[j] - vals[j - 1] <= tol * scale) {
            sum += vals[j];
            ++count;
            ++j;
        }
        clusters.emplace_back(sum / count, count);
        i = j;
    }
    for (const auto& [value, mult] : clusters) {
        (void)value;
        if (mult % 2 != 0)
            throw OddMultiplicity("eigenvalue cluster with odd multiplicity");
    }
    return clusters;
}

double check_eigen_equation(const ScalarField& lambda, const TensorField& N,
                            const ChartPoint& p, const FDConfig& fd) {
    const Eigen::VectorXd g = gradient(lambda, p, fd);
    const Eigen::MatrixXd N0 = eval_field(N, p);
    return (N0.transpose() * g - lambda(p) * g).cwiseAbs().maxCoeff();
}

std::pair<double, double> hamiltonian_form_residual_form(const CovectorField& dlambda,
                                                         const TensorField& N, const ChartPoint& p,
                                                         const FDConfig& fd) {
    const int d = static_cast<int>(p.coords.size());
    const auto dG = vector_field_partials(dlambda, p, fd);
    double closed = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            closed = std::max(closed, std::abs(dG[i][j] - dG[j][i]));

    CovectorField beta = [&](const ChartPoint& q) -> Eigen::VectorXd {
        return N.eval(q).transpose() * dlambda(q);
    };
    const auto dB = vector_field_partials(beta, p, fd);
    double curl = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            curl = std::max(curl, std::abs(dB[i][j] - dB[j][i]));
    return {closed, curl};
}

std::pair<double, double> hamiltonian_form_residual(const ScalarField& lambda, const TensorField& N,
                                                    const ChartPoint& p, const FDConfig& fd) {
    return hamiltonian_form_residual_form(exact_form(lambda, fd), N, p, fd);
}

std::pair<double, double> vandermonde_checks(const std::vector<double>& lambdas) {
    double detB = 1.0;
    double prod = 1.0;
    const std::size_t m = lambdas.size();
    for (std::size_t i = 0; i < m; ++i) {
        prod *= lambdas[i];
        for (std::size_t j = i + 1; j < m; ++j) detB *= lambdas[j] - lambdas[i];
    }
    return {detB, prod * detB};
}

}  // namespace pnkit
