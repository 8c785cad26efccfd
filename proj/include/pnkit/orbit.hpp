#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "pnkit/fd.hpp"

namespace pnkit {

using Complex = std::complex<double>;

/// Adjoint U(n)-orbit through rho = scale * diag(i,...,i,0,...,0) with k leading i's.
/// The orbit is Gr(k,n); its real dimension is 2*k*(n-k).
struct OrbitSpec {
    int n = 2;
    int k = 1;
    double scale = 1.0;

    int m() const { return k * (n - k); }        // complex dimension
    int dim() const { return 2 * k * (n - k); }  // real chart dimension
    void validate() const;                       // throws ConfigError
};

/// Local real coordinates on an affine chart of the orbit.
///
/// coords packs the k x (n-k) complex matrix Z row-major as (Re, Im) pairs.
/// chart_id lists the k pivotal rows of the spanning matrix; empty means the
/// standard chart {0,...,k-1}, which is centered at rho.
struct ChartPoint {
    Eigen::VectorXd coords;
    std::vector<int> chart_id;

    static ChartPoint origin(const OrbitSpec& spec);
    Complex z(const OrbitSpec& spec, int row, int col) const;
};

/// A point of the orbit as a skew-Hermitian n x n matrix.
struct EmbeddedPoint {
    Eigen::MatrixXcd matrix;
};

/// Embedding data kept around for constructions that need a unitary moving
/// the reference point to x: x = scale * i * Q Q^dagger and [Qperp | Q] is unitary.
struct EmbeddingData {
    Eigen::MatrixXcd x;
    Eigen::MatrixXcd Q;      // n x k, orthonormal span of the chart subspace
    Eigen::MatrixXcd Qperp;  // n x (n-k), orthonormal complement
};

/// Images of the chart coordinate directions under the embedding differential.
struct TangentFrame {
    std::vector<Eigen::MatrixXcd> basis;  // dim() skew-Hermitian matrices
};

using ScalarField = std::function<double(const ChartPoint&)>;

EmbeddedPoint make_rho(const OrbitSpec& spec);

/// Chart realization of the orbit: the subspace spanned by the columns of
/// W(Z), whose pivotal rows form the identity and whose remaining rows carry
/// Z^T, orthonormalized so that x = scale * i * (projector onto span W).
/// Throws NumericalDegeneracy when the orthonormalization is ill-conditioned.
EmbeddedPoint embed(const OrbitSpec& spec, const ChartPoint& p);
EmbeddingData embed_full(const OrbitSpec& spec, const ChartPoint& p);

/// FD approximation of the embedding differential. Throws RankDeficiency if
/// the frame does not have full rank 2k(n-k).
TangentFrame tangent_frame(const OrbitSpec& spec, const ChartPoint& p, const FDConfig& fd);

/// Minimum-norm least-squares solution X of [X, x] = v over u(n).
/// Throws NotTangent when the residual exceeds tol * max(1, |v|).
Eigen::MatrixXcd solve_generator(const EmbeddedPoint& x, const Eigen::MatrixXcd& v,
                                 double tol = 1e-8);

/// Batched variant: one decomposition of ad_x, many right-hand sides.
std::vector<Eigen::MatrixXcd> solve_generators(const EmbeddedPoint& x,
                                               const std::vector<Eigen::MatrixXcd>& vs,
                                               double tol = 1e-8);

/// Central-difference directional derivative of a scalar chart field.
double fd_directional(const ScalarField& f, const ChartPoint& p, int j, const FDConfig& fd);

/// One ChartPoint per CSV row, 2k(n-k) decimal columns, optional header.
std::vector<ChartPoint> read_points_csv(std::istream& in, const OrbitSpec& spec);

// Small linear-algebra helpers shared across modules.

/// Real flattening of a complex matrix: [Re(vec M); Im(vec M)].
Eigen::VectorXd real_vec(const Eigen::MatrixXcd& M);

/// Real basis of u(n): i*E_jj, then E_jk - E_kj and i*(E_jk + E_kj) for j < k.
const std::vector<Eigen::MatrixXcd>& skew_hermitian_basis(int n);

double skew_hermitian_residual(const Eigen::MatrixXcd& M);

}  // namespace pnkit
