#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "pnkit/fd.hpp"
#include "pnkit/orbit.hpp"

namespace pnkit {

// Pointwise tensors in the chart frame. Components are real 2m x 2m matrices;
// bivectors carry contravariant indices, two-forms covariant ones, and an
// endomorphism mixes them as N^i_j = components(i, j).

struct BivectorAtPoint {
    Eigen::MatrixXd components;
};

struct TwoFormAtPoint {
    Eigen::MatrixXd components;
};

struct EndomorphismAtPoint {
    Eigen::MatrixXd components;
};

enum class TensorKind { Bivector, TwoForm, Endomorphism };

/// A tensor field over the chart: an evaluator plus its kind tag.
struct TensorField {
    TensorKind kind;
    std::function<Eigen::MatrixXd(const ChartPoint&)> eval;
};

using VectorField = std::function<Eigen::VectorXd(const ChartPoint&)>;
using CovectorField = std::function<Eigen::VectorXd(const ChartPoint&)>;

/// Totally antisymmetric rank-3 array of side d.
class Rank3 {
public:
    explicit Rank3(int d) : d_(d), a_(static_cast<std::size_t>(d) * d * d, 0.0) {}
    double& operator()(int i, int j, int k) { return a_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
    double operator()(int i, int j, int k) const { return a_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
    int dim() const { return d_; }
    double max_abs() const;
    double antisymmetry_defect() const;

private:
    int d_;
    std::vector<double> a_;
};

double antisymmetry_residual(const Eigen::MatrixXd& M);

/// FD gradient of a scalar chart field.
Eigen::VectorXd gradient(const ScalarField& f, const ChartPoint& p, const FDConfig& fd);

/// Schouten bracket of two bivector fields,
/// [P,Q]^{abc} = sum_cyc(abc) sum_l (P^{la} d_l Q^{bc} + Q^{la} d_l P^{bc}).
/// Throws KindMismatch unless both fields are bivectors.
Rank3 schouten_bivector_bivector(const TensorField& P, const TensorField& Q,
                                 const ChartPoint& p, const FDConfig& fd);

// Assemblers shared by the field-based operations and the suite driver's
// cached-stencil path; dP[l] is the partial along coordinate l.
Rank3 schouten_from_partials(const Eigen::MatrixXd& P0, const std::vector<Eigen::MatrixXd>& dP,
                             const Eigen::MatrixXd& Q0, const std::vector<Eigen::MatrixXd>& dQ);
Eigen::VectorXd torsion_pair_from_partials(const Eigen::MatrixXd& N0,
                                           const std::vector<Eigen::MatrixXd>& dN, int a, int b);
double torsion_max_from_partials(const Eigen::MatrixXd& N0,
                                 const std::vector<Eigen::MatrixXd>& dN);

/// (L_v P)^{ij} = v^l d_l P^{ij} - P^{lj} d_l v^i - P^{il} d_l v^j.
BivectorAtPoint lie_derivative_bivector(const VectorField& v, const TensorField& P,
                                        const ChartPoint& p, const FDConfig& fd);

/// Torsion vector T(N)(d_a, d_b) at p for a pair of coordinate directions.
Eigen::VectorXd nijenhuis_torsion(const TensorField& N, int a, int b,
                                  const ChartPoint& p, const FDConfig& fd);

/// Max torsion component over all coordinate pairs (one FD stencil).
double nijenhuis_torsion_max(const TensorField& N, const ChartPoint& p, const FDConfig& fd);

/// P_{j+1} = N^j P. Throws AsymmetryResidual when the result fails to be
/// antisymmetric within tol, which signals an incompatible (P, N) pair.
BivectorAtPoint hierarchy_bivector(const BivectorAtPoint& P, const EndomorphismAtPoint& N,
                                   int j, double tol = 1e-8);

/// Compatibility residual |N P - P N^T|.
double check_np_symmetry(const BivectorAtPoint& P, const EndomorphismAtPoint& N);

/// I_k = Tr N^k / k.
double canonical_hamiltonian(const TensorField& N, int k, const ChartPoint& p);

/// |N^T grad I_k - grad I_{k+1}| at p.
double check_lenart_canonical(const TensorField& N, int k, const ChartPoint& p, const FDConfig& fd);

/// |(N + t)^T grad log det(N + t) - grad I_1|. Throws SingularNt when
/// det(N + t) is below threshold anywhere on the stencil.
double check_logdet_extension(const TensorField& N, double t, const ChartPoint& p,
                              const FDConfig& fd, double det_threshold = 1e-8);

/// Koszul bracket {df, dg}_P evaluated on exact one-forms given as covector
/// fields (use exact_form() to derive one from a scalar field).
Eigen::VectorXd koszul_bracket_forms(const TensorField& P, const CovectorField& df,
                                     const CovectorField& dg, const ChartPoint& p,
                                     const FDConfig& fd);

/// Koszul bracket {df, dg}_P for scalar fields f, g (inner gradients by FD).
Eigen::VectorXd koszul_bracket(const TensorField& P, const ScalarField& f, const ScalarField& g,
                               const ChartPoint& p, const FDConfig& fd);

CovectorField exact_form(const ScalarField& f, const FDConfig& fd);

/// df^T P dg.
double poisson_bracket(const BivectorAtPoint& P, const Eigen::VectorXd& df,
                       const Eigen::VectorXd& dg);

/// Clustered spectrum of N, sorted ascending, multiplicities even.
/// Throws ComplexSpectrum / OddMultiplicity per the eigenstructure guards.
std::vector<std::pair<double, int>> nijenhuis_spectrum(const EndomorphismAtPoint& N, double tol);

/// |N^T grad lambda - lambda(p) grad lambda| with the gradient by FD.
double check_eigen_equation(const ScalarField& lambda, const TensorField& N,
                            const ChartPoint& p, const FDConfig& fd);

/// (closedness of d lambda as FD-noise baseline, curl of N^T d lambda).
std::pair<double, double> hamiltonian_form_residual(const ScalarField& lambda, const TensorField& N,
                                                    const ChartPoint& p, const FDConfig& fd);
std::pair<double, double> hamiltonian_form_residual_form(const CovectorField& dlambda,
                                                         const TensorField& N, const ChartPoint& p,
                                                         const FDConfig& fd);

/// (det B, det A) for the Vandermonde independence certificates:
/// det B = prod_{i<j}(l_j - l_i), det A = (prod_i l_i) * det B.
std::pair<double, double> vandermonde_checks(const std::vector<double>& lambdas);

}  // namespace pnkit
