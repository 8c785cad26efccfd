#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "pnkit/orbit.hpp"
#include "pnkit/tensor_calculus.hpp"

namespace pnkit {

// Concrete geometry on Gr(k,n) and CP^{n-1} = Gr(1,n) seen as adjoint U(n)
// orbits: the Kirillov-Kostant-Souriau symplectic form, the covariant Poisson
// tensor induced by the standard r-matrix, the pencil pi_t = pi + t omega^{-1},
// the recursion operator N = pi o omega, and the Gelfand-Tsetlin spectrum of
// the nested upper-left moment-map minors.

/// Generator pairs of the standard compact r-matrix,
/// r = c * sum_{i<j} A_ij ^ B_ij with A_ij = E_ij - E_ji, B_ij = i(E_ij + E_ji).
struct RMatrixSpec {
    struct Pair {
        Eigen::MatrixXcd a;
        Eigen::MatrixXcd b;
    };
    int n = 0;
    double c = 1.0;
    std::vector<Pair> pairs;

    static RMatrixSpec standard(int n, double c = 1.0);
};

/// Locations of the non-constant Gelfand-Tsetlin slots, discovered empirically
/// from a calibration sample. Level s holds the sorted eigenvalues of
/// kappa * (-i) * (upper-left s x s minor); constant slots pin 0 or the top
/// value kappa * scale.
struct GTShape {
    int n = 0;
    int k = 0;
    double top = 2.0;                        // constant ceiling, kappa * scale
    std::vector<std::vector<bool>> is_free;  // per level s = 1..n
    std::vector<std::vector<double>> const_value;  // pinned value, 0 on free slots
    int free_count() const;
};

/// Triangular array of Gelfand-Tsetlin values at a point.
struct GTSpectrum {
    std::vector<std::vector<double>> full;    // all level eigenvalues, ascending
    std::vector<std::vector<double>> values;  // non-constant entries per level
    std::vector<std::vector<bool>> smooth;    // per non-constant entry
    std::vector<std::vector<double>> gaps;    // per entry: distance to level
                                              // neighbors and to the constants

    Eigen::VectorXd flattened() const;  // level-major, ascending inside levels
    std::vector<bool> flattened_smooth() const;
    bool all_smooth() const;
    double min_gap() const;
    /// Min distance between any two non-constant values, across levels.
    double min_pair_gap() const;
    /// The working definition of the smooth locus: every value simple in its
    /// level, clear of the constants, and distinct from every other value.
    bool in_smooth_locus(double pair_tol = 1e-3) const;

    /// Max violation of the interlacing inequalities between adjacent levels
    /// and of the [0, top] bounds.
    double interlacing_violation(double top) const;
};

struct MatchReport {
    double max_distance = 0.0;
    int unmatched = 0;
};

TwoFormAtPoint kks_form(const OrbitSpec& spec, const ChartPoint& p, const TangentFrame& frame,
                        double cond_threshold = 1e10);

/// Bruhat-covariant Poisson tensor in chart components: the pushforward of the
/// Poisson-Lie tensor of U(n) along g -> g x0 g^dagger, where x0 is the
/// fixed point scale * diag(0,...,0,i,...,i),
///   pi(x) = c * ( sigma_x(Ad_g r) - sigma_x(r) ),  g x0 g^dagger = x,
/// with sigma_x(X) = [X, x] expanded in the frame basis by least squares.
/// The orientation makes the recursion-operator spectrum land in [0, 2] with
/// positive c; the tensor vanishes at x0 and equals 2 omega^{-1} at rho.
BivectorAtPoint bruhat_poisson(const OrbitSpec& spec, const RMatrixSpec& r, const ChartPoint& p,
                               const TangentFrame& frame);

BivectorAtPoint pencil_bivector(const BivectorAtPoint& pi, const TwoFormAtPoint& omega, double t);

EndomorphismAtPoint nijenhuis_operator(const BivectorAtPoint& pi, const TwoFormAtPoint& omega);

/// Upper-left s x s minor of the moment map (the point itself).
Eigen::MatrixXcd moment_minor(const EmbeddedPoint& x, int s);

GTShape discover_gt_shape(const OrbitSpec& spec, double kappa,
                          const std::vector<ChartPoint>& samples, double const_tol = 1e-7);

/// Per-level spectra of kappa * (-i) * minor with constants removed per shape.
/// smooth_tol flags entries that sit clear of the constants and of their
/// level neighbors. Throws CountMismatch when the non-constant count is off.
GTSpectrum gt_spectrum(const EmbeddedPoint& x, const OrbitSpec& spec, double kappa,
                       const GTShape& shape, double smooth_tol = 1e-3);

struct CalibrationResult {
    double c = 0.0;
    double kappa = 0.0;
    double max_distance = 0.0;
};

/// Recovers the r-matrix constant c and the GT constant kappa so that the
/// distinct Nijenhuis eigenvalues coincide with the non-constant GT values.
/// kappa is fixed first from the spectrum of rho; c by a log-grid search
/// refined by bisection. Throws CalibrationFailure when no c matches.
CalibrationResult calibrate(const OrbitSpec& spec, const std::vector<ChartPoint>& samples,
                            const FDConfig& frame_fd = {}, double tol = 1e-6);

/// Sorted pairing between distinct N-eigenvalues (multiplicity halved) and
/// non-constant GT values.
MatchReport match_spectra(const std::vector<std::pair<double, int>>& nspec,
                          const GTSpectrum& gt, double tol);

/// Calibrated model bundling the orbit, the r-matrix and the GT shape; all
/// tensor evaluations go through here. Cheap to copy.
class Model {
public:
    static Model calibrated(const OrbitSpec& spec, const FDConfig& frame_fd = {});
    static Model pinned(const OrbitSpec& spec, double c, double kappa,
                        const FDConfig& frame_fd = {});

    const OrbitSpec& spec() const;
    double c() const;
    double kappa() const;
    const GTShape& shape() const;
    const FDConfig& frame_fd() const;
    int m() const;

    /// One frame computation feeding every pointwise tensor.
    struct PointTensors {
        Eigen::MatrixXd omega;
        Eigen::MatrixXd pi;
        Eigen::VectorXd gt;
    };
    PointTensors tensors(const ChartPoint& p) const;

    TwoFormAtPoint omega(const ChartPoint& p) const;
    BivectorAtPoint omega_inv(const ChartPoint& p) const;
    BivectorAtPoint pi(const ChartPoint& p) const;
    BivectorAtPoint pi_t(const ChartPoint& p, double t) const;
    EndomorphismAtPoint nijenhuis(const ChartPoint& p, double t = 0.0) const;
    GTSpectrum gt(const ChartPoint& p) const;
    GTSpectrum gt(const EmbeddedPoint& x) const;

    TensorField omega_field() const;
    TensorField omega_inv_field() const;
    TensorField pi_field() const;
    TensorField pi_t_field(double t) const;
    TensorField nijenhuis_field(double t = 0.0) const;
    /// P_j = N^{j-1} omega^{-1}; P_1 = omega^{-1}, P_2 = pi.
    TensorField hierarchy_field(int j) const;

    /// The flat_index-th Gelfand-Tsetlin value as a scalar chart field.
    ScalarField gt_value_field(int flat_index) const;
    /// Gradient of a GT value by first-order eigenvalue perturbation of the
    /// minor along the tangent frame (no outer FD).
    CovectorField gt_gradient_field(int flat_index) const;

private:
    struct Core;
    explicit Model(std::shared_ptr<const Core> core) : core_(std::move(core)) {}
    std::shared_ptr<const Core> core_;
};

/// Deterministic Gaussian chart samples (sigma 0.7), rejection-filtered by
/// chart conditioning.
std::vector<ChartPoint> sample_chart_points(const OrbitSpec& spec, int count,
                                            std::uint64_t seed, double sigma = 0.7);

/// Seed of the internal sample behind Model::calibrated / Model::pinned.
inline constexpr std::uint64_t kModelCalibrationSeed = 0x5eedca1b;

}  // namespace pnkit
