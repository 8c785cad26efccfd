#pragma once

#include <Eigen/Dense>

namespace pnkit {

enum class FDScheme { Central2, Central4 };

/// Finite-difference configuration shared by every derivative-based operation.
struct FDConfig {
    double step = 1e-5;
    FDScheme scheme = FDScheme::Central2;
};

/// Central difference of f along coordinate j of x.
/// T must support subtraction and scaling by double (double, VectorXd, MatrixXd, ...).
template <typename T, typename F>
T fd_partial(F&& f, Eigen::VectorXd x, Eigen::Index j, const FDConfig& fd) {
    const double h = fd.step;
    const double x0 = x[j];
    auto eval = [&](double dx) -> T {
        x[j] = x0 + dx;
        T v = f(x);
        x[j] = x0;
        return v;
    };
    if (fd.scheme == FDScheme::Central2) {
        T a = eval(h);
        T b = eval(-h);
        return T((a - b) * (1.0 / (2.0 * h)));
    }
    T a = eval(h);
    T b = eval(-h);
    T c = eval(2.0 * h);
    T d = eval(-2.0 * h);
    return T((d - c + (a - b) * 8.0) * (1.0 / (12.0 * h)));
}

}  // namespace pnkit
