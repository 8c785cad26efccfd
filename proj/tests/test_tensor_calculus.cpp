#include <doctest.h>

#include <cmath>

#include "pnkit/errors.hpp"
#include "pnkit/hermitian_model.hpp"
#include "pnkit/tensor_calculus.hpp"
#include "test_support.hpp"

using namespace pnkit;
using pnkit::testing::cp1_model;
using pnkit::testing::cp1_point;
using pnkit::testing::cp2_model;

namespace {

const FDConfig kFd{1e-5, FDScheme::Central2};

TensorField constant_bivector(const Eigen::MatrixXd& M) {
    return TensorField{TensorKind::Bivector, [M](const ChartPoint&) { return M; }};
}

// P(u) = A0 + sum_l u_l A_l with fixed antisymmetric coefficients.
struct LinearBivector {
    std::vector<Eigen::MatrixXd> coef;  // coef[d] is the constant term
    int d;

    explicit LinearBivector(int dim, unsigned salt) : d(dim) {
        coef.resize(d + 1);
        unsigned state = salt;
        auto next = [&state]() {
            state = state * 1664525u + 1013904223u;
            return static_cast<double>(state >> 8) / static_cast<double>(1u << 24) - 0.5;
        };
        for (int l = 0; l <= d; ++l) {
            Eigen::MatrixXd A(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) A(i, j) = next();
            coef[l] = A - A.transpose().eval();
        }
    }

    TensorField field() const {
        auto c = coef;
        int dim = d;
        return TensorField{TensorKind::Bivector, [c, dim](const ChartPoint& q) {
                               Eigen::MatrixXd M = c[dim];
                               for (int l = 0; l < dim; ++l) M += q.coords[l] * c[l];
                               return M;
                           }};
    }

    // [P,P]^{abc} with the exact derivative dP/du_l = coef[l].
    Rank3 exact_self_bracket(const Eigen::VectorXd& u) const {
        Eigen::MatrixXd P0 = coef[d];
        for (int l = 0; l < d; ++l) P0 += u[l] * coef[l];
        Rank3 out(d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c) {
                    double s = 0.0;
                    for (int l = 0; l < d; ++l)
                        s += 2.0 * (P0(l, a) * coef[l](b, c) + P0(l, b) * coef[l](c, a) +
                                    P0(l, c) * coef[l](a, b));
                    out(a, b, c) = s;
                }
        return out;
    }
};

ChartPoint point4(double a, double b, double c, double d) {
    ChartPoint p;
    p.coords = Eigen::Vector4d(a, b, c, d);
    return p;
}

}  // namespace

TEST_CASE("schouten bracket basics") {
    const ChartPoint p = point4(0.2, -0.1, 0.4, 0.05);

    SUBCASE("constant fields have a vanishing bracket") {
        Eigen::MatrixXd J(4, 4);
        J << 0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0;
        const auto P = constant_bivector(J);
        CHECK(schouten_bivector_bivector(P, P, p, kFd).max_abs() < 1e-12);
    }

    SUBCASE("linear field matches the hand-differentiated formula") {
        const LinearBivector lin(4, 77u);
        const auto fd_val = schouten_bivector_bivector(lin.field(), lin.field(), p, kFd);
        const auto exact = lin.exact_self_bracket(p.coords);
        double dev = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    dev = std::max(dev, std::abs(fd_val(a, b, c) - exact(a, b, c)));
        CHECK(dev < 1e-8);
        CHECK(fd_val.antisymmetry_defect() < 1e-8);
    }

    SUBCASE("kind mismatch is rejected") {
        TensorField N{TensorKind::Endomorphism,
                      [](const ChartPoint&) { return Eigen::MatrixXd::Identity(4, 4); }};
        const auto P = constant_bivector(Eigen::MatrixXd::Zero(4, 4));
        CHECK_THROWS_AS(schouten_bivector_bivector(P, N, p, kFd), KindMismatch);
    }
}

TEST_CASE("lie derivative of a bivector") {
    const ChartPoint p = point4(0.1, 0.3, -0.2, 0.15);
    Eigen::MatrixXd J(4, 4);
    J << 0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0;
    const auto P = constant_bivector(J);

    SUBCASE("zero and constant fields") {
        VectorField zero = [](const ChartPoint&) { return Eigen::VectorXd::Zero(4); };
        CHECK(lie_derivative_bivector(zero, P, p, kFd).components.cwiseAbs().maxCoeff() < 1e-12);
        VectorField cst = [](const ChartPoint&) { return Eigen::Vector4d(1, 2, 3, 4).eval(); };
        CHECK(lie_derivative_bivector(cst, P, p, kFd).components.cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("hamiltonian flow preserves the constant symplectic bivector") {
        // H = 0.5 u^T Q u, v = J^{-1}... with P = J the flow of v = P dH
        Eigen::MatrixXd Q(4, 4);
        Q << 2, 0.3, 0, 0.1, 0.3, 1, 0.2, 0, 0, 0.2, 1.5, 0, 0.1, 0, 0, 0.8;
        VectorField v = [J, Q](const ChartPoint& q) -> Eigen::VectorXd {
            return J * (Q * q.coords);
        };
        CHECK(lie_derivative_bivector(v, P, p, kFd).components.cwiseAbs().maxCoeff() < 1e-7);
    }

    SUBCASE("generic linear field does not preserve it") {
        VectorField v = [](const ChartPoint& q) -> Eigen::VectorXd {
            Eigen::Vector4d out(q.coords[0], 0.0, 0.0, 0.0);
            return out;
        };
        CHECK(lie_derivative_bivector(v, P, p, kFd).components.cwiseAbs().maxCoeff() > 1e-2);
    }
}

TEST_CASE("nijenhuis torsion") {
    const ChartPoint p = point4(0.3, -0.25, 0.1, 0.2);

    SUBCASE("identity and scalar multiples are torsion free") {
        TensorField id{TensorKind::Endomorphism,
                       [](const ChartPoint&) { return Eigen::MatrixXd::Identity(4, 4); }};
        CHECK(nijenhuis_torsion(id, 0, 1, p, kFd).cwiseAbs().maxCoeff() < 1e-12);
        TensorField cid{TensorKind::Endomorphism, [](const ChartPoint&) {
                            return (2.5 * Eigen::MatrixXd::Identity(4, 4)).eval();
                        }};
        CHECK(nijenhuis_torsion_max(cid, p, kFd) < 1e-12);
    }

    SUBCASE("the model recursion operator is torsion free") {
        const Model& model = cp2_model();
        for (const auto& q : sample_chart_points(model.spec(), 6, 17))
            CHECK(nijenhuis_torsion_max(model.nijenhuis_field(), q, kFd) < 1e-6);
    }

    SUBCASE("a random endomorphism field is not") {
        const LinearBivector lin(4, 5u);  // reuse the generator, symmetry unused
        TensorField N{TensorKind::Endomorphism, [&](const ChartPoint& q) {
                          Eigen::MatrixXd M = lin.coef[4];
                          for (int l = 0; l < 4; ++l) M += q.coords[l] * lin.coef[l];
                          M(0, 1) += 1.0;  // break antisymmetry, irrelevant for torsion
                          return M;
                      }};
        CHECK(nijenhuis_torsion_max(N, p, kFd) > 1e-2);
    }
}

TEST_CASE("hierarchy bivector") {
    Eigen::MatrixXd P(4, 4);
    P << 0, 1, 0.5, 0, -1, 0, 0, 0.25, -0.5, 0, 0, 1, 0, -0.25, -1, 0;

    SUBCASE("power zero returns the input") {
        const auto R = hierarchy_bivector(BivectorAtPoint{P},
                                          EndomorphismAtPoint{Eigen::MatrixXd::Random(4, 4)}, 0);
        CHECK((R.components - P).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("scalar N rescales") {
        const Eigen::MatrixXd cI = 3.0 * Eigen::MatrixXd::Identity(4, 4);
        const auto R = hierarchy_bivector(BivectorAtPoint{P}, EndomorphismAtPoint{cI}, 1);
        CHECK((R.components - 3.0 * P).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("model pair stays antisymmetric at power two") {
        const Model& model = cp2_model();
        const auto q = sample_chart_points(model.spec(), 1, 23)[0];
        const auto piq = model.pi(q);
        const auto Nq = model.nijenhuis(q);
        const auto R = hierarchy_bivector(piq, Nq, 2);
        CHECK(antisymmetry_residual(R.components) < 1e-9);
    }

    SUBCASE("incompatible pair is rejected") {
        Eigen::MatrixXd N = Eigen::MatrixXd::Zero(4, 4);
        N(0, 0) = 1.0;
        N(0, 1) = 2.0;
        N(2, 3) = -0.7;
        CHECK_THROWS_AS(hierarchy_bivector(BivectorAtPoint{P}, EndomorphismAtPoint{N}, 1),
                        AsymmetryResidual);
    }
}

TEST_CASE("np symmetry residual") {
    Eigen::MatrixXd P(4, 4);
    P << 0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 2, 0, 0, -2, 0;

    CHECK(check_np_symmetry(BivectorAtPoint{P},
                            EndomorphismAtPoint{Eigen::MatrixXd::Identity(4, 4)}) == 0.0);

    const Model& model = cp2_model();
    const auto q = sample_chart_points(model.spec(), 1, 31)[0];
    CHECK(check_np_symmetry(model.omega_inv(q), model.nijenhuis(q)) < 1e-9);
    CHECK(check_np_symmetry(model.pi(q), model.nijenhuis(q)) < 1e-9);

    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(4, 4);
    N(0, 2) = 1.3;
    CHECK(check_np_symmetry(BivectorAtPoint{P}, EndomorphismAtPoint{N}) > 1e-2);
}

TEST_CASE("canonical hamiltonians") {
    SUBCASE("identity trace") {
        TensorField id{TensorKind::Endomorphism,
                       [](const ChartPoint&) { return Eigen::MatrixXd::Identity(6, 6); }};
        ChartPoint p;
        p.coords = Eigen::VectorXd::Zero(6);
        CHECK(canonical_hamiltonian(id, 1, p) == doctest::Approx(6.0));
    }

    SUBCASE("explicit diagonal") {
        Eigen::VectorXd diag(4);
        diag << 1.5, 1.5, -0.5, -0.5;
        TensorField N{TensorKind::Endomorphism,
                      [diag](const ChartPoint&) { return diag.asDiagonal().toDenseMatrix(); }};
        ChartPoint p;
        p.coords = Eigen::VectorXd::Zero(4);
        CHECK(canonical_hamiltonian(N, 2, p) ==
              doctest::Approx(1.5 * 1.5 + 0.5 * 0.5));  // (2a^2 + 2b^2)/2
    }

    SUBCASE("I_1 doubles the GT value on the sphere") {
        const Model& model = cp1_model();
        const ChartPoint p = cp1_point(0.4, -0.7);
        const double lam = model.gt(p).flattened()[0];
        CHECK(canonical_hamiltonian(model.nijenhuis_field(), 1, p) ==
              doctest::Approx(2.0 * lam).epsilon(1e-10));
    }
}

TEST_CASE("canonical Lenart relation") {
    SUBCASE("scalar field is trivially consistent") {
        TensorField cid{TensorKind::Endomorphism, [](const ChartPoint&) {
                            return (1.7 * Eigen::MatrixXd::Identity(4, 4)).eval();
                        }};
        const ChartPoint p = point4(0.1, 0.2, 0.3, 0.4);
        CHECK(check_lenart_canonical(cid, 2, p, kFd) < 1e-10);
    }

    SUBCASE("model satisfies it for k = 1..4") {
        const Model& model = cp1_model();
        const ChartPoint p = cp1_point(-0.35, 0.6);
        for (int k = 1; k <= 4; ++k)
            CHECK(check_lenart_canonical(model.nijenhuis_field(), k, p, kFd) < 1e-6);
    }

    SUBCASE("random endomorphism field fails it") {
        TensorField N{TensorKind::Endomorphism, [](const ChartPoint& q) {
                          Eigen::MatrixXd M(2, 2);
                          M << q.coords[0], 1.0 + q.coords[1], 0.5, 2.0 - q.coords[0];
                          return M;
                      }};
        CHECK(check_lenart_canonical(N, 1, cp1_point(0.3, 0.4), kFd) > 1e-3);
    }
}

TEST_CASE("log-det extension of the hierarchy") {
    SUBCASE("scalar pencil") {
        TensorField cid{TensorKind::Endomorphism, [](const ChartPoint&) {
                            return (0.8 * Eigen::MatrixXd::Identity(4, 4)).eval();
                        }};
        CHECK(check_logdet_extension(cid, 1.0, point4(0, 0, 0, 0), kFd) < 1e-10);
    }

    SUBCASE("model at t = 1") {
        const Model& model = cp1_model();
        CHECK(check_logdet_extension(model.nijenhuis_field(), 1.0, cp1_point(0.25, -0.4), kFd) <
              1e-6);
    }

    SUBCASE("singular pencil parameter raises the guard") {
        const Model& model = cp1_model();
        const ChartPoint p = cp1_point(0.25, -0.4);
        const double lam = model.gt(p).flattened()[0];
        CHECK_THROWS_AS(check_logdet_extension(model.nijenhuis_field(), -lam, p, kFd), SingularNt);
    }
}

TEST_CASE("koszul bracket on exact forms") {
    const ChartPoint p = point4(0.2, -0.3, 0.1, 0.4);
    Eigen::MatrixXd J(4, 4);
    J << 0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0;
    const auto P = constant_bivector(J);

    SUBCASE("antisymmetry: equal arguments annihilate") {
        ScalarField f = [](const ChartPoint& q) { return q.coords[0] * q.coords[2]; };
        CHECK(koszul_bracket(P, f, f, p, kFd).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("constant P with linear arguments gives the zero covector") {
        // inner FD gradients carry ~1e-11 jitter that the outer difference
        // amplifies by 1/step, so the bound sits at the nested-noise floor
        ScalarField f = [](const ChartPoint& q) { return 2.0 * q.coords[0] + q.coords[3]; };
        ScalarField g = [](const ChartPoint& q) { return q.coords[1] - q.coords[2]; };
        CHECK(koszul_bracket(P, f, g, p, kFd).cwiseAbs().maxCoeff() < 1e-6);
    }

    SUBCASE("exactness: equals the differential of the poisson bracket") {
        ScalarField f = [](const ChartPoint& q) { return q.coords[0] * q.coords[1]; };
        ScalarField g = [](const ChartPoint& q) {
            return q.coords[2] * q.coords[2] + q.coords[3];
        };
        const Eigen::VectorXd lhs = koszul_bracket(P, f, g, p, FDConfig{1e-4, FDScheme::Central2});
        ScalarField pb = [&](const ChartPoint& q) {
            return gradient(f, q, kFd).dot(J * gradient(g, q, kFd));
        };
        const Eigen::VectorXd rhs = gradient(pb, p, FDConfig{1e-4, FDScheme::Central2});
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-5);
    }

    SUBCASE("model eigenvalues are in involution") {
        const Model& model = cp2_model();
        const auto pts = sample_chart_points(model.spec(), 4, 41);
        for (const auto& q : pts) {
            if (model.gt(q).min_gap() < 0.05) continue;
            const Eigen::VectorXd br =
                koszul_bracket_forms(model.pi_field(), model.gt_gradient_field(0),
                                     model.gt_gradient_field(1), q,
                                     FDConfig{1e-3, FDScheme::Central4});
            CHECK(br.cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("pointwise poisson bracket") {
    Eigen::MatrixXd J(2, 2);
    J << 0, 1, -1, 0;
    Eigen::VectorXd dx(2), dp(2);
    dx << 1, 0;
    dp << 0, 1;
    CHECK(poisson_bracket(BivectorAtPoint{J}, dx, dx) == 0.0);
    CHECK(poisson_bracket(BivectorAtPoint{J}, dx, dp) == doctest::Approx(1.0));

    const Model& model = cp2_model();
    const auto q = sample_chart_points(model.spec(), 1, 3)[0];
    TensorField Nf = model.nijenhuis_field();
    ScalarField I2 = [&](const ChartPoint& r) { return canonical_hamiltonian(Nf, 2, r); };
    ScalarField I3 = [&](const ChartPoint& r) { return canonical_hamiltonian(Nf, 3, r); };
    const double val = poisson_bracket(model.pi_t(q, 0.5), gradient(I2, q, kFd),
                                       gradient(I3, q, kFd));
    CHECK(std::abs(val) < 1e-6);
}

TEST_CASE("clustered spectrum of the recursion operator") {
    SUBCASE("explicit diagonal pairs") {
        Eigen::VectorXd d(4);
        d << 1.0, 1.0, 2.0, 2.0;
        const auto spec = nijenhuis_spectrum(
            EndomorphismAtPoint{d.asDiagonal().toDenseMatrix()}, 1e-6);
        REQUIRE(spec.size() == 2);
        CHECK(spec[0].first == doctest::Approx(1.0));
        CHECK(spec[0].second == 2);
        CHECK(spec[1].first == doctest::Approx(2.0));
        CHECK(spec[1].second == 2);
    }

    SUBCASE("full identity merges into one cluster") {
        const auto spec =
            nijenhuis_spectrum(EndomorphismAtPoint{Eigen::MatrixXd::Identity(4, 4)}, 1e-6);
        REQUIRE(spec.size() == 1);
        CHECK(spec[0].second == 4);
    }

    SUBCASE("model point has m distinct doubly degenerate values inside (0, 2)") {
        const Model& model = cp2_model();
        const auto q = sample_chart_points(model.spec(), 1, 9)[0];
        const auto spec = nijenhuis_spectrum(model.nijenhuis(q), 1e-6);
        REQUIRE(spec.size() == 2);
        for (const auto& [value, mult] : spec) {
            CHECK(mult == 2);
            CHECK(value > 0.0);
            CHECK(value < 2.0);
        }
    }

    SUBCASE("odd clusters and complex spectra raise guards") {
        Eigen::VectorXd d(4);
        d << 1.0, 2.0, 2.0, 3.0;
        CHECK_THROWS_AS(
            nijenhuis_spectrum(EndomorphismAtPoint{d.asDiagonal().toDenseMatrix()}, 1e-6),
            OddMultiplicity);
        Eigen::MatrixXd rot(2, 2);
        rot << 0, -1, 1, 0;
        CHECK_THROWS_AS(nijenhuis_spectrum(EndomorphismAtPoint{rot}, 1e-6), ComplexSpectrum);
    }
}

TEST_CASE("eigenvalue equation residual") {
    SUBCASE("constant eigenvalue of a scalar operator") {
        TensorField cid{TensorKind::Endomorphism, [](const ChartPoint&) {
                            return (0.6 * Eigen::MatrixXd::Identity(4, 4)).eval();
                        }};
        ScalarField lam = [](const ChartPoint&) { return 0.6; };
        CHECK(check_eigen_equation(lam, cid, point4(0.1, 0.2, 0.3, 0.4), kFd) < 1e-12);
    }

    SUBCASE("GT values satisfy it on the model") {
        const Model& model = cp2_model();
        const auto q = sample_chart_points(model.spec(), 1, 19)[0];
        for (int j = 0; j < model.m(); ++j)
            CHECK(check_eigen_equation(model.gt_value_field(j), model.nijenhuis_field(), q, kFd) <
                  1e-6);
    }

    SUBCASE("a coordinate function does not") {
        const Model& model = cp2_model();
        const auto q = sample_chart_points(model.spec(), 1, 19)[0];
        ScalarField fake = [](const ChartPoint& r) { return r.coords[0] + 10.0; };
        CHECK(check_eigen_equation(fake, model.nijenhuis_field(), q, kFd) > 1e-2);
    }
}

TEST_CASE("hamiltonian form residuals") {
    const Model& model = cp2_model();
    const FDConfig fd_outer{1e-3, FDScheme::Central4};
    ChartPoint q;
    for (const auto& cand : sample_chart_points(model.spec(), 8, 29)) {
        q = cand;
        if (model.gt(q).min_gap() > 0.05) break;
    }

    SUBCASE("closedness baseline and N-closedness of GT forms") {
        for (int j = 0; j < model.m(); ++j) {
            const auto res = hamiltonian_form_residual_form(
                model.gt_gradient_field(j), model.nijenhuis_field(), q, fd_outer);
            CHECK(res.first < 1e-7);
            CHECK(res.second < 1e-5);
        }
    }

    SUBCASE("a generic coordinate function is not N-closed") {
        ScalarField fake = [](const ChartPoint& r) {
            return r.coords[0] + 0.3 * r.coords[1] * r.coords[1];
        };
        const auto res =
            hamiltonian_form_residual(fake, model.nijenhuis_field(), q, FDConfig{1e-4});
        CHECK(res.first < 1e-6);    // exactness baseline holds for any smooth field
        CHECK(res.second > 1e-3);   // but N^T df is not closed
    }
}

TEST_CASE("vandermonde independence certificates") {
    auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
    const auto ab = vandermonde_checks({1.0, 2.0});
    CHECK(close(ab.first, 1.0));
    CHECK(close(ab.second, 2.0));
    CHECK(vandermonde_checks({1.0, 1.0}).first == 0.0);

    const Model& model = cp2_model();
    for (const auto& q : sample_chart_points(model.spec(), 5, 37)) {
        const auto gt = model.gt(q);
        if (!gt.in_smooth_locus()) continue;
        const Eigen::VectorXd flat = gt.flattened();
        CHECK(std::abs(vandermonde_checks({flat.data(), flat.data() + flat.size()}).first) >
              1e-8);
    }
}
