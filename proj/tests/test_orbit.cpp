#include <doctest.h>

#include <sstream>

#include "pnkit/errors.hpp"
#include "pnkit/orbit.hpp"
#include "test_support.hpp"

using namespace pnkit;
using pnkit::testing::cp1_point;

namespace {
const Complex I(0.0, 1.0);
}

TEST_CASE("make_rho produces the reference diagonal point") {
    const auto r21 = make_rho(OrbitSpec{2, 1, 1.0}).matrix;
    CHECK(r21(0, 0) == I);
    CHECK(r21(1, 1) == Complex(0.0));
    CHECK(r21(0, 1) == Complex(0.0));

    const auto r42 = make_rho(OrbitSpec{4, 2, 1.0}).matrix;
    CHECK(r42(0, 0) == I);
    CHECK(r42(1, 1) == I);
    CHECK(r42(2, 2) == Complex(0.0));
    CHECK(r42(3, 3) == Complex(0.0));

    const auto scaled = make_rho(OrbitSpec{2, 1, 2.0}).matrix;
    CHECK(scaled(0, 0) == Complex(0.0, 2.0));
}

TEST_CASE("orbit spec validation") {
    CHECK_THROWS_AS(make_rho(OrbitSpec{2, 2, 1.0}), ConfigError);
    CHECK_THROWS_AS(make_rho(OrbitSpec{2, 0, 1.0}), ConfigError);
    CHECK_THROWS_AS(make_rho(OrbitSpec{3, 1, -1.0}), ConfigError);
}

TEST_CASE("embed maps the chart origin to rho") {
    for (const OrbitSpec spec : {OrbitSpec{2, 1, 1.0}, OrbitSpec{3, 1, 1.0}, OrbitSpec{4, 2, 1.0}}) {
        const auto x = embed(spec, ChartPoint::origin(spec));
        CHECK((x.matrix - make_rho(spec).matrix).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("embed at z = 1 on the sphere gives the hand-computed point") {
    // g = ((1,-1),(1,1))/sqrt(2) applied to diag(i,0): all entries i/2.
    const OrbitSpec spec{2, 1, 1.0};
    const auto x = embed(spec, cp1_point(1.0, 0.0)).matrix;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            CHECK(std::abs(x(a, b) - Complex(0.0, 0.5)) < 1e-14);
}

TEST_CASE("embedding preserves the reference spectrum") {
    const OrbitSpec spec{4, 2, 1.0};
    for (const auto& p : sample_chart_points(spec, 12, 5)) {
        const auto x = embed(spec, p);
        CHECK(skew_hermitian_residual(x.matrix) < 1e-13);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Complex(0, -1) * x.matrix);
        const Eigen::VectorXd ev = es.eigenvalues();
        CHECK(std::abs(ev(0)) < 1e-10);
        CHECK(std::abs(ev(1)) < 1e-10);
        CHECK(std::abs(ev(2) - 1.0) < 1e-10);
        CHECK(std::abs(ev(3) - 1.0) < 1e-10);
    }
}

TEST_CASE("embed rejects malformed and degenerate inputs") {
    const OrbitSpec spec{3, 1, 1.0};
    ChartPoint bad;
    bad.coords = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(embed(spec, bad), ConfigError);

    ChartPoint far = ChartPoint::origin(spec);
    far.coords.setConstant(1e9);
    CHECK_THROWS_AS(embed(spec, far), NumericalDegeneracy);
}

TEST_CASE("opposite chart origin reaches the antipodal fixed point") {
    const OrbitSpec spec{4, 2, 1.0};
    ChartPoint p = ChartPoint::origin(spec);
    p.chart_id = {2, 3};
    const auto x = embed(spec, p).matrix;
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
    expected(2, 2) = I;
    expected(3, 3) = I;
    CHECK((x - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tangent frame has full rank and second-order step dependence") {
    const OrbitSpec spec{2, 1, 1.0};
    const ChartPoint p = cp1_point(0.3, -0.2);

    const auto frame = tangent_frame(spec, p, FDConfig{1e-5, FDScheme::Central2});
    REQUIRE(frame.basis.size() == 2);
    for (const auto& b : frame.basis) CHECK(skew_hermitian_residual(b) < 1e-10);
    Eigen::MatrixXd F(8, 2);
    F.col(0) = real_vec(frame.basis[0]);
    F.col(1) = real_vec(frame.basis[1]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(F);
    CHECK(svd.singularValues()(1) > 1e-3);

    // central-2 truncation shrinks by ~4 when the step halves
    const auto ref = tangent_frame(spec, p, FDConfig{1e-4, FDScheme::Central4});
    auto err = [&](double h) {
        const auto fr = tangent_frame(spec, p, FDConfig{h, FDScheme::Central2});
        double e = 0.0;
        for (int j = 0; j < 2; ++j)
            e = std::max(e, (fr.basis[j] - ref.basis[j]).cwiseAbs().maxCoeff());
        return e;
    };
    const double e1 = err(2e-3);
    const double e2 = err(1e-3);
    CHECK(e1 / e2 > 2.5);
    CHECK(e1 / e2 < 6.0);
}

TEST_CASE("tangent frame at the origin spans the image of ad_rho") {
    const OrbitSpec spec{3, 1, 1.0};
    const auto frame = tangent_frame(spec, ChartPoint::origin(spec), FDConfig{});
    const auto rho = make_rho(spec);
    // every ad_rho image must be reproducible in the frame span and vice versa
    Eigen::MatrixXd F(2 * 9, spec.dim());
    for (int j = 0; j < spec.dim(); ++j) F.col(j) = real_vec(frame.basis[j]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F);
    for (const auto& X : skew_hermitian_basis(3)) {
        const Eigen::MatrixXcd v = X * rho.matrix - rho.matrix * X;
        const Eigen::VectorXd b = real_vec(v);
        CHECK((F * qr.solve(b) - b).norm() < 1e-8 * std::max(1.0, b.norm()));
    }
}

TEST_CASE("solve_generator minimum-norm behavior") {
    const OrbitSpec spec{3, 1, 1.0};
    const auto x = embed(spec, ChartPoint::origin(spec));

    SUBCASE("zero right-hand side gives the zero solution") {
        const auto X = solve_generator(x, Eigen::MatrixXcd::Zero(3, 3));
        CHECK(X.cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("construct-then-solve round trip") {
        Eigen::MatrixXcd X0 = Eigen::MatrixXcd::Zero(3, 3);
        int s = 1;
        for (const auto& e : skew_hermitian_basis(3)) X0 += 0.1 * (s++ % 5) * e;
        const Eigen::MatrixXcd v = X0 * x.matrix - x.matrix * X0;
        const auto X = solve_generator(x, v);
        CHECK((X * x.matrix - x.matrix * X - v).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("solution at rho is supported off the diagonal blocks") {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(3, 3);
        v(0, 1) = Complex(0.3, 0.4);
        v(1, 0) = -std::conj(v(0, 1));
        v(0, 2) = Complex(-0.1, 0.2);
        v(2, 0) = -std::conj(v(0, 2));
        const auto X = solve_generator(x, v);
        CHECK(std::abs(X(0, 0)) < 1e-10);
        CHECK(std::abs(X(1, 1)) < 1e-10);
        CHECK(std::abs(X(2, 2)) < 1e-10);
        CHECK(std::abs(X(1, 2)) < 1e-10);  // stabilizer block of rho
    }

    SUBCASE("non-tangent input raises NotTangent") {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(3, 3);
        v(0, 0) = I;  // commutes with rho, orthogonal to the image of ad_rho
        CHECK_THROWS_AS(solve_generator(x, v), NotTangent);
    }
}

TEST_CASE("fd_directional on polynomial fields") {
    const OrbitSpec spec{2, 1, 1.0};
    const ChartPoint p = cp1_point(3.0, 0.5);
    const FDConfig fd{1e-5, FDScheme::Central2};

    ScalarField lin = [](const ChartPoint& q) { return q.coords[0]; };
    CHECK(fd_directional(lin, p, 0, fd) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fd_directional(lin, p, 1, fd) == doctest::Approx(0.0).epsilon(1e-10));

    ScalarField cst = [](const ChartPoint&) { return 7.5; };
    CHECK(fd_directional(cst, p, 0, fd) == doctest::Approx(0.0));

    ScalarField sq = [](const ChartPoint& q) { return q.coords[0] * q.coords[0]; };
    CHECK(std::abs(fd_directional(sq, p, 0, fd) - 6.0) < 1e-8);

    // central-4 is exact on quartics up to roundoff
    ScalarField quart = [](const ChartPoint& q) { return std::pow(q.coords[0], 4); };
    CHECK(std::abs(fd_directional(quart, p, 0, FDConfig{1e-2, FDScheme::Central4}) -
                   4.0 * std::pow(3.0, 3)) < 1e-8);
}

TEST_CASE("points CSV ingestion") {
    const OrbitSpec spec{2, 1, 1.0};

    SUBCASE("header plus rows") {
        std::istringstream in("re,im\n0.5,-0.25\n1.0,0.0\n");
        const auto pts = read_points_csv(in, spec);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0].coords[0] == 0.5);
        CHECK(pts[0].coords[1] == -0.25);
        CHECK(pts[1].coords[0] == 1.0);
    }

    SUBCASE("no header") {
        std::istringstream in("0.1,0.2\n");
        CHECK(read_points_csv(in, spec).size() == 1);
    }

    SUBCASE("wrong column count") {
        std::istringstream in("0.1,0.2,0.3\n");
        CHECK_THROWS_AS(read_points_csv(in, spec), ConfigError);
    }

    SUBCASE("junk after the header") {
        std::istringstream in("a,b\n0.1,0.2\nnot,numbers\n");
        CHECK_THROWS_AS(read_points_csv(in, spec), ConfigError);
    }
}
