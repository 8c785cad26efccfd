#pragma once

#include <Eigen/Dense>
#include <optional>

#include "pnkit/hermitian_model.hpp"
#include "pnkit/orbit.hpp"

namespace pnkit {

// The topological groupoid over the Gelfand-Tsetlin polytope: elements
// (lambda, h, t), structure maps l(lambda,h) = lambda and
// r(lambda,h) = -t + e^h (lambda + t), composition by adding cocycle values,
// the R^m action defined by r, and the wide-subgroupoid membership laws for
// the k = 1 polytope (the simplex 0 <= l_1 <= ... <= l_m <= 2).

/// Validity region for base points. The simplex covers the k = 1 case; the
/// interlacing variant handles general Gelfand-Tsetlin shapes.
class Polytope {
public:
    static Polytope simplex(int dim, double top = 2.0);
    static Polytope gelfand_tsetlin(const GTShape& shape);

    int dim() const { return dim_; }
    double top() const { return top_; }
    /// Max constraint violation (0 inside).
    double violation(const Eigen::VectorXd& lambda) const;
    bool contains(const Eigen::VectorXd& lambda, double tol) const {
        return violation(lambda) <= tol;
    }

private:
    int dim_ = 0;
    double top_ = 2.0;
    std::optional<GTShape> shape_;  // empty = simplex
};

struct PolytopePoint {
    Eigen::VectorXd lambda;
};

struct GroupoidElement {
    Eigen::VectorXd lambda;  // source base point
    Eigen::VectorXd h;       // cocycle values
    double t = 0.0;
};

/// The R^m action: h acts on lambda as -t + e^h (lambda + t), componentwise.
Eigen::VectorXd act(const Eigen::VectorXd& h, const Eigen::VectorXd& lambda, double t);

PolytopePoint source(const GroupoidElement& g);

/// Target base point; throws TargetOutsidePolytope when it leaves the polytope.
PolytopePoint target(const GroupoidElement& g, const Polytope& polytope, double tol = 1e-9);
Eigen::VectorXd target_unchecked(const GroupoidElement& g);

GroupoidElement identity_element(const Eigen::VectorXd& lambda, double t);

/// (lambda, h) (lambda', h') = (lambda, h + h'), defined when target(g1)
/// matches source(g2) within tol. Validates the composite target.
GroupoidElement compose(const GroupoidElement& g1, const GroupoidElement& g2,
                        double tol, const Polytope& polytope);
GroupoidElement compose(const GroupoidElement& g1, const GroupoidElement& g2, double tol = 1e-9);

/// (target(g), -h, t); the polytope-validity of g makes the inverse valid.
GroupoidElement inverse(const GroupoidElement& g);

enum class MembershipCase { Pair, Interior, Boundary };

/// Case selection from t: pair for t outside [-2, 0], boundary at the ends,
/// interior in between (bounds scale with the polytope top).
MembershipCase membership_case(double t, double top = 2.0);

/// Wide-subgroupoid membership over the simplex:
///   interior t:  l_i = l_{i+1} = -t  implies  h_i = h_{i+1},
///   boundary t:  l_i = -t            implies  h_i = 0,
///   pair t:      every element with source and target inside is a member.
bool membership_cpn(const GroupoidElement& g, double tol = 1e-9);

/// Membership of the composite; throws NotComposable like compose.
bool closure_check(const GroupoidElement& g1, const GroupoidElement& g2, double tol = 1e-9);

/// Cocycle value of the pair (x, y) for the i-th Gelfand-Tsetlin value:
/// h = log(l_i(y) + t) - log(l_i(x) + t). Throws SingularLog when l + t
/// vanishes or changes sign between the points.
double eigenvalue_cocycle(const ChartPoint& x, const ChartPoint& y, int i, double t,
                          const Model& model, double singular_tol = 1e-12);

/// Chart of the pair groupoid over the smooth locus: lambda = GT(x),
/// h_i = eigenvalue_cocycle(x, y, i, t).
GroupoidElement pair_to_element(const ChartPoint& x, const ChartPoint& y, double t,
                                const Model& model);

}  // namespace pnkit
