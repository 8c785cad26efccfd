#include "pnkit/groupoid.hpp"

#include <algorithm>
#include <cmath>

#include "pnkit/errors.hpp"

namespace pnkit {

Polytope Polytope::simplex(int dim, double top) {
    Polytope p;
    p.dim_ = dim;
    p.top_ = top;
    return p;
}

Polytope Polytope::gelfand_tsetlin(const GTShape& shape) {
    if (shape.const_value.size() != shape.is_free.size())
        throw ConfigError("GT shape is missing its constant values");
    Polytope p;
    p.dim_ = shape.free_count();
    p.top_ = shape.top;
    p.shape_ = shape;
    return p;
}

double Polytope::violation(const Eigen::VectorXd& lambda) const {
    if (lambda.size() != dim_) throw ConfigError("base point has wrong dimension");
    if (!shape_) {
        double v = std::max(-lambda[0], lambda[lambda.size() - 1] - top_);
        for (Eigen::Index i = 0; i + 1 < lambda.size(); ++i)
            v = std::max(v, lambda[i] - lambda[i + 1]);
        return std::max(v, 0.0);
    }
    // Rebuild the full triangular array from the pinned constants, then check
    // adjacent-level interlacing.
    const GTShape& sh = *shape_;
    std::vector<std::vector<double>> full(sh.n);
    int flat = 0;
    for (int s = 0; s < sh.n; ++s) {
        full[s].resize(s + 1);
        for (int i = 0; i <= s; ++i)
            full[s][i] = sh.is_free[s][i] ? lambda[flat++] : sh.const_value[s][i];
    }
    double v = 0.0;
    for (const auto& lvl : full)
        for (double x : lvl) v = std::max({v, -x, x - top_});
    for (int s = 0; s + 1 < sh.n; ++s) {
        const auto& a = full[s];
        const auto& b = full[s + 1];
        for (std::size_t i = 0; i < a.size(); ++i)
            v = std::max({v, b[i] - a[i], a[i] - b[i + 1]});
    }
    return v;
}

Eigen::VectorXd act(const Eigen::VectorXd& h, const Eigen::VectorXd& lambda, double t) {
    if (h.size() != lambda.size()) throw ConfigError("action dimension mismatch");
    Eigen::VectorXd out(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        out[i] = -t + std::exp(h[i]) * (lambda[i] + t);
    return out;
}

PolytopePoint source(const GroupoidElement& g) { return PolytopePoint{g.lambda}; }

Eigen::VectorXd target_unchecked(const GroupoidElement& g) { return act(g.h, g.lambda, g.t); }

PolytopePoint target(const GroupoidElement& g, const Polytope& polytope, double tol) {
    Eigen::VectorXd r = target_unchecked(g);
    if (!polytope.contains(r, tol))
        throw TargetOutsidePolytope("target leaves the polytope");
    return PolytopePoint{r};
}

GroupoidElement identity_element(const Eigen::VectorXd& lambda, double t) {
    return GroupoidElement{lambda, Eigen::VectorXd::Zero(lambda.size()), t};
}

GroupoidElement compose(const GroupoidElement& g1, const GroupoidElement& g2,
                        double tol, const Polytope& polytope) {
    if (g1.t != g2.t) throw NotComposable("pencil parameters differ");
    if (g1.h.size() != g2.h.size()) throw NotComposable("cocycle dimensions differ");
    const Eigen::VectorXd r1 = target_unchecked(g1);
    if ((r1 - g2.lambda).cwiseAbs().maxCoeff() > tol)
        throw NotComposable("target of the first element misses the source of the second");
    GroupoidElement out{g1.lambda, g1.h + g2.h, g1.t};
    (void)target(out, polytope, std::max(tol, 1e-9));
    return out;
}

GroupoidElement compose(const GroupoidElement& g1, const GroupoidElement& g2, double tol) {
    return compose(g1, g2, tol, Polytope::simplex(static_cast<int>(g1.lambda.size())));
}

GroupoidElement inverse(const GroupoidElement& g) {
    return GroupoidElement{target_unchecked(g), -g.h, g.t};
}

MembershipCase membership_case(double t, double top) {
    if (t < -top || t > 0.0) return MembershipCase::Pair;
    if (t == -top || t == 0.0) return MembershipCase::Boundary;
    return MembershipCase::Interior;
}

bool membership_cpn(const GroupoidElement& g, double tol) {
    const Polytope simplex = Polytope::simplex(static_cast<int>(g.lambda.size()));
    if (!simplex.contains(g.lambda, tol)) return false;
    if (!simplex.contains(target_unchecked(g), tol)) return false;

    switch (membership_case(g.t, simplex.top())) {
        case MembershipCase::Pair:
            return true;
        case MembershipCase::Interior:
            for (Eigen::Index i = 0; i + 1 < g.lambda.size(); ++i) {
                const bool collided = std::abs(g.lambda[i] + g.t) <= tol &&
                                      std::abs(g.lambda[i + 1] + g.t) <= tol;
                if (collided && std::abs(g.h[i] - g.h[i + 1]) > tol) return false;
            }
            return true;
        case MembershipCase::Boundary:
            for (Eigen::Index i = 0; i < g.lambda.size(); ++i)
                if (std::abs(g.lambda[i] + g.t) <= tol && std::abs(g.h[i]) > tol) return false;
            return true;
    }
    return false;
}

bool closure_check(const GroupoidElement& g1, const GroupoidElement& g2, double tol) {
    if (!membership_cpn(g1, tol) || !membership_cpn(g2, tol))
        throw NotComposable("closure check expects two members");
    const GroupoidElement g1g2 = compose(g1, g2, tol);
    return membership_cpn(g1g2, tol);
}

double eigenvalue_cocycle(const ChartPoint& x, const ChartPoint& y, int i, double t,
                          const Model& model, double singular_tol) {
    const ScalarField lam = model.gt_value_field(i);
    const double lx = lam(x) + t;
    const double ly = lam(y) + t;
    if (std::abs(lx) <= singular_tol || std::abs(ly) <= singular_tol || lx * ly < 0.0)
        throw SingularLog("lambda + t vanishes or changes sign between the points");
    return std::log(std::abs(ly)) - std::log(std::abs(lx));
}

GroupoidElement pair_to_element(const ChartPoint& x, const ChartPoint& y, double t,
                                const Model& model) {
    const int m = model.m();
    GroupoidElement g;
    g.t = t;
    g.lambda = model.gt(x).flattened();
    g.h.resize(m);
    for (int i = 0; i < m; ++i) g.h[i] = eigenvalue_cocycle(x, y, i, t, model);
    return g;
}

}  // namespace pnkit
