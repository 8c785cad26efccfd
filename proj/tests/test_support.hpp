#pragma once

#include "pnkit/hermitian_model.hpp"
#include "pnkit/orbit.hpp"

namespace pnkit::testing {

inline const Model& cp1_model() {
    static const Model m = Model::calibrated(OrbitSpec{2, 1, 1.0});
    return m;
}

inline const Model& cp2_model() {
    static const Model m = Model::calibrated(OrbitSpec{3, 1, 1.0});
    return m;
}

inline const Model& cp3_model() {
    static const Model m = Model::calibrated(OrbitSpec{4, 1, 1.0});
    return m;
}

inline const Model& gr24_model() {
    static const Model m = Model::calibrated(OrbitSpec{4, 2, 1.0});
    return m;
}

inline ChartPoint cp1_point(double re, double im) {
    ChartPoint p;
    p.coords = Eigen::Vector2d(re, im);
    return p;
}

}  // namespace pnkit::testing
