#pragma once

#include <Eigen/Dense>

namespace forge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Axis-aligned box in R^3.
struct Box {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{1.0, 1.0, 1.0};

    Vec3 extent() const { return hi - lo; }
    double volume() const { return extent().prod(); }
    bool degenerate(double tol = 1e-14) const {
        return extent().minCoeff() <= tol;
    }
    bool contains(const Vec3& x, double tol = 0.0) const {
        return (x.array() >= lo.array() - tol).all() &&
               (x.array() <= hi.array() + tol).all();
    }
    /// Box shrunk by `margin` on every face. May be degenerate.
    Box shrunk(double margin) const {
        return Box{lo + Vec3::Constant(margin), hi - Vec3::Constant(margin)};
    }

    static Box unit() { return Box{}; }
};

/// Symmetric 3x3 second-derivative container indexed (k,l) -> d2/dxk dxl.
using SymHess = Mat3;

/// Third-derivative tensor of a scalar, symmetric in all indices.
/// t[k](i,j) = d^3 / dx_k dx_i dx_j.
using ThirdTensor = std::array<Mat3, 3>;

inline ThirdTensor zero_third() {
    return {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
}

} // namespace forge
