#pragma once

#include <array>
#include <functional>
#include <vector>

#include "forge/geometry.hpp"

namespace forge {

/// Quadrature point on a tetrahedron in barycentric coordinates.
struct TetQuadPoint {
    std::array<double, 4> bary;
    double weight; // weights sum to 1; integral = volume * sum w_i f(x_i)
};

/// Symmetric quadrature rules on the tetrahedron.
/// order 1: 1-point centroid rule (degree 1)
/// order 2: 4-point rule (degree 2)
/// order 4: 14-point rule (degree 5), the default for all smooth integrands.
const std::vector<TetQuadPoint>& tet_rule(int order = 4);

/// 1D Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int npoints);
};

/// Composite tensor-product Gauss-Legendre quadrature over a box:
/// `panels` equal subdivisions per axis, `points` GL nodes per panel per axis.
class CubeQuadrature {
public:
    CubeQuadrature(const Box& box, int panels, int points);
    CubeQuadrature(const Box& box, const std::array<int, 3>& panels, int points);

    const std::vector<Vec3>& points() const { return pts_; }
    const std::vector<double>& weights() const { return wts_; }

    double integrate(const std::function<double(const Vec3&)>& f) const;

    /// 1D node/weight arrays per axis (same for all axes up to affine map).
    const std::vector<double>& axis_nodes(int axis) const { return axis_nodes_[axis]; }
    const std::vector<double>& axis_weights(int axis) const { return axis_wts_[axis]; }

private:
    std::array<std::vector<double>, 3> axis_nodes_;
    std::array<std::vector<double>, 3> axis_wts_;
    std::vector<Vec3> pts_;
    std::vector<double> wts_;
};

} // namespace forge
