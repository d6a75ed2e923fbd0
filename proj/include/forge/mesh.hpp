#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "forge/geometry.hpp"

namespace forge {

struct BoundaryFacet {
    std::array<int, 3> v;
    Vec3 normal; // outward unit normal
};

/// Structured tetrahedral mesh of an axis-aligned box: `resolution` cells per
/// axis, each cube cell split into the six Kuhn tetrahedra sharing the main
/// diagonal. Immutable after construction.
class Mesh {
public:
    static Mesh build_box(int resolution, const Box& box = Box::unit());

    int resolution() const { return res_; }
    const Box& box() const { return box_; }
    Vec3 spacing() const { return h_; }

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int tet_count() const { return static_cast<int>(tets_.size()); }
    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 4>>& tets() const { return tets_; }
    const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }

    /// Grid index (i,j,k) -> vertex id, i,j,k in [0, resolution].
    int vertex_id(int i, int j, int k) const {
        const int n = res_ + 1;
        return (i * n + j) * n + k;
    }
    std::array<int, 3> grid_coords(int vid) const {
        const int n = res_ + 1;
        return {vid / (n * n), (vid / n) % n, vid % n};
    }

    const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
    const std::vector<int>& interior_nodes() const { return interior_nodes_; }

    /// Vertices at more than `layers` grid layers from every face. A P1
    /// function supported on these vanishes on the boundary collar of width
    /// layers*h. Throws if the collar exhausts the domain.
    std::vector<int> collar_interior_nodes(int layers) const;

    double tet_volume(int t) const;
    Vec3 tet_centroid(int t) const;

    /// Constant P1 basis gradients on tet t; column i is grad of the hat
    /// function of vertex tets()[t][i].
    Eigen::Matrix<double, 3, 4> tet_basis_gradients(int t) const;

    /// Tet containing x (clamped into the box). O(1) via grid lookup.
    int locate(const Vec3& x) const;
    /// Barycentric coordinates of x in tet t.
    Eigen::Vector4d barycentric(int t, const Vec3& x) const;

    void dump_json(std::ostream& os) const;

private:
    Mesh() = default;

    int res_ = 0;
    Box box_;
    Vec3 h_{0, 0, 0};
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 4>> tets_;
    std::vector<BoundaryFacet> facets_;
    std::vector<int> boundary_nodes_;
    std::vector<int> interior_nodes_;
};

} // namespace forge
