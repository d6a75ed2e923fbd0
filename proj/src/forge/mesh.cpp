#include "forge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "forge/errors.hpp"

namespace forge {

namespace {

// Permutations of (0,1,2) in lexicographic order; tet k of a cell uses perms[k].
constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                              {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
constexpr bool kPermOdd[6] = {false, true, true, false, false, true};

} // namespace

Mesh Mesh::build_box(int resolution, const Box& box) {
    if (resolution < 1)
        throw InvalidInputError("build_box_mesh: resolution must be >= 1");
    if (box.degenerate())
        throw InvalidInputError("build_box_mesh: degenerate box");

    Mesh m;
    m.res_ = resolution;
    m.box_ = box;
    m.h_ = box.extent() / resolution;

    const int n = resolution + 1;
    m.vertices_.reserve(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                m.vertices_.emplace_back(box.lo[0] + i * m.h_[0],
                                         box.lo[1] + j * m.h_[1],
                                         box.lo[2] + k * m.h_[2]);

    m.tets_.reserve(static_cast<std::size_t>(6) * resolution * resolution * resolution);
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
            for (int k = 0; k < resolution; ++k) {
                int base[3] = {i, j, k};
                for (int p = 0; p < 6; ++p) {
                    int c[3] = {base[0], base[1], base[2]};
                    std::array<int, 4> tet;
                    tet[0] = m.vertex_id(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        c[kPerms[p][s]] += 1;
                        tet[s + 1] = m.vertex_id(c[0], c[1], c[2]);
                    }
                    // fix orientation so the signed volume is positive
                    if (kPermOdd[p]) std::swap(tet[2], tet[3]);
                    m.tets_.push_back(tet);
                }
            }

    // Boundary facets: faces shared by exactly one tet.
    std::map<std::array<int, 3>, std::pair<int, int>> faces; // sorted -> (tet, opp)
    for (int t = 0; t < m.tet_count(); ++t) {
        const auto& tet = m.tets_[t];
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> tri;
            int idx = 0;
            for (int v = 0; v < 4; ++v)
                if (v != f) tri[idx++] = tet[v];
            std::sort(tri.begin(), tri.end());
            auto it = faces.find(tri);
            if (it == faces.end())
                faces.emplace(tri, std::make_pair(t, tet[f]));
            else
                it->second.first = -1; // interior face
        }
    }
    for (const auto& [tri, info] : faces) {
        if (info.first < 0) continue;
        const Vec3& a = m.vertices_[tri[0]];
        const Vec3& b = m.vertices_[tri[1]];
        const Vec3& c = m.vertices_[tri[2]];
        Vec3 nrm = (b - a).cross(c - a);
        nrm.normalize();
        const Vec3& opp = m.vertices_[info.second];
        BoundaryFacet facet{tri, nrm};
        if (nrm.dot(opp - a) > 0) {
            facet.normal = -nrm;
            std::swap(facet.v[1], facet.v[2]);
        }
        m.facets_.push_back(facet);
    }

    m.boundary_nodes_.reserve(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) {
        auto [i, j, k] = m.grid_coords(v);
        const bool bdry = i == 0 || j == 0 || k == 0 || i == resolution ||
                          j == resolution || k == resolution;
        (bdry ? m.boundary_nodes_ : m.interior_nodes_).push_back(v);
    }
    return m;
}

std::vector<int> Mesh::collar_interior_nodes(int layers) const {
    if (layers < 0) throw InvalidInputError("collar_interior_nodes: layers >= 0");
    if (2 * layers >= res_)
        throw InvalidInputError("collar_interior_nodes: collar exhausts the domain");
    std::vector<int> out;
    for (int v : interior_nodes_) {
        auto [i, j, k] = grid_coords(v);
        const int d = std::min({i, j, k, res_ - i, res_ - j, res_ - k});
        if (d > layers) out.push_back(v);
    }
    if (out.empty())
        throw InvalidInputError("collar_interior_nodes: collar exhausts the domain");
    return out;
}

double Mesh::tet_volume(int t) const {
    const auto& tet = tets_[t];
    const Vec3& a = vertices_[tet[0]];
    const Mat3 e = (Mat3() << vertices_[tet[1]] - a, vertices_[tet[2]] - a,
                    vertices_[tet[3]] - a)
                       .finished();
    return e.determinant() / 6.0;
}

Vec3 Mesh::tet_centroid(int t) const {
    const auto& tet = tets_[t];
    return (vertices_[tet[0]] + vertices_[tet[1]] + vertices_[tet[2]] +
            vertices_[tet[3]]) /
           4.0;
}

Eigen::Matrix<double, 3, 4> Mesh::tet_basis_gradients(int t) const {
    const auto& tet = tets_[t];
    const Vec3& a = vertices_[tet[0]];
    Mat3 e;
    e << vertices_[tet[1]] - a, vertices_[tet[2]] - a, vertices_[tet[3]] - a;
    const Mat3 einvT = e.inverse().transpose();
    Eigen::Matrix<double, 3, 4> g;
    g.col(1) = einvT.col(0);
    g.col(2) = einvT.col(1);
    g.col(3) = einvT.col(2);
    g.col(0) = -(g.col(1) + g.col(2) + g.col(3));
    return g;
}

int Mesh::locate(const Vec3& x) const {
    int cell[3];
    double frac[3];
    for (int ax = 0; ax < 3; ++ax) {
        double t = (x[ax] - box_.lo[ax]) / h_[ax];
        t = std::clamp(t, 0.0, static_cast<double>(res_));
        int c = static_cast<int>(std::floor(t));
        c = std::clamp(c, 0, res_ - 1);
        cell[ax] = c;
        frac[ax] = t - c;
    }
    // Kuhn tet within the cell from the descending order of fractional coords.
    int order[3] = {0, 1, 2};
    std::stable_sort(order, order + 3,
                     [&](int a, int b) { return frac[a] > frac[b]; });
    int perm = 0;
    for (; perm < 6; ++perm)
        if (kPerms[perm][0] == order[0] && kPerms[perm][1] == order[1]) break;
    const int cell_index = (cell[0] * res_ + cell[1]) * res_ + cell[2];
    return cell_index * 6 + perm;
}

Eigen::Vector4d Mesh::barycentric(int t, const Vec3& x) const {
    const auto& tet = tets_[t];
    const Vec3& a = vertices_[tet[0]];
    Mat3 e;
    e << vertices_[tet[1]] - a, vertices_[tet[2]] - a, vertices_[tet[3]] - a;
    const Vec3 lam = e.partialPivLu().solve(x - a);
    Eigen::Vector4d b;
    b[1] = lam[0];
    b[2] = lam[1];
    b[3] = lam[2];
    b[0] = 1.0 - lam.sum();
    return b;
}

void Mesh::dump_json(std::ostream& os) const {
    os << "{\n  \"resolution\": " << res_ << ",\n  \"vertices\": [";
    for (int v = 0; v < vertex_count(); ++v) {
        if (v) os << ",";
        os << "[" << vertices_[v][0] << "," << vertices_[v][1] << ","
           << vertices_[v][2] << "]";
    }
    os << "],\n  \"tets\": [";
    for (int t = 0; t < tet_count(); ++t) {
        if (t) os << ",";
        os << "[" << tets_[t][0] << "," << tets_[t][1] << "," << tets_[t][2]
           << "," << tets_[t][3] << "]";
    }
    os << "],\n  \"boundary_facets\": [";
    for (std::size_t f = 0; f < facets_.size(); ++f) {
        if (f) os << ",";
        os << "{\"v\":[" << facets_[f].v[0] << "," << facets_[f].v[1] << ","
           << facets_[f].v[2] << "],\"normal\":[" << facets_[f].normal[0] << ","
           << facets_[f].normal[1] << "," << facets_[f].normal[2] << "]}";
    }
    os << "]\n}\n";
}

} // namespace forge
