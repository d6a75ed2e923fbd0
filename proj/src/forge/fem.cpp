#include "forge/fem.hpp"

#include <Eigen/SparseLU>
#include <ostream>

#include "forge/errors.hpp"
#include "forge/quadrature.hpp"

namespace forge {

double ScalarField::eval(const Vec3& x) const {
    const int t = mesh->locate(x);
    const Eigen::Vector4d b = mesh->barycentric(t, x);
    const auto& tet = mesh->tets()[t];
    double v = 0.0;
    for (int i = 0; i < 4; ++i) v += b[i] * nodal[tet[i]];
    return v;
}

Vec3 ScalarField::grad_in_tet(int t) const {
    const auto g = mesh->tet_basis_gradients(t);
    const auto& tet = mesh->tets()[t];
    Vec3 out = Vec3::Zero();
    for (int i = 0; i < 4; ++i) out += nodal[tet[i]] * g.col(i);
    return out;
}

Eigen::Matrix4d element_stiffness(const std::array<Vec3, 4>& verts,
                                  const Mat3& gamma_const) {
    Mat3 e;
    e << verts[1] - verts[0], verts[2] - verts[0], verts[3] - verts[0];
    const double vol = e.determinant() / 6.0;
    const Mat3 einvT = e.inverse().transpose();
    Eigen::Matrix<double, 3, 4> g;
    g.col(1) = einvT.col(0);
    g.col(2) = einvT.col(1);
    g.col(3) = einvT.col(2);
    g.col(0) = -(g.col(1) + g.col(2) + g.col(3));
    Eigen::Matrix4d k;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            k(i, j) = vol * g.col(i).dot(gamma_const * g.col(j));
    return k;
}

Eigen::Matrix4d element_mass(const std::array<Vec3, 4>& verts) {
    Mat3 e;
    e << verts[1] - verts[0], verts[2] - verts[0], verts[3] - verts[0];
    const double vol = e.determinant() / 6.0;
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = vol * (i == j ? 0.1 : 0.05);
    return m;
}

SpMat assemble_stiffness(const Mesh& mesh, const ConductivityField& gamma,
                         int quad_order) {
    if (gamma.lambda_min() <= 0.0)
        throw InvalidInputError("assemble_stiffness: conductivity not elliptic");
    const auto& rule = tet_rule(quad_order);
    const int n = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.tet_count()) * 16);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets()[t];
        const double vol = mesh.tet_volume(t);
        const auto g = mesh.tet_basis_gradients(t);
        Mat3 gamma_avg = Mat3::Zero();
        for (const auto& qp : rule) {
            Vec3 x = Vec3::Zero();
            for (int i = 0; i < 4; ++i)
                x += qp.bary[i] * mesh.vertices()[tet[i]];
            gamma_avg += qp.weight * gamma.eval(x);
        }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double v = vol * g.col(i).dot(gamma_avg * g.col(j));
                trips.emplace_back(tet[i], tet[j], v);
            }
    }
    SpMat A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

SpMat assemble_mass(const Mesh& mesh) {
    const int n = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.tet_count()) * 16);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets()[t];
        const double vol = mesh.tet_volume(t);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                trips.emplace_back(tet[i], tet[j], vol * (i == j ? 0.1 : 0.05));
    }
    SpMat M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

SpMat assemble_lumped_mass(const Mesh& mesh) {
    const int n = mesh.vertex_count();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets()[t];
        const double vol = mesh.tet_volume(t);
        for (int i = 0; i < 4; ++i) d[tet[i]] += 0.25 * vol;
    }
    SpMat M(n, n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(n);
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, d[i]);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

Eigen::VectorXd assemble_moments(const Mesh& mesh) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets()[t];
        const double vol = mesh.tet_volume(t);
        for (int i = 0; i < 4; ++i) b[tet[i]] += 0.25 * vol;
    }
    return b;
}

SpMat restrict_matrix(const SpMat& A, const std::vector<int>& idx) {
    std::vector<int> map(A.rows(), -1);
    for (std::size_t i = 0; i < idx.size(); ++i) map[idx[i]] = static_cast<int>(i);
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const int r = map[it.row()];
            const int c = map[it.col()];
            if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
        }
    SpMat out(static_cast<int>(idx.size()), static_cast<int>(idx.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

namespace {

// Extract S[rows, cols] as a sparse block.
SpMat sparse_block(const SpMat& S, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
    std::vector<int> rmap(S.rows(), -1), cmap(S.cols(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < cols.size(); ++i) cmap[cols[i]] = static_cast<int>(i);
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < S.outerSize(); ++k)
        for (SpMat::InnerIterator it(S, k); it; ++it) {
            const int r = rmap[it.row()];
            const int c = cmap[it.col()];
            if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
        }
    SpMat out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

} // namespace

ScalarField solve_dirichlet_assembled(const SpMat& A, const SpMat& M,
                                      double lambda, const Eigen::VectorXd& g,
                                      const Mesh& mesh,
                                      const DirichletOptions& opts) {
    const auto& bnodes = mesh.boundary_nodes();
    const auto& inodes = mesh.interior_nodes();
    const SpMat S = A - lambda * M;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (int b : bnodes) u[b] = g[b];

    if (!inodes.empty()) {
        const SpMat S_II = sparse_block(S, inodes, inodes);
        const SpMat S_IB = sparse_block(S, inodes, bnodes);
        Eigen::VectorXd gb(bnodes.size());
        for (std::size_t i = 0; i < bnodes.size(); ++i) gb[i] = g[bnodes[i]];
        const Eigen::VectorXd rhs = -(S_IB * gb);

        Eigen::VectorXd ui;
        if (opts.method == SolveMethod::Direct) {
            Eigen::SparseLU<SpMat> lu(S_II);
            if (lu.info() != Eigen::Success)
                throw ResonanceError("solve_dirichlet: singular shifted system");
            ui = lu.solve(rhs);
        } else {
            IterativeResult res = solve_symmetric(S_II, rhs, opts.tol,
                                                  opts.max_iterations);
            if (!res.converged)
                throw ResonanceError(
                    "solve_dirichlet: solver stagnation (residual " +
                    std::to_string(res.relative_residual) +
                    "), frequency too close to the Dirichlet spectrum?");
            ui = res.x;
        }
        for (std::size_t i = 0; i < inodes.size(); ++i) u[inodes[i]] = ui[i];
    }
    return ScalarField{&mesh, u};
}

ScalarField solve_dirichlet(const ConductivityField& gamma, double lambda,
                            const Eigen::VectorXd& g, const Mesh& mesh,
                            const DirichletOptions& opts) {
    const SpMat A = assemble_stiffness(mesh, gamma, opts.quad_order);
    const SpMat M = assemble_mass(mesh);
    return solve_dirichlet_assembled(A, M, lambda, g, mesh, opts);
}

double energy(const ScalarField& u, const SpMat& A) {
    return u.nodal.dot(A * u.nodal);
}

void dump_coordinate_format(const SpMat& A, std::ostream& os) {
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

} // namespace forge
