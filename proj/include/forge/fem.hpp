#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

#include "forge/conductivity.hpp"
#include "forge/mesh.hpp"
#include "forge/solvers.hpp"

namespace forge {

/// P1 nodal field on a Mesh.
struct ScalarField {
    const Mesh* mesh = nullptr;
    Eigen::VectorXd nodal;

    double eval(const Vec3& x) const;
    Vec3 grad_in_tet(int t) const;
};

/// Stiffness A_ij = int gamma grad phi_i . grad phi_j, elementwise quadrature
/// of the given order (default 4, exact for constant gamma).
SpMat assemble_stiffness(const Mesh& mesh, const ConductivityField& gamma,
                         int quad_order = 4);

/// Consistent P1 mass matrix.
SpMat assemble_mass(const Mesh& mesh);

/// Lumped (row-sum) mass matrix.
SpMat assemble_lumped_mass(const Mesh& mesh);

/// b_i = int phi_i dx.
Eigen::VectorXd assemble_moments(const Mesh& mesh);

/// Restrict a square matrix over all nodes to the given index set.
SpMat restrict_matrix(const SpMat& A, const std::vector<int>& idx);

/// Single-element P1 stiffness / mass (test oracles and assembly share it).
Eigen::Matrix4d element_stiffness(const std::array<Vec3, 4>& verts,
                                  const Mat3& gamma_const);
Eigen::Matrix4d element_mass(const std::array<Vec3, 4>& verts);

enum class SolveMethod { Auto, Iterative, Direct };

struct DirichletOptions {
    double lambda = 0.0;
    double tol = 1e-10;
    int max_iterations = 20000;
    SolveMethod method = SolveMethod::Auto;
    int quad_order = 4;
};

/// Solve L_gamma u = lambda u in Omega, u = g on the boundary nodes.
/// `g` is indexed over all nodes; only boundary entries are read.
/// Throws ResonanceError when the shifted system is numerically singular.
ScalarField solve_dirichlet(const ConductivityField& gamma, double lambda,
                            const Eigen::VectorXd& g, const Mesh& mesh,
                            const DirichletOptions& opts = {});

/// Same, but with preassembled full-node stiffness/mass.
ScalarField solve_dirichlet_assembled(const SpMat& A, const SpMat& M,
                                      double lambda, const Eigen::VectorXd& g,
                                      const Mesh& mesh,
                                      const DirichletOptions& opts = {});

/// u^T A u for a full-node field and full-node stiffness.
double energy(const ScalarField& u, const SpMat& A);

/// Coordinate text dump (row col value per line).
void dump_coordinate_format(const SpMat& A, std::ostream& os);

} // namespace forge
