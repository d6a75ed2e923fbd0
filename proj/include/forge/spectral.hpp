#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "forge/fem.hpp"
#include "forge/mesh.hpp"

namespace forge {

/// Lowest Dirichlet eigenpairs of L_gamma on a mesh, M-orthonormal vectors
/// over interior nodes, with certified residuals.
struct SpectrumReport {
    Eigen::VectorXd eigenvalues;     // nondecreasing
    Eigen::MatrixXd vectors;         // interior dofs x k, M-orthonormal
    std::vector<int> interior_nodes; // dof -> mesh vertex
    double max_relative_residual = 0.0;

    double gap(double lambda) const {
        return (eigenvalues.array() - lambda).abs().minCoeff();
    }
    int count() const { return static_cast<int>(eigenvalues.size()); }
    ScalarField eigenfunction(const Mesh& mesh, int j) const;
};

struct EigenOptions {
    int count = 12;
    int extra = 12;          // subspace buffer
    double tol = 1e-8;       // ||A u - l M u|| <= tol * l * ||u||_M
    int max_iterations = 400;
    std::uint64_t seed = 20240601ull;
};

/// Shift-invert (shift 0) subspace iteration for the generalized pencil
/// (A, M) restricted to interior nodes.
SpectrumReport dirichlet_eigenpairs(const ConductivityField& gamma,
                                    const Mesh& mesh,
                                    const EigenOptions& opts = {});

/// Same on preassembled interior blocks.
SpectrumReport eigenpairs_assembled(const SpMat& A_II, const SpMat& M_II,
                                    const std::vector<int>& interior_nodes,
                                    const EigenOptions& opts = {});

/// True iff min_j |lambda - lambda_j| > tol. Throws SpectralWindowError when
/// lambda is not safely inside the computed window.
bool certify_gap(double lambda, const SpectrumReport& report, double tol);

/// Minimum of u^T A u over { u interior, u^T M u = 1, moments^T u = 0 }:
/// the discrete constrained numerical-range infimum at FEM level.
/// Returns (m, minimizer over interior dofs).
std::pair<double, Eigen::VectorXd> fem_constrained_infimum(
    const SpMat& A_II, const SpMat& M_II, const Eigen::VectorXd& moments_I,
    const EigenOptions& opts = {});

} // namespace forge
