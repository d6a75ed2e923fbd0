#pragma once

#include <Eigen/Sparse>
#include <string>

#include "forge/geometry.hpp"

namespace forge {

using SpMat = Eigen::SparseMatrix<double>;

struct IterativeResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
    std::string method;
};

/// Conjugate gradients with Jacobi preconditioning for SPD systems.
/// Reports (does not throw) when negative curvature is met so callers can
/// fall back to MINRES for indefinite shifts.
IterativeResult pcg(const SpMat& A, const Eigen::VectorXd& b, double tol,
                    int maxit, bool* indefinite = nullptr);

/// MINRES with |diag| Jacobi preconditioning for symmetric (indefinite)
/// systems.
IterativeResult minres(const SpMat& A, const Eigen::VectorXd& b, double tol,
                       int maxit);

/// PCG first; on detected indefiniteness restart with MINRES.
IterativeResult solve_symmetric(const SpMat& A, const Eigen::VectorXd& b,
                                double tol, int maxit);

} // namespace forge
