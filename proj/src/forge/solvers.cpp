#include "forge/solvers.hpp"

#include <cmath>

namespace forge {

namespace {

Eigen::VectorXd jacobi_diag(const SpMat& A, bool absolute) {
    Eigen::VectorXd d = A.diagonal();
    for (int i = 0; i < d.size(); ++i) {
        double v = absolute ? std::abs(d[i]) : d[i];
        d[i] = v > 1e-300 ? 1.0 / v : 1.0;
    }
    return d;
}

} // namespace

IterativeResult pcg(const SpMat& A, const Eigen::VectorXd& b, double tol,
                    int maxit, bool* indefinite) {
    IterativeResult res;
    res.method = "pcg";
    if (indefinite) *indefinite = false;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x = Eigen::VectorXd::Zero(b.size());
        res.converged = true;
        return res;
    }
    const Eigen::VectorXd dinv = jacobi_diag(A, false);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = dinv.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    for (int it = 0; it < maxit; ++it) {
        const Eigen::VectorXd Ap = A * p;
        const double pAp = p.dot(Ap);
        if (pAp <= 0.0) {
            // negative curvature: matrix is not SPD on this subspace
            if (indefinite) *indefinite = true;
            res.x = x;
            res.iterations = it;
            res.relative_residual = r.norm() / bnorm;
            return res;
        }
        const double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        const double rn = r.norm() / bnorm;
        if (rn <= tol) {
            res.x = x;
            res.iterations = it + 1;
            res.relative_residual = rn;
            res.converged = true;
            return res;
        }
        z = dinv.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    res.x = x;
    res.iterations = maxit;
    res.relative_residual = r.norm() / bnorm;
    return res;
}

// Preconditioned MINRES after Paige & Saunders, |diag| Jacobi preconditioner.
IterativeResult minres(const SpMat& A, const Eigen::VectorXd& b, double tol,
                       int maxit) {
    IterativeResult res;
    res.method = "minres";
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x = Eigen::VectorXd::Zero(b.size());
        res.converged = true;
        return res;
    }
    const Eigen::VectorXd minv = jacobi_diag(A, true);
    const Eigen::Index n = b.size();

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r1 = b;
    Eigen::VectorXd r2 = b;
    Eigen::VectorXd y = minv.cwiseProduct(b);
    const double beta1 = std::sqrt(b.dot(y));
    if (beta1 == 0.0) {
        res.x = x;
        res.converged = true;
        return res;
    }

    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
    double phibar = beta1, cs = -1.0, sn = 0.0, oldeps = 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w2 = Eigen::VectorXd::Zero(n);

    for (int it = 1; it <= maxit; ++it) {
        const Eigen::VectorXd v = y / beta;
        y = A * v;
        if (it >= 2) y -= (beta / oldb) * r1;
        const double alfa = v.dot(y);
        y -= (alfa / beta) * r2;
        r1 = r2;
        r2 = y;
        y = minv.cwiseProduct(r2);
        oldb = beta;
        beta = std::sqrt(std::max(0.0, r2.dot(y)));

        oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::hypot(gbar, beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        const Eigen::VectorXd w1 = w2;
        w2 = w;
        w = (v - oldeps * w1 - delta * w2) / gamma;
        x += phi * w;

        if (phibar / beta1 <= 0.5 * tol || beta == 0.0) {
            const double true_res = (b - A * x).norm() / bnorm;
            if (true_res <= tol) {
                res.x = x;
                res.iterations = it;
                res.relative_residual = true_res;
                res.converged = true;
                return res;
            }
        }
    }
    res.x = x;
    res.iterations = maxit;
    res.relative_residual = (b - A * x).norm() / bnorm;
    res.converged = res.relative_residual <= tol;
    return res;
}

IterativeResult solve_symmetric(const SpMat& A, const Eigen::VectorXd& b,
                                double tol, int maxit) {
    bool indefinite = false;
    IterativeResult r = pcg(A, b, tol, maxit, &indefinite);
    if (r.converged) return r;
    return minres(A, b, tol, maxit);
}

} // namespace forge
