#include "forge/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

#include "forge/errors.hpp"

namespace forge {

ScalarField SpectrumReport::eigenfunction(const Mesh& mesh, int j) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (std::size_t i = 0; i < interior_nodes.size(); ++i)
        full[interior_nodes[i]] = vectors(static_cast<Eigen::Index>(i), j);
    return ScalarField{&mesh, full};
}

namespace {

// M-orthonormalize the columns of X in place (Cholesky of the Gram matrix).
void m_orthonormalize(Eigen::MatrixXd& X, const SpMat& M) {
    const Eigen::MatrixXd G = X.transpose() * (M * X);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
        // nearly dependent block: fall back to eigen-based whitening
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        Eigen::VectorXd d = es.eigenvalues().cwiseMax(1e-14);
        X = X * es.eigenvectors() * d.cwiseInverse().cwiseSqrt().asDiagonal();
        return;
    }
    X = llt.matrixU().solve<Eigen::OnTheRight>(X);
}

struct IterationCore {
    const SpMat& A;
    const SpMat& M;
    Eigen::SimplicialLLT<SpMat> llt;

    explicit IterationCore(const SpMat& A_, const SpMat& M_) : A(A_), M(M_) {
        llt.compute(A);
        if (llt.info() != Eigen::Success)
            throw SolverError("eigensolver: stiffness factorization failed "
                              "(interior stiffness not SPD?)");
    }
};

Eigen::MatrixXd seeded_start(Eigen::Index n, int q, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd X(n, q);
    for (Eigen::Index j = 0; j < q; ++j)
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = dist(rng);
    return X;
}

} // namespace

SpectrumReport eigenpairs_assembled(const SpMat& A_II, const SpMat& M_II,
                                    const std::vector<int>& interior_nodes,
                                    const EigenOptions& opts) {
    const Eigen::Index n = A_II.rows();
    const int k = opts.count;
    if (k < 2) throw InvalidInputError("dirichlet_eigenpairs: count >= 2");
    if (n < 2 * k)
        throw InvalidInputError("dirichlet_eigenpairs: mesh too coarse for "
                                "the requested spectral window");
    const int q = std::min<Eigen::Index>(n, k + opts.extra);

    IterationCore core(A_II, M_II);
    Eigen::MatrixXd X = seeded_start(n, q, opts.seed);

    Eigen::VectorXd theta;
    double worst = 0.0;
    std::vector<double> residual_history;
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::MatrixXd Y = core.llt.solve(M_II * X);
        m_orthonormalize(Y, M_II);
        const Eigen::MatrixXd H = Y.transpose() * (A_II * Y);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (H + H.transpose()));
        X = Y * es.eigenvectors();
        theta = es.eigenvalues();

        worst = 0.0;
        for (int j = 0; j < k; ++j) {
            const Eigen::VectorXd r =
                A_II * X.col(j) - theta[j] * (M_II * X.col(j));
            worst = std::max(worst, r.norm() / std::abs(theta[j]));
        }
        residual_history.push_back(worst);
        if (worst <= opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::string hist;
        for (std::size_t i = residual_history.size() > 6
                                 ? residual_history.size() - 6
                                 : 0;
             i < residual_history.size(); ++i)
            hist += " " + std::to_string(residual_history[i]);
        throw SolverError("eigensolver did not converge; residual history:" +
                          hist);
    }

    SpectrumReport rep;
    rep.eigenvalues = theta.head(k);
    rep.vectors = X.leftCols(k);
    rep.interior_nodes = interior_nodes;
    rep.max_relative_residual = worst;

    // fixed-sign ground state
    double s = rep.vectors.col(0).sum();
    if (s < 0) rep.vectors.col(0) *= -1.0;
    return rep;
}

SpectrumReport dirichlet_eigenpairs(const ConductivityField& gamma,
                                    const Mesh& mesh,
                                    const EigenOptions& opts) {
    const SpMat A = assemble_stiffness(mesh, gamma);
    const SpMat M = assemble_mass(mesh);
    const auto& inodes = mesh.interior_nodes();
    return eigenpairs_assembled(restrict_matrix(A, inodes),
                                restrict_matrix(M, inodes), inodes, opts);
}

bool certify_gap(double lambda, const SpectrumReport& report, double tol) {
    const double top = report.eigenvalues[report.count() - 1];
    if (lambda >= top - tol)
        throw SpectralWindowError(
            "certify_gap: frequency beyond the computed spectral window; "
            "request more eigenvalues");
    return report.gap(lambda) > tol;
}

std::pair<double, Eigen::VectorXd> fem_constrained_infimum(
    const SpMat& A_II, const SpMat& M_II, const Eigen::VectorXd& moments_I,
    const EigenOptions& opts) {
    const Eigen::VectorXd c = moments_I / moments_I.norm();
    auto project = [&](Eigen::MatrixXd& X) { X -= c * (c.transpose() * X); };

    // Start from the projected low eigenvectors: the constrained minimizer
    // is a combination of the lowest modes weighted by their mean values.
    std::vector<int> dummy(A_II.rows());
    SpectrumReport rep = eigenpairs_assembled(A_II, M_II, dummy, opts);
    Eigen::MatrixXd S = rep.vectors;
    project(S);

    IterationCore core(A_II, M_II);
    // Rank-revealing Rayleigh-Ritz: whitening of the M Gram matrix with hard
    // truncation of nearly dependent directions, so roundoff components never
    // get amplified out of the constraint plane.
    auto constrained_min = [&](const Eigen::MatrixXd& span)
        -> std::pair<double, Eigen::VectorXd> {
        const Eigen::MatrixXd G = span.transpose() * (M_II * span);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(
            0.5 * (G + G.transpose()));
        const double gmax = gs.eigenvalues().maxCoeff();
        std::vector<int> keep;
        for (int i = 0; i < gs.eigenvalues().size(); ++i)
            if (gs.eigenvalues()[i] > 1e-10 * gmax) keep.push_back(i);
        Eigen::MatrixXd W(span.cols(), keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i)
            W.col(i) = gs.eigenvectors().col(keep[i]) /
                       std::sqrt(gs.eigenvalues()[keep[i]]);
        const Eigen::MatrixXd Z = span * W;
        const Eigen::MatrixXd H = Z.transpose() * (A_II * Z);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            0.5 * (H + H.transpose()));
        Eigen::VectorXd u = Z * es.eigenvectors().col(0);
        return {es.eigenvalues()[0], u};
    };

    auto [m, u] = constrained_min(S);
    // mop up the tail outside the spectral window with constrained inverse
    // iteration
    for (int it = 0; it < 40; ++it) {
        Eigen::MatrixXd y = core.llt.solve(M_II * u);
        project(y);
        Eigen::MatrixXd span(S.rows(), S.cols() + 1);
        span << S, y;
        auto [m2, u2] = constrained_min(span);
        const bool done = std::abs(m2 - m) <= 1e-13 * std::abs(m2);
        m = m2;
        u = u2;
        S = std::move(span);
        if (done) break;
    }
    const double norm = std::sqrt(u.dot(M_II * u));
    u /= norm;
    return {u.dot(A_II * u), u};
}

} // namespace forge
