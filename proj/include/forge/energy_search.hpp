#pragma once

#include <optional>

#include "forge/bumps.hpp"
#include "forge/spectral.hpp"

namespace forge {

struct InfimumResult {
    double m = 0.0;
    BumpExpansion minimizer;
    /// Euclidean norm of the constraint-projected Rayleigh-quotient gradient.
    double stationarity = 0.0;
};

struct SweepResult {
    BumpExpansion v;
    double energy = 0.0;
    int modes_used = 0;
    double fit_residual = 0.0; // M-norm misfit of the eigenfunction projection
};

/// Search engine over one dictionary + spectrum. Caches the eigenfunction
/// projections and the dictionary pencil, which dominate the cost of repeated
/// targeting.
class EnergySearcher {
public:
    EnergySearcher(const BumpDictionary& dict, const SpectrumReport& spectrum,
                   const Mesh& mesh);

    /// Minimum of a^T K a over { b^T a = 0, a^T M a = 1 }: a generalized
    /// eigenproblem on the zero-mean subspace of the dictionary span.
    const InfimumResult& infimum() const;

    /// Combination v_k = (u_k - alpha_k u_1)/sqrt(1 + alpha_k^2) of discrete
    /// eigenfunctions projected (least squares) into the dictionary, swept
    /// over k until its energy meets tau; continues into the dictionary
    /// pencil's high modes when tau exceeds the FEM window.
    SweepResult sweep(double tau) const;

    /// Intermediate-value bisection on the normalized path from the
    /// constrained minimizer to the sweep output.
    BumpExpansion find(double tau, double rel_tol = 1e-8) const;

    const BumpDictionary& dictionary() const { return dict_; }

private:
    const BumpDictionary& dict_;
    const SpectrumReport& spectrum_;
    const Mesh& mesh_;

    struct Fit {
        Eigen::VectorXd coef;
        double relative_residual = 0.0;
    };
    const Fit& eigen_fit(int k) const;
    void ensure_pencil() const;

    mutable std::optional<InfimumResult> infimum_;
    mutable std::vector<std::optional<Fit>> fits_;
    mutable std::optional<Eigen::MatrixXd> pencil_basis_; // zero-mean basis
    mutable std::optional<Eigen::VectorXd> pencil_values_;
    mutable std::optional<Eigen::MatrixXd> pencil_vectors_;
};

/// One-shot helpers with the spec operation signatures.
InfimumResult constrained_infimum(const BumpDictionary& dict);
SweepResult upper_sweep(const BumpDictionary& dict,
                        const SpectrumReport& spectrum, const Mesh& mesh,
                        double tau);
BumpExpansion find_energy_function(const BumpDictionary& dict,
                                   const SpectrumReport& spectrum,
                                   const Mesh& mesh, double tau,
                                   double rel_tol = 1e-8);

/// Intermediate-value bisection between two members of X until
/// |energy - tau| <= rel_tol * tau.
BumpExpansion path_bisection(const BumpExpansion& lo_energy_end,
                             const BumpExpansion& hi_energy_end, double tau,
                             double rel_tol = 1e-8);

/// Envelope-compensated quasi-interpolant of a profile over the support box
/// (coefficients profile(c_j)/S(c_j) with S the atom sum, capped near the
/// support edge), projected onto X. Pointwise much smoother than fits or the
/// constrained minimizer; used where sup-norm bounds matter.
BumpExpansion quasi_interpolant(const BumpDictionary& dict,
                                const std::function<double(const Vec3&)>& profile);

/// Deterministic ladder of smooth X members with increasing energy:
/// level 0 is a step profile, higher levels add oscillation.
BumpExpansion smooth_member(const BumpDictionary& dict, int level);

/// Energy targeting along a path between smooth quasi-interpolated members
/// whenever they bracket tau; falls back to the minimizer/sweep path
/// otherwise. The pipeline uses this to keep sup norms of c and f small.
BumpExpansion find_energy_function_smooth(const EnergySearcher& searcher,
                                          double tau, double rel_tol = 1e-8);

struct AlphaChoice {
    double alpha = 0.0;
    double tau = 0.0;
};

/// Deterministic exponent choice: for lambda0 > 0 the largest alpha in
/// {1, 1/2, 1/4, ...} with alpha m/(2 alpha + 1) < lambda0; for lambda0 < 0
/// the analogous ladder in (-1/2, 0). Nudges away from the excluded value
/// 1/2 - 1/n. Guarantees tau = (2 alpha + 1) lambda0 / alpha > m.
AlphaChoice choose_alpha(double lambda0, double m, int n = 3);

} // namespace forge
