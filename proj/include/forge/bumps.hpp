#pragma once

#include <Eigen/Dense>
#include <vector>

#include "forge/conductivity.hpp"
#include "forge/geometry.hpp"
#include "forge/quadrature.hpp"

namespace forge {

/// Value and derivatives of the radial C-infinity bump
/// phi(x) = exp(-1 / (1 - |x - x0|^2 / rho^2)) inside the ball, 0 outside.
struct BumpEval {
    double value = 0.0;
    Vec3 grad = Vec3::Zero();
    Mat3 hess = Mat3::Zero();
};

BumpEval bump_eval(const Vec3& x, const Vec3& center, double rho);
ThirdTensor bump_third(const Vec3& x, const Vec3& center, double rho);

struct DictionaryOptions {
    int centers_per_axis = 11;
    double radius_factor = 4.0;   // rho = radius_factor * center spacing
    double panels_per_radius = 8; // quadrature panel width = rho / this
    int quad_points = 14;         // GL points per panel per axis
    int threads = 0;              // 0 = hardware
};

/// Smooth analytic dictionary of compactly supported radial bumps on a grid
/// strictly inside the domain: every support keeps at least `collar_width`
/// distance from the domain boundary. Carries the Gram data
///   K_ij = int gamma grad phi_i . grad phi_j,  M_ij = int phi_i phi_j,
///   b_i = int phi_i
/// computed with the dictionary's own fine quadrature.
class BumpDictionary {
public:
    static BumpDictionary build(const Box& domain, double collar_width,
                                const ConductivityField& gamma,
                                const DictionaryOptions& opts = {});

    int size() const { return static_cast<int>(centers_.size()); }
    const std::vector<Vec3>& centers() const { return centers_; }
    double rho() const { return rho_; }
    double collar_width() const { return collar_; }
    const Box& domain() const { return domain_; }
    /// Bounding box of the union of supports.
    const Box& support_box() const { return support_; }

    const Eigen::MatrixXd& K() const { return K_; }
    const Eigen::MatrixXd& M() const { return M_; }
    const Eigen::VectorXd& b() const { return b_; }

    /// Pointwise-smooth coefficient direction with b . r = 1 (an
    /// envelope-compensated plateau). Mean removal along it keeps expansions
    /// smooth, unlike the M-orthogonal direction which is violently
    /// oscillatory for overlapping atoms.
    const Eigen::VectorXd& mean_direction() const { return mean_dir_; }

    /// Centers whose support contains x (grid-pruned).
    void active_centers(const Vec3& x, std::vector<int>& out) const;

    /// Fine quadrature over the support box, matched to the Gram accuracy.
    CubeQuadrature support_quadrature(double panel_scale = 1.0) const;

    const DictionaryOptions& options() const { return opts_; }

private:
    Box domain_, inner_, support_;
    double collar_ = 0.0;
    double rho_ = 0.0;
    Vec3 spacing_ = Vec3::Zero();
    Vec3 grid_origin_ = Vec3::Zero();
    std::array<int, 3> grid_n_{0, 0, 0};
    std::vector<Vec3> centers_;
    Eigen::MatrixXd K_, M_;
    Eigen::VectorXd b_;
    Eigen::VectorXd mean_dir_;
    DictionaryOptions opts_;
};

/// u(x) = sum_j a_j phi_j(x). Flagged members of the constraint set X carry
/// b^T a = 0 and a^T M a = 1 exactly in the dictionary arithmetic.
struct BumpExpansion {
    const BumpDictionary* dict = nullptr;
    Eigen::VectorXd coef;

    double value(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
    Mat3 hessian(const Vec3& x) const;
    ThirdTensor third(const Vec3& x) const;

    double mean() const { return dict->b().dot(coef); }
    double norm_l2_sq() const { return coef.dot(dict->M() * coef); }
    double energy() const { return coef.dot(dict->K() * coef); }

    /// Sup-norm estimate on a dense sample grid over the support box.
    double sup_norm_estimate(int samples_per_axis = 64) const;

    /// Enforce b^T a = 0 and a^T M a = 1 exactly (projection + scaling).
    void project_to_constraints();
};

} // namespace forge
