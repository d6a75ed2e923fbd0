#pragma once

#include <array>
#include <memory>
#include <string>

#include "forge/geometry.hpp"

namespace forge {

/// Symmetric positive-definite matrix-valued coefficient of L_gamma.
/// Analytic implementations also expose entrywise first (and optionally
/// second) derivatives so that div(gamma grad c) and its gradient are
/// computable pointwise from a scalar's derivatives.
class ConductivityField {
public:
    virtual ~ConductivityField() = default;

    virtual Mat3 eval(const Vec3& x) const = 0;

    /// grad()[k](i,j) = d gamma_ij / d x_k. Defaults to zero (constant field).
    virtual std::array<Mat3, 3> grad(const Vec3&) const {
        return {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    }

    /// hess()[k][l](i,j) = d^2 gamma_ij / d x_k d x_l (symmetric in k,l).
    virtual std::array<std::array<Mat3, 3>, 3> hess(const Vec3&) const {
        std::array<std::array<Mat3, 3>, 3> h;
        for (auto& row : h)
            for (auto& m : row) m = Mat3::Zero();
        return h;
    }

    /// Whether grad()/hess() carry real data (pushforward fields do not).
    virtual bool has_derivatives() const { return true; }

    /// Uniform ellipticity bounds over the domain of interest.
    virtual double lambda_min() const = 0;
    virtual double lambda_max() const = 0;

    virtual std::string tag() const = 0;

    /// div(gamma grad c)(x) from the gradient and Hessian of a scalar c.
    double divergence_apply(const Vec3& x, const Vec3& grad_c,
                            const SymHess& hess_c) const;

    /// Gradient of div(gamma grad c) at x; needs third derivatives of c and
    /// second derivatives of gamma.
    Vec3 divergence_apply_grad(const Vec3& x, const Vec3& grad_c,
                               const SymHess& hess_c,
                               const ThirdTensor& third_c) const;
};

using ConductivityPtr = std::shared_ptr<const ConductivityField>;

/// gamma = s * I.
class IdentityConductivity final : public ConductivityField {
public:
    explicit IdentityConductivity(double scale = 1.0) : s_(scale) {}
    Mat3 eval(const Vec3&) const override { return s_ * Mat3::Identity(); }
    double lambda_min() const override { return s_; }
    double lambda_max() const override { return s_; }
    std::string tag() const override { return "identity"; }

private:
    double s_;
};

/// gamma = a(x) I with a(x) = base + amp * sin(pi x) sin(pi y) sin(pi z).
class IsotropicConductivity final : public ConductivityField {
public:
    IsotropicConductivity(double base = 1.0, double amp = 0.3);
    Mat3 eval(const Vec3& x) const override;
    std::array<Mat3, 3> grad(const Vec3& x) const override;
    std::array<std::array<Mat3, 3>, 3> hess(const Vec3& x) const override;
    double lambda_min() const override { return base_ - std::abs(amp_); }
    double lambda_max() const override { return base_ + std::abs(amp_); }
    std::string tag() const override { return "isotropic"; }

    double scalar(const Vec3& x) const;
    Vec3 scalar_grad(const Vec3& x) const;

private:
    double base_, amp_;
};

/// Smooth anisotropic example: I + amp * (p(x) S12 + q(x) S13 + r(x) D).
class AnisotropicConductivity final : public ConductivityField {
public:
    explicit AnisotropicConductivity(double amp = 0.15);
    Mat3 eval(const Vec3& x) const override;
    std::array<Mat3, 3> grad(const Vec3& x) const override;
    std::array<std::array<Mat3, 3>, 3> hess(const Vec3& x) const override;
    double lambda_min() const override { return 1.0 - 3.0 * std::abs(amp_); }
    double lambda_max() const override { return 1.0 + 3.0 * std::abs(amp_); }
    std::string tag() const override { return "anisotropic"; }

private:
    double amp_;
};

/// s * gamma (the beta rescaling).
class ScaledConductivity final : public ConductivityField {
public:
    ScaledConductivity(ConductivityPtr base, double s) : base_(std::move(base)), s_(s) {}
    Mat3 eval(const Vec3& x) const override { return s_ * base_->eval(x); }
    std::array<Mat3, 3> grad(const Vec3& x) const override;
    std::array<std::array<Mat3, 3>, 3> hess(const Vec3& x) const override;
    bool has_derivatives() const override { return base_->has_derivatives(); }
    double lambda_min() const override { return s_ * base_->lambda_min(); }
    double lambda_max() const override { return s_ * base_->lambda_max(); }
    std::string tag() const override { return base_->tag() + "*scaled"; }
    double scale() const { return s_; }
    const ConductivityPtr& base() const { return base_; }

private:
    ConductivityPtr base_;
    double s_;
};

/// Built-in lookup used by config files: "identity", "isotropic", "anisotropic".
ConductivityPtr make_builtin_conductivity(const std::string& name,
                                          double param = 0.0);

} // namespace forge
