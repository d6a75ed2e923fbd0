#include "forge/conductivity.hpp"

#include <cmath>

#include "forge/errors.hpp"

namespace forge {

double ConductivityField::divergence_apply(const Vec3& x, const Vec3& grad_c,
                                           const SymHess& hess_c) const {
    const Mat3 g = eval(x);
    double out = (g.array() * hess_c.array()).sum();
    if (has_derivatives()) {
        const auto dg = grad(x);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out += dg[i](i, j) * grad_c[j];
    }
    return out;
}

Vec3 ConductivityField::divergence_apply_grad(const Vec3& x, const Vec3& grad_c,
                                              const SymHess& hess_c,
                                              const ThirdTensor& third_c) const {
    const Mat3 g = eval(x);
    const auto dg = grad(x);
    const auto d2g = hess(x);
    Vec3 out = Vec3::Zero();
    // d/dx_k [ d_i gamma_ij d_j c + gamma_ij d_ij c ]
    for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                acc += d2g[i][k](i, j) * grad_c[j];
                acc += dg[i](i, j) * hess_c(j, k);
                acc += dg[k](i, j) * hess_c(i, j);
                acc += g(i, j) * third_c[k](i, j);
            }
        out[k] = acc;
    }
    return out;
}

namespace {

// value/grad/hess of sin(pi x) sin(pi y) sin(pi z)
struct TripleSine {
    double v;
    Vec3 g;
    Mat3 h;
    explicit TripleSine(const Vec3& x) {
        const double s0 = std::sin(M_PI * x[0]), c0 = std::cos(M_PI * x[0]);
        const double s1 = std::sin(M_PI * x[1]), c1 = std::cos(M_PI * x[1]);
        const double s2 = std::sin(M_PI * x[2]), c2 = std::cos(M_PI * x[2]);
        v = s0 * s1 * s2;
        g = M_PI * Vec3(c0 * s1 * s2, s0 * c1 * s2, s0 * s1 * c2);
        const double p2 = M_PI * M_PI;
        h(0, 0) = -p2 * v;
        h(1, 1) = -p2 * v;
        h(2, 2) = -p2 * v;
        h(0, 1) = h(1, 0) = p2 * c0 * c1 * s2;
        h(0, 2) = h(2, 0) = p2 * c0 * s1 * c2;
        h(1, 2) = h(2, 1) = p2 * s0 * c1 * c2;
    }
};

// scalar with separable trig factors per axis: prod_i f_i(x_i),
// f in {sin(k pi x), cos(k pi x)}
struct TrigProduct {
    std::array<int, 3> kind; // 0 = sin, 1 = cos
    std::array<double, 3> freq;

    double f(int ax, double t, int deriv) const {
        const double w = freq[ax] * M_PI;
        const double a = w * t;
        const double base = kind[ax] == 0 ? std::sin(a) : std::cos(a);
        const double d1 = kind[ax] == 0 ? std::cos(a) : -std::sin(a);
        switch (deriv) {
            case 0: return base;
            case 1: return w * d1;
            default: return -w * w * base;
        }
    }
    double value(const Vec3& x) const {
        return f(0, x[0], 0) * f(1, x[1], 0) * f(2, x[2], 0);
    }
    Vec3 gradient(const Vec3& x) const {
        Vec3 g;
        for (int k = 0; k < 3; ++k) {
            g[k] = 1.0;
            for (int ax = 0; ax < 3; ++ax) g[k] *= f(ax, x[ax], ax == k ? 1 : 0);
        }
        return g;
    }
    Mat3 hessian(const Vec3& x) const {
        Mat3 h;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                double acc = 1.0;
                for (int ax = 0; ax < 3; ++ax) {
                    int d = (ax == k) + (ax == l);
                    acc *= f(ax, x[ax], d);
                }
                h(k, l) = acc;
            }
        return h;
    }
};

const TrigProduct kAnisoP{{0, 1, 0}, {1.0, 1.0, 1.0}}; // sin cos sin
const TrigProduct kAnisoQ{{1, 0, 0}, {1.0, 1.0, 2.0}}; // cos sin sin(2.)
const TrigProduct kAnisoR{{0, 0, 1}, {2.0, 1.0, 1.0}}; // sin(2.) sin cos

const Mat3 kS12 = (Mat3() << 0, 1, 0, 1, 0, 0, 0, 0, 0).finished();
const Mat3 kS13 = (Mat3() << 0, 0, 1, 0, 0, 0, 1, 0, 0).finished();
const Mat3 kD = (Mat3() << 1, 0, 0, 0, 0, 0, 0, 0, -1).finished();

} // namespace

IsotropicConductivity::IsotropicConductivity(double base, double amp)
    : base_(base), amp_(amp) {
    if (base - std::abs(amp) <= 0.0)
        throw InvalidInputError("isotropic conductivity not uniformly elliptic");
}

double IsotropicConductivity::scalar(const Vec3& x) const {
    return base_ + amp_ * TripleSine(x).v;
}

Vec3 IsotropicConductivity::scalar_grad(const Vec3& x) const {
    return amp_ * TripleSine(x).g;
}

Mat3 IsotropicConductivity::eval(const Vec3& x) const {
    return scalar(x) * Mat3::Identity();
}

std::array<Mat3, 3> IsotropicConductivity::grad(const Vec3& x) const {
    const Vec3 g = amp_ * TripleSine(x).g;
    return {g[0] * Mat3::Identity(), g[1] * Mat3::Identity(),
            g[2] * Mat3::Identity()};
}

std::array<std::array<Mat3, 3>, 3> IsotropicConductivity::hess(const Vec3& x) const {
    const Mat3 h = amp_ * TripleSine(x).h;
    std::array<std::array<Mat3, 3>, 3> out;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) out[k][l] = h(k, l) * Mat3::Identity();
    return out;
}

AnisotropicConductivity::AnisotropicConductivity(double amp) : amp_(amp) {
    if (1.0 - 3.0 * std::abs(amp) <= 0.0)
        throw InvalidInputError("anisotropic conductivity not uniformly elliptic");
}

Mat3 AnisotropicConductivity::eval(const Vec3& x) const {
    return Mat3::Identity() + amp_ * (kAnisoP.value(x) * kS12 +
                                      kAnisoQ.value(x) * kS13 +
                                      kAnisoR.value(x) * kD);
}

std::array<Mat3, 3> AnisotropicConductivity::grad(const Vec3& x) const {
    const Vec3 gp = kAnisoP.gradient(x);
    const Vec3 gq = kAnisoQ.gradient(x);
    const Vec3 gr = kAnisoR.gradient(x);
    std::array<Mat3, 3> out;
    for (int k = 0; k < 3; ++k)
        out[k] = amp_ * (gp[k] * kS12 + gq[k] * kS13 + gr[k] * kD);
    return out;
}

std::array<std::array<Mat3, 3>, 3> AnisotropicConductivity::hess(const Vec3& x) const {
    const Mat3 hp = kAnisoP.hessian(x);
    const Mat3 hq = kAnisoQ.hessian(x);
    const Mat3 hr = kAnisoR.hessian(x);
    std::array<std::array<Mat3, 3>, 3> out;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            out[k][l] = amp_ * (hp(k, l) * kS12 + hq(k, l) * kS13 + hr(k, l) * kD);
    return out;
}

std::array<Mat3, 3> ScaledConductivity::grad(const Vec3& x) const {
    auto g = base_->grad(x);
    for (auto& m : g) m *= s_;
    return g;
}

std::array<std::array<Mat3, 3>, 3> ScaledConductivity::hess(const Vec3& x) const {
    auto h = base_->hess(x);
    for (auto& row : h)
        for (auto& m : row) m *= s_;
    return h;
}

ConductivityPtr make_builtin_conductivity(const std::string& name, double param) {
    if (name == "identity")
        return std::make_shared<IdentityConductivity>(param > 0 ? param : 1.0);
    if (name == "isotropic")
        return std::make_shared<IsotropicConductivity>(1.0, param != 0 ? param : 0.3);
    if (name == "anisotropic")
        return std::make_shared<AnisotropicConductivity>(param != 0 ? param : 0.15);
    throw InvalidInputError("unknown conductivity: " + name);
}

} // namespace forge
