#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "forge/bumps.hpp"
#include "forge/errors.hpp"

using namespace forge;

TEST_CASE("bump derivatives match finite differences") {
    const Vec3 c(0.4, 0.5, 0.6);
    const double rho = 0.22;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 x = c + rho * Vec3(dist(rng), dist(rng), dist(rng));
        const BumpEval e = bump_eval(x, c, rho);
        for (int k = 0; k < 3; ++k) {
            Vec3 xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            const double fd =
                (bump_eval(xp, c, rho).value - bump_eval(xm, c, rho).value) /
                (2 * h);
            CHECK(e.grad[k] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            const Vec3 gp = bump_eval(xp, c, rho).grad;
            const Vec3 gm = bump_eval(xm, c, rho).grad;
            for (int l = 0; l < 3; ++l)
                CHECK(e.hess(l, k) ==
                      doctest::Approx((gp[l] - gm[l]) / (2 * h)).epsilon(1e-5).scale(1.0));
            const Mat3 hp = bump_eval(xp, c, rho).hess;
            const Mat3 hm = bump_eval(xm, c, rho).hess;
            const ThirdTensor t = bump_third(x, c, rho);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    CHECK(t[k](i, j) ==
                          doctest::Approx((hp(i, j) - hm(i, j)) / (2 * h))
                              .epsilon(1e-4)
                              .scale(10.0));
        }
    }
}

TEST_CASE("bump vanishes identically outside its support") {
    const Vec3 c(0.5, 0.5, 0.5);
    const double rho = 0.2;
    const BumpEval e = bump_eval(Vec3(0.5 + rho * 1.0001, 0.5, 0.5), c, rho);
    CHECK(e.value == 0.0);
    CHECK(e.grad.norm() == 0.0);
    CHECK(e.hess.norm() == 0.0);
}

namespace {

DictionaryOptions small_opts(int n) {
    DictionaryOptions o;
    o.centers_per_axis = n;
    return o;
}

} // namespace

TEST_CASE("dictionary geometry respects the collar") {
    const IdentityConductivity id;
    const double collar = 2.0 / 12.0;
    const BumpDictionary dict =
        BumpDictionary::build(Box::unit(), collar, id, small_opts(5));
    CHECK(dict.size() == 125);
    for (const Vec3& c : dict.centers()) {
        for (int ax = 0; ax < 3; ++ax) {
            CHECK(c[ax] - dict.rho() >= collar - 1e-12);
            CHECK(c[ax] + dict.rho() <= 1.0 - collar + 1e-12);
        }
    }
}

TEST_CASE("gram matrices: symmetry, definiteness, positive moments") {
    const IdentityConductivity id;
    const BumpDictionary dict =
        BumpDictionary::build(Box::unit(), 0.1, id, small_opts(3));
    const auto& K = dict.K();
    const auto& M = dict.M();
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(dict.b().minCoeff() > 0.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
    CHECK(em.eigenvalues().minCoeff() > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(K);
    CHECK(ek.eigenvalues().minCoeff() >= -1e-10 * ek.eigenvalues().maxCoeff());
}

TEST_CASE("gram quadrature is converged to 1e-10") {
    const IsotropicConductivity iso; // avoid the constant-gamma fast path
    DictionaryOptions coarse = small_opts(2);
    DictionaryOptions fine = small_opts(2);
    fine.panels_per_radius = 11;
    fine.quad_points = 16;
    const BumpDictionary d0 = BumpDictionary::build(Box::unit(), 0.12, iso, coarse);
    const BumpDictionary d1 = BumpDictionary::build(Box::unit(), 0.12, iso, fine);
    const double kscale = d1.K().cwiseAbs().maxCoeff();
    const double mscale = d1.M().cwiseAbs().maxCoeff();
    CHECK((d0.K() - d1.K()).cwiseAbs().maxCoeff() / kscale <= 1e-10);
    CHECK((d0.M() - d1.M()).cwiseAbs().maxCoeff() / mscale <= 1e-10);
    CHECK((d0.b() - d1.b()).cwiseAbs().maxCoeff() /
              d1.b().cwiseAbs().maxCoeff() <=
          1e-10);
}

TEST_CASE("constant-coefficient fast path agrees with the generic path") {
    // scaled identity hits the offset cache; a pointwise-identical custom
    // field goes through the generic pair loop
    struct IdentityClone final : ConductivityField {
        Mat3 eval(const Vec3&) const override { return 2.0 * Mat3::Identity(); }
        double lambda_min() const override { return 2.0; }
        double lambda_max() const override { return 2.0; }
        std::string tag() const override { return "identity-clone"; }
    } clone;
    const IdentityConductivity id2(2.0);
    const BumpDictionary fast =
        BumpDictionary::build(Box::unit(), 0.15, id2, small_opts(2));
    const BumpDictionary slow =
        BumpDictionary::build(Box::unit(), 0.15, clone, small_opts(2));
    CHECK((fast.K() - slow.K()).cwiseAbs().maxCoeff() <=
          1e-12 * fast.K().cwiseAbs().maxCoeff());
    CHECK((fast.M() - slow.M()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("expansion evaluation matches the naive sum and the gram data") {
    const IdentityConductivity id;
    const BumpDictionary dict =
        BumpDictionary::build(Box::unit(), 0.1, id, small_opts(3));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    BumpExpansion u{&dict, Eigen::VectorXd(dict.size())};
    for (int i = 0; i < dict.size(); ++i) u.coef[i] = dist(rng);

    std::uniform_real_distribution<double> pos(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 x(pos(rng), pos(rng), pos(rng));
        double naive = 0.0;
        Vec3 ng = Vec3::Zero();
        for (int j = 0; j < dict.size(); ++j) {
            const BumpEval e = bump_eval(x, dict.centers()[j], dict.rho());
            naive += u.coef[j] * e.value;
            ng += u.coef[j] * e.grad;
        }
        CHECK(u.value(x) == doctest::Approx(naive).epsilon(1e-13).scale(1.0));
        CHECK((u.gradient(x) - ng).norm() <= 1e-12 * std::max(1.0, ng.norm()));
    }

    // quadrature oracle for the gram-based mean, norm and energy
    const CubeQuadrature quad = dict.support_quadrature(0.75);
    double mean = 0.0, nrm2 = 0.0, en = 0.0;
    for (std::size_t p = 0; p < quad.points().size(); ++p) {
        const double v = u.value(quad.points()[p]);
        mean += quad.weights()[p] * v;
        nrm2 += quad.weights()[p] * v * v;
        en += quad.weights()[p] * u.gradient(quad.points()[p]).squaredNorm();
    }
    CHECK(u.mean() == doctest::Approx(mean).epsilon(1e-8).scale(1e-4));
    CHECK(u.norm_l2_sq() == doctest::Approx(nrm2).epsilon(1e-8));
    CHECK(u.energy() == doctest::Approx(en).epsilon(1e-8));
}

TEST_CASE("constraint projection is exact in dictionary arithmetic") {
    const IdentityConductivity id;
    const BumpDictionary dict =
        BumpDictionary::build(Box::unit(), 0.1, id, small_opts(3));
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        BumpExpansion u{&dict, Eigen::VectorXd(dict.size())};
        for (int i = 0; i < dict.size(); ++i) u.coef[i] = dist(rng);
        u.project_to_constraints();
        CHECK(std::abs(u.mean()) <= 1e-12);
        CHECK(u.norm_l2_sq() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("collar exhausting the domain is rejected") {
    const IdentityConductivity id;
    CHECK_THROWS_AS(BumpDictionary::build(Box::unit(), 0.5, id, small_opts(3)),
                    InvalidInputError);
}
