#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "forge/energy_search.hpp"
#include "forge/errors.hpp"

using namespace forge;

namespace {

struct Fixture {
    Mesh mesh = Mesh::build_box(8);
    IdentityConductivity id;
    BumpDictionary dict;
    SpectrumReport spectrum;
    EnergySearcher search;

    Fixture()
        : dict(BumpDictionary::build(Box::unit(), 2.0 / 8.0, id,
                                     [] {
                                         DictionaryOptions o;
                                         o.centers_per_axis = 4;
                                         return o;
                                     }())),
          spectrum(dirichlet_eigenpairs(id, mesh)),
          search(dict, spectrum, mesh) {}
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

} // namespace

TEST_CASE("constrained infimum: bracket, constraints, stationarity") {
    auto& f = fixture();
    const InfimumResult& inf = f.search.infimum();

    CHECK(inf.m > f.spectrum.eigenvalues[0]);
    CHECK(std::abs(inf.minimizer.mean()) <= 1e-12);
    CHECK(inf.minimizer.norm_l2_sq() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inf.minimizer.energy() == doctest::Approx(inf.m).epsilon(1e-10));
    CHECK(inf.stationarity <= 1e-8);

    // domain monotonicity: supports live in the inner box, so m dominates
    // the first Dirichlet eigenvalue of that box
    const double inner = 1.0 - 2.0 * f.dict.collar_width();
    CHECK(inf.m >= 3.0 * M_PI * M_PI / (inner * inner));
}

TEST_CASE("constrained infimum needs a nontrivial zero-mean subspace") {
    const IdentityConductivity id;
    DictionaryOptions o;
    o.centers_per_axis = 1;
    const BumpDictionary tiny = BumpDictionary::build(Box::unit(), 0.1, id, o);
    CHECK_THROWS_AS(constrained_infimum(tiny), InvalidInputError);
}

TEST_CASE("sweep formula is exact for eigen-exact inputs") {
    // with the dictionary pencil's own eigenpairs, the combination
    // v_k = (u_k - alpha_k u_1)/sqrt(1+alpha_k^2) has energy
    // (lambda_k + alpha_k^2 lambda_1)/(1 + alpha_k^2)
    auto& f = fixture();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(f.dict.K(),
                                                                  f.dict.M());
    REQUIRE(ges.info() == Eigen::Success);
    const Eigen::VectorXd a1 = ges.eigenvectors().col(0);
    const double b1 = f.dict.b().dot(a1);
    REQUIRE(std::abs(b1) > 1e-12); // ground state has nonzero mean
    for (int k : {1, 3, 7}) {
        const Eigen::VectorXd ak = ges.eigenvectors().col(k);
        const double alpha_k = f.dict.b().dot(ak) / b1;
        BumpExpansion vk{&f.dict,
                         (ak - alpha_k * a1) / std::sqrt(1 + alpha_k * alpha_k)};
        CHECK(std::abs(vk.mean()) <= 1e-10);
        CHECK(vk.norm_l2_sq() == doctest::Approx(1.0).epsilon(1e-10));
        const double expect =
            (ges.eigenvalues()[k] + alpha_k * alpha_k * ges.eigenvalues()[0]) /
            (1 + alpha_k * alpha_k);
        CHECK(vk.energy() == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("upper sweep reaches targets and stays in X") {
    auto& f = fixture();
    const double m = f.search.infimum().m;
    for (double factor : {1.5, 3.0, 8.0}) {
        const SweepResult s = f.search.sweep(factor * m);
        CHECK(s.energy >= factor * m);
        CHECK(std::abs(s.v.mean()) <= 1e-12);
        CHECK(s.v.norm_l2_sq() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(f.search.sweep(1e9), ConstructionError);
}

TEST_CASE("energy targeting via the intermediate-value path") {
    auto& f = fixture();
    const double m = f.search.infimum().m;

    // tau at the infimum returns the minimizer itself
    const BumpExpansion at_m = f.search.find(m);
    CHECK(at_m.energy() == doctest::Approx(m).epsilon(1e-8));

    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double tau = m * (1.0 + 9.0 * dist(rng));
        const BumpExpansion w = f.search.find(tau);
        CHECK(std::abs(w.energy() - tau) <= 1e-8 * tau);
        CHECK(std::abs(w.mean()) <= 1e-12);
        CHECK(w.norm_l2_sq() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("interval property between any two achieved energies") {
    auto& f = fixture();
    const double m = f.search.infimum().m;
    const BumpExpansion w1 = f.search.find(1.4 * m);
    const BumpExpansion w2 = f.search.find(6.0 * m);
    for (double s : {0.25, 0.5, 0.75}) {
        const double tau = (1 - s) * w1.energy() + s * w2.energy();
        const BumpExpansion w = path_bisection(w1, w2, tau);
        CHECK(std::abs(w.energy() - tau) <= 1e-8 * tau);
    }
}

TEST_CASE("alpha selection") {
    // worked example: lambda0 = 20, m = 59.2 -> alpha = 1,
    // alpha m/(2 alpha + 1) = 19.73 < 20, tau = 60
    const AlphaChoice a = choose_alpha(20.0, 59.2, 3);
    CHECK(a.alpha == doctest::Approx(1.0));
    CHECK(a.tau == doctest::Approx(60.0));
    CHECK(a.alpha * 59.2 / (2 * a.alpha + 1) < 20.0);

    // larger m forces a smaller ladder exponent
    const AlphaChoice b = choose_alpha(20.0, 133.0, 3);
    CHECK(b.alpha == doctest::Approx(0.125));
    CHECK(b.tau == doctest::Approx((2 * 0.125 + 1) * 20.0 / 0.125));
    CHECK(b.tau > 133.0);

    // negative frequency: alpha in (-1/2, 0), m alpha/(2 alpha + 1) in
    // (lambda0, 0)
    const AlphaChoice c = choose_alpha(-5.0, 59.2, 3);
    CHECK(c.alpha < 0.0);
    CHECK(c.alpha > -0.5);
    const double gate = 59.2 * c.alpha / (2 * c.alpha + 1);
    CHECK(gate > -5.0);
    CHECK(gate < 0.0);
    CHECK(c.tau > 59.2);

    // the excluded exponent 1/2 - 1/n is never returned
    for (double m : {30.0, 59.2, 133.0, 240.0, 1000.0}) {
        const AlphaChoice d = choose_alpha(20.0, m, 3);
        CHECK(std::abs(d.alpha - (0.5 - 1.0 / 3.0)) > 1e-12);
    }
    CHECK_THROWS_AS(choose_alpha(0.0, 59.2, 3), InvalidInputError);
}
