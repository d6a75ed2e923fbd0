#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forge/quadrature.hpp"

using namespace forge;

namespace {

// exact integral of x^a y^b z^c over the reference tetrahedron:
// a! b! c! / (a+b+c+3)!
double simplex_monomial(int a, int b, int c) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    return fact(a) * fact(b) * fact(c) / fact(a + b + c + 3);
}

double tet_quad_monomial(int order, int a, int b, int c) {
    const auto& rule = tet_rule(order);
    double acc = 0.0;
    for (const auto& qp : rule) {
        const double x = qp.bary[1], y = qp.bary[2], z = qp.bary[3];
        acc += qp.weight * std::pow(x, a) * std::pow(y, b) * std::pow(z, c);
    }
    return acc / 6.0; // reference volume
}

} // namespace

TEST_CASE("tet rules integrate monomials to their stated degree") {
    for (const auto& qp : tet_rule(4)) CHECK(qp.weight > 0.0);

    // order-4 rule: exact to total degree 5
    for (int d = 0; d <= 5; ++d)
        for (int a = 0; a <= d; ++a)
            for (int b = 0; a + b <= d; ++b) {
                const int c = d - a - b;
                CHECK(tet_quad_monomial(4, a, b, c) ==
                      doctest::Approx(simplex_monomial(a, b, c)).epsilon(1e-12));
            }
    // centroid rule: degree 1
    CHECK(tet_quad_monomial(1, 1, 0, 0) ==
          doctest::Approx(simplex_monomial(1, 0, 0)).epsilon(1e-13));
    // 4-point rule: degree 2
    CHECK(tet_quad_monomial(2, 1, 1, 0) ==
          doctest::Approx(simplex_monomial(1, 1, 0)).epsilon(1e-13));
}

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1") {
    const GaussLegendre gl(5);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += gl.weights[i] * std::pow(gl.nodes[i], 8);
    CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
    double total = 0.0;
    for (double w : gl.weights) total += w;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("composite cube quadrature on smooth functions") {
    const Box box{{0, 0, 0}, {1, 1, 1}};
    const CubeQuadrature quad(box, 4, 6);
    CHECK(quad.integrate([](const Vec3&) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-14));
    const double val = quad.integrate([](const Vec3& x) {
        return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]) * std::sin(M_PI * x[2]);
    });
    const double exact = std::pow(2.0 / M_PI, 3);
    CHECK(val == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("cube quadrature at panel width rho/4 resolves a bump to 1e-10") {
    // integrand with all derivatives vanishing at the support boundary;
    // radius 0.4, so 8 panels over the 0.8 box give panel width rho/4
    auto bump = [](const Vec3& x) {
        const double r2 = (x - Vec3(0.5, 0.5, 0.5)).squaredNorm() / 0.16;
        return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    };
    const Box box{{0.1, 0.1, 0.1}, {0.9, 0.9, 0.9}};
    const double work = CubeQuadrature(box, 8, 10).integrate(bump);
    const double fine = CubeQuadrature(box, 16, 12).integrate(bump);
    CHECK(std::abs(work - fine) <= 1e-10 * std::abs(fine));
}
