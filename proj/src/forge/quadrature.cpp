#include "forge/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace forge {

namespace {

std::vector<TetQuadPoint> make_order1() {
    return {{{0.25, 0.25, 0.25, 0.25}, 1.0}};
}

std::vector<TetQuadPoint> make_order2() {
    const double a = 0.5854101966249685;
    const double b = 0.1381966011250105;
    std::vector<TetQuadPoint> pts;
    for (int i = 0; i < 4; ++i) {
        std::array<double, 4> bc{b, b, b, b};
        bc[i] = a;
        pts.push_back({bc, 0.25});
    }
    return pts;
}

// Keast 14-point rule, degree 5, all weights positive.
std::vector<TetQuadPoint> make_order4() {
    std::vector<TetQuadPoint> pts;
    auto add_s31 = [&](double b, double w) {
        const double a = 1.0 - 3.0 * b;
        for (int i = 0; i < 4; ++i) {
            std::array<double, 4> bc{b, b, b, b};
            bc[i] = a;
            pts.push_back({bc, w});
        }
    };
    auto add_s22 = [&](double c, double w) {
        const double d = 0.5 - c;
        const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        for (auto& p : pairs) {
            std::array<double, 4> bc{d, d, d, d};
            bc[p[0]] = c;
            bc[p[1]] = c;
            pts.push_back({bc, w});
        }
    };
    add_s31(0.0927352503108912, 0.0734930431163619);
    add_s31(0.3108859192633005, 0.1126879257180162);
    add_s22(0.0455037041256497, 0.0425460207770812);
    return pts;
}

} // namespace

const std::vector<TetQuadPoint>& tet_rule(int order) {
    static const std::vector<TetQuadPoint> r1 = make_order1();
    static const std::vector<TetQuadPoint> r2 = make_order2();
    static const std::vector<TetQuadPoint> r4 = make_order4();
    if (order <= 1) return r1;
    if (order <= 3) return r2;
    return r4;
}

GaussLegendre::GaussLegendre(int npoints) {
    if (npoints < 1) throw std::invalid_argument("GaussLegendre: npoints >= 1");
    nodes.resize(npoints);
    weights.resize(npoints);
    // Newton iteration on Legendre polynomials, symmetric pairs.
    const int m = (npoints + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (npoints + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < npoints; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = npoints * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[npoints - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[npoints - 1 - i] = weights[i];
    }
}

CubeQuadrature::CubeQuadrature(const Box& box, int panels, int points)
    : CubeQuadrature(box, std::array<int, 3>{panels, panels, panels}, points) {}

CubeQuadrature::CubeQuadrature(const Box& box, const std::array<int, 3>& panels,
                               int points) {
    if (panels[0] < 1 || panels[1] < 1 || panels[2] < 1 || points < 1)
        throw std::invalid_argument("CubeQuadrature: panels/points >= 1");
    GaussLegendre gl(points);
    for (int ax = 0; ax < 3; ++ax) {
        const double len = box.hi[ax] - box.lo[ax];
        const double dp = len / panels[ax];
        auto& xs = axis_nodes_[ax];
        auto& ws = axis_wts_[ax];
        xs.reserve(panels[ax] * points);
        ws.reserve(panels[ax] * points);
        for (int p = 0; p < panels[ax]; ++p) {
            const double a = box.lo[ax] + p * dp;
            for (int q = 0; q < points; ++q) {
                xs.push_back(a + 0.5 * dp * (gl.nodes[q] + 1.0));
                ws.push_back(0.5 * dp * gl.weights[q]);
            }
        }
    }
    const std::size_t n0 = axis_nodes_[0].size();
    const std::size_t n1 = axis_nodes_[1].size();
    const std::size_t n2 = axis_nodes_[2].size();
    pts_.reserve(n0 * n1 * n2);
    wts_.reserve(n0 * n1 * n2);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            for (std::size_t k = 0; k < n2; ++k) {
                pts_.emplace_back(axis_nodes_[0][i], axis_nodes_[1][j], axis_nodes_[2][k]);
                wts_.push_back(axis_wts_[0][i] * axis_wts_[1][j] * axis_wts_[2][k]);
            }
}

double CubeQuadrature::integrate(const std::function<double(const Vec3&)>& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) acc += wts_[i] * f(pts_[i]);
    return acc;
}

} // namespace forge
