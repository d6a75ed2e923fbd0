#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/mesh.hpp"

using namespace forge;

TEST_CASE("kuhn split of one cube") {
    const Mesh m = Mesh::build_box(1);
    CHECK(m.vertex_count() == 8);
    CHECK(m.tet_count() == 6);
    CHECK(m.boundary_nodes().size() == 8);
    CHECK(m.interior_nodes().empty());
}

TEST_CASE("counts at resolution 2") {
    const Mesh m = Mesh::build_box(2);
    CHECK(m.vertex_count() == 27);
    CHECK(m.tet_count() == 48);
    CHECK(m.boundary_nodes().size() == 26);
    CHECK(m.interior_nodes().size() == 1);
}

TEST_CASE("positive volumes summing to the box volume") {
    for (int r : {1, 2, 3, 5}) {
        const Mesh m = Mesh::build_box(r, Box{{0, 0, 0}, {2.0, 1.0, 0.5}});
        double sum = 0.0;
        for (int t = 0; t < m.tet_count(); ++t) {
            const double v = m.tet_volume(t);
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("boundary facet normals are outward unit axis vectors") {
    const Mesh m = Mesh::build_box(3);
    CHECK(m.boundary_facets().size() == 6u * 2u * 9u); // 2 triangles per face cell
    for (const auto& f : m.boundary_facets()) {
        CHECK(std::abs(f.normal.norm() - 1.0) <= 1e-12);
        // axis aligned: exactly one nonzero component, +-1
        int nonzero = 0;
        for (int ax = 0; ax < 3; ++ax)
            if (std::abs(f.normal[ax]) > 1e-12) {
                ++nonzero;
                CHECK(std::abs(std::abs(f.normal[ax]) - 1.0) <= 1e-12);
                // outward: facet on the matching face of the unit box
                const double target = f.normal[ax] > 0 ? 1.0 : 0.0;
                for (int v : f.v)
                    CHECK(m.vertices()[v][ax] == doctest::Approx(target));
            }
        CHECK(nonzero == 1);
    }
}

TEST_CASE("boundary and interior nodes partition the vertex set") {
    const Mesh m = Mesh::build_box(4);
    std::set<int> all;
    for (int b : m.boundary_nodes()) all.insert(b);
    for (int i : m.interior_nodes()) all.insert(i);
    CHECK(all.size() == static_cast<std::size_t>(m.vertex_count()));
    CHECK(m.boundary_nodes().size() + m.interior_nodes().size() ==
          static_cast<std::size_t>(m.vertex_count()));
}

TEST_CASE("collar interior nodes by direct grid count") {
    const Mesh m = Mesh::build_box(8);
    CHECK(m.collar_interior_nodes(0).size() == m.interior_nodes().size());
    CHECK(m.collar_interior_nodes(2).size() == 27); // (8-1-2*2)^3
    // counting oracle: brute force over grid coordinates
    for (int layers : {0, 1, 2, 3}) {
        int count = 0;
        for (int i = 0; i <= 8; ++i)
            for (int j = 0; j <= 8; ++j)
                for (int k = 0; k <= 8; ++k) {
                    const int d = std::min({i, j, k, 8 - i, 8 - j, 8 - k});
                    if (d > layers) ++count;
                }
        CHECK(static_cast<int>(m.collar_interior_nodes(layers).size()) == count);
    }
    CHECK_THROWS_AS(m.collar_interior_nodes(4), InvalidInputError);
}

TEST_CASE("rejected inputs") {
    CHECK_THROWS_AS(Mesh::build_box(0), InvalidInputError);
    CHECK_THROWS_AS(Mesh::build_box(-3), InvalidInputError);
    CHECK_THROWS_AS(Mesh::build_box(2, Box{{0, 0, 0}, {1, 0, 1}}), InvalidInputError);
}

TEST_CASE("construction is deterministic") {
    const Mesh a = Mesh::build_box(3);
    const Mesh b = Mesh::build_box(3);
    REQUIRE(a.vertex_count() == b.vertex_count());
    for (int v = 0; v < a.vertex_count(); ++v)
        CHECK(a.vertices()[v] == b.vertices()[v]);
    REQUIRE(a.tet_count() == b.tet_count());
    for (int t = 0; t < a.tet_count(); ++t) CHECK(a.tets()[t] == b.tets()[t]);
}

TEST_CASE("refinement by two nests vertex sets") {
    const Mesh coarse = Mesh::build_box(3);
    const Mesh fine = Mesh::build_box(6);
    std::set<std::array<long long, 3>> fine_keys;
    for (const auto& v : fine.vertices())
        fine_keys.insert({llround(v[0] * 1e12), llround(v[1] * 1e12),
                          llround(v[2] * 1e12)});
    for (const auto& v : coarse.vertices())
        CHECK(fine_keys.count({llround(v[0] * 1e12), llround(v[1] * 1e12),
                               llround(v[2] * 1e12)}) == 1);
}

TEST_CASE("locate and barycentric round trip") {
    const Mesh m = Mesh::build_box(4, Box{{-1, 0, 0.5}, {1, 2, 1.5}});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        Vec3 x{-1 + 2 * u(rng), 2 * u(rng), 0.5 + u(rng)};
        const int t = m.locate(x);
        const auto b = m.barycentric(t, x);
        CHECK(b.minCoeff() >= -1e-12);
        CHECK(b.sum() == doctest::Approx(1.0));
        Vec3 rec = Vec3::Zero();
        for (int i = 0; i < 4; ++i) rec += b[i] * m.vertices()[m.tets()[t][i]];
        CHECK((rec - x).norm() <= 1e-12);
    }
}

TEST_CASE("json dump contains the arrays") {
    const Mesh m = Mesh::build_box(1);
    std::ostringstream os;
    m.dump_json(os);
    const std::string s = os.str();
    CHECK(s.find("\"vertices\"") != std::string::npos);
    CHECK(s.find("\"tets\"") != std::string::npos);
    CHECK(s.find("\"boundary_facets\"") != std::string::npos);
}
