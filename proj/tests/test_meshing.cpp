#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "recon/meshing.hpp"
#include "recon/synthetic.hpp"
#include "test_support.hpp"

using namespace recon;

namespace {

DomainTransform identity_transform(const Dims& d) {
    DomainTransform t;
    t.resolution = d;
    return t;
}

ScalarGrid sphere_sdf(const Dims& d, const Vec3& center, double radius) {
    ScalarGrid f(d);
    for (int k = 0; k < d.z; ++k)
        for (int j = 0; j < d.y; ++j)
            for (int i = 0; i < d.x; ++i)
                f.at(i, j, k) = radius - norm(Vec3{(double)i, (double)j, (double)k} - center);
    return f;
}

// random field with the level set kept away from the grid boundary
ScalarGrid bounded_random_field(const Dims& d, Rng& rng) {
    ScalarGrid f(d);
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
    for (int k = 0; k < d.z; ++k)
        for (int j = 0; j < d.y; ++j)
            for (int i = 0; i < d.x; ++i)
                if (i < 2 || j < 2 || k < 2 || i > d.x - 3 || j > d.y - 3 || k > d.z - 3)
                    f.at(i, j, k) = -3.0;
    return f;
}

}  // namespace

TEST_CASE("select_isovalue averages trilinear samples") {
    Dims d{6, 6, 6};
    ScalarGrid c(d, 0.75);
    SampleSet set;
    set.space = CoordSpace::Grid;
    set.samples.push_back({{1.3, 2.7, 3.1}, {0, 0, 1}});
    set.samples.push_back({{4.2, 0.5, 2.0}, {0, 0, 1}});
    CHECK(select_isovalue(c, set) == doctest::Approx(0.75).epsilon(1e-15));

    ScalarGrid two(d);
    for (int k = 0; k < 6; ++k)
        for (int j = 0; j < 6; ++j)
            for (int i = 0; i < 6; ++i) two.at(i, j, k) = 0.1 * i;
    SampleSet pair;
    pair.space = CoordSpace::Grid;
    pair.samples.push_back({{2, 0, 0}, {0, 0, 1}});  // f = 0.2
    pair.samples.push_back({{5, 0, 0}, {0, 0, 1}});  // wait, grid max is 5 -> f = 0.5... keep 0.2/0.6 via interpolation
    pair.samples.back().point = {5, 0, 0};
    CHECK(select_isovalue(two, pair) == doctest::Approx((0.2 + 0.5) / 2).epsilon(1e-12));

    Rng rng(1);
    ScalarGrid g = testsup::random_grid(d, rng);
    SampleSet many;
    many.space = CoordSpace::Grid;
    double want = 0;
    for (int i = 0; i < 50; ++i) {
        Vec3 p{rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 5)};
        many.samples.push_back({p, {0, 0, 1}});
        want += sample_trilinear(g, p);
    }
    want /= 50;
    CHECK(select_isovalue(g, many) == doctest::Approx(want).epsilon(1e-13));
    CHECK_THROWS_AS(select_isovalue(g, SampleSet{}), std::invalid_argument);
}

TEST_CASE("no crossings produce an empty mesh") {
    Dims d{8, 8, 8};
    TriangleMesh mesh = marching_cubes(ScalarGrid(d, 0.0), 0.5, identity_transform(d));
    CHECK(mesh.vertices.empty());
    CHECK(mesh.triangles.empty());
}

TEST_CASE("sphere level set is watertight, round, and outward-wound") {
    Dims d{32, 32, 32};
    Vec3 center{15.5, 15.5, 15.5};
    double radius = 10.0;
    ScalarGrid f = sphere_sdf(d, center, radius);
    TriangleMesh mesh = marching_cubes(f, 0.0, identity_transform(d));
    MeshTopology topo = mesh_topology(mesh);
    CHECK(topo.watertight());
    CHECK(topo.euler_characteristic == 2);
    for (const auto& v : mesh.vertices)
        CHECK(std::abs(norm(v - center) - radius) < 0.05);
    for (const auto& t : mesh.triangles) {
        Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        Vec3 n = cross(b - a, c - a);
        Vec3 mid = (a + b + c) / 3.0;
        CHECK(dot(n, mid - center) > 0.0);  // f is larger inside; normals point outward
    }
}

TEST_CASE("a single inside corner produces one triangle at interpolated fractions") {
    Dims d{2, 2, 2};
    ScalarGrid f(d, 0.0);
    f.at(0, 0, 0) = 1.0;
    TriangleMesh mesh = marching_cubes(f, 0.25, identity_transform(d));
    REQUIRE(mesh.triangles.size() == 1);
    REQUIRE(mesh.vertices.size() == 3);
    // crossing at t = (0.25 - 1) / (0 - 1) = 0.75 along each incident edge
    std::multiset<std::string> got;
    for (const auto& v : mesh.vertices) {
        std::ostringstream s;
        s << v.x << "," << v.y << "," << v.z;
        got.insert(s.str());
    }
    CHECK(got.count("0.75,0,0") == 1);
    CHECK(got.count("0,0.75,0") == 1);
    CHECK(got.count("0,0,0.75") == 1);
}

TEST_CASE("every vertex lies on a straddling edge at the exact parameter") {
    Dims d{12, 12, 12};
    Rng rng(2);
    ScalarGrid f = bounded_random_field(d, rng);
    double gamma = 0.1;
    TriangleMesh mesh = marching_cubes(f, gamma, identity_transform(d));
    REQUIRE(!mesh.vertices.empty());
    for (const auto& v : mesh.vertices) {
        int axis = -1;
        Vec3 base = v;
        for (int a = 0; a < 3; ++a) {
            double frac = v[a] - std::floor(v[a]);
            if (frac > 1e-9 && frac < 1 - 1e-9) {
                CHECK(axis == -1);  // exactly one fractional coordinate
                axis = a;
                base[a] = std::floor(v[a]);
            }
        }
        REQUIRE(axis >= 0);
        Vec3 next = base;
        next[axis] += 1;
        double fa = f.at((int)base.x, (int)base.y, (int)base.z);
        double fb = f.at((int)next.x, (int)next.y, (int)next.z);
        CHECK((fa >= gamma) != (fb >= gamma));
        double want = (gamma - fa) / (fb - fa);
        CHECK(v[axis] - base[axis] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("random interior level sets are watertight") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        Dims d{11, 12, 13};
        ScalarGrid f = bounded_random_field(d, rng);
        TriangleMesh mesh = marching_cubes(f, 0.0, identity_transform(d));
        MeshTopology topo = mesh_topology(mesh);
        CHECK(topo.boundary_edges == 0);
        CHECK(topo.nonmanifold_edges == 0);
        for (const auto& t : mesh.triangles) {
            CHECK(t[0] != t[1]);
            CHECK(t[1] != t[2]);
            CHECK(t[2] != t[0]);
        }
    }
}

TEST_CASE("negating the field and isovalue reverses the winding") {
    Dims d{16, 16, 16};
    ScalarGrid f = sphere_sdf(d, {7.5, 7.5, 7.5}, 5.0);
    double gamma = 0.2;
    TriangleMesh pos = marching_cubes(f, gamma, identity_transform(d));
    ScalarGrid neg = f;
    for (double& v : neg.values) v = -v;
    TriangleMesh flip = marching_cubes(neg, -gamma, identity_transform(d));
    REQUIRE(pos.vertices.size() == flip.vertices.size());
    // same vertex set (canonical order makes this index-for-index)
    for (std::size_t i = 0; i < pos.vertices.size(); ++i) {
        CHECK(pos.vertices[i].x == doctest::Approx(flip.vertices[i].x).epsilon(1e-12));
        CHECK(pos.vertices[i].y == doctest::Approx(flip.vertices[i].y).epsilon(1e-12));
        CHECK(pos.vertices[i].z == doctest::Approx(flip.vertices[i].z).epsilon(1e-12));
    }
    // opposite orientation: total signed volume flips sign
    auto signed_volume = [](const TriangleMesh& m) {
        double vol = 0;
        for (const auto& t : m.triangles)
            vol += dot(m.vertices[t[0]], cross(m.vertices[t[1]], m.vertices[t[2]]));
        return vol / 6.0;
    };
    CHECK(signed_volume(pos) == doctest::Approx(-signed_volume(flip)).epsilon(1e-9));
}

TEST_CASE("shifting the isovalue equals shifting the field") {
    Dims d{14, 14, 14};
    Rng rng(4);
    ScalarGrid f = bounded_random_field(d, rng);
    double gamma = 0.3;
    TriangleMesh a = marching_cubes(f, gamma, identity_transform(d));
    ScalarGrid shifted = f;
    for (double& v : shifted.values) v -= gamma;
    TriangleMesh b = marching_cubes(shifted, 0.0, identity_transform(d));
    REQUIRE(a.vertices.size() == b.vertices.size());
    REQUIRE(a.triangles.size() == b.triangles.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        CHECK(a.vertices[i].x == doctest::Approx(b.vertices[i].x).epsilon(1e-12));
        CHECK(a.vertices[i].y == doctest::Approx(b.vertices[i].y).epsilon(1e-12));
        CHECK(a.vertices[i].z == doctest::Approx(b.vertices[i].z).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < a.triangles.size(); ++i) CHECK(a.triangles[i] == b.triangles[i]);
}

TEST_CASE("the domain transform maps vertices into world coordinates") {
    Dims d{16, 16, 16};
    ScalarGrid f = sphere_sdf(d, {7.5, 7.5, 7.5}, 5.0);
    DomainTransform t;
    t.resolution = d;
    t.origin = {10, 20, 30};
    t.scale = 0.5;
    TriangleMesh mesh = marching_cubes(f, 0.0, t);
    Vec3 world_center = t.to_world({7.5, 7.5, 7.5});
    for (const auto& v : mesh.vertices)
        CHECK(norm(v - world_center) == doctest::Approx(5.0 * t.scale).epsilon(2e-2));
}

TEST_CASE("optional vertex normals point outward along the gradient") {
    Dims d{24, 24, 24};
    ScalarGrid f = sphere_sdf(d, {11.5, 11.5, 11.5}, 7.0);
    TriangleMesh mesh = marching_cubes(f, 0.0, identity_transform(d), /*with_normals=*/true);
    REQUIRE(mesh.has_normals());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        Vec3 radial = normalized(mesh.vertices[i] - Vec3{11.5, 11.5, 11.5});
        CHECK(dot(mesh.normals[i], radial) > 0.95);
    }
}

TEST_CASE("exact-gamma corners count as inside and stay watertight") {
    Dims d{8, 8, 8};
    ScalarGrid f(d, -1.0);
    for (int k = 2; k <= 5; ++k)
        for (int j = 2; j <= 5; ++j)
            for (int i = 2; i <= 5; ++i) f.at(i, j, k) = (i + j + k) % 2 ? 0.5 : 0.0;
    double gamma = 0.0;  // many corners sit exactly on the isovalue
    TriangleMesh mesh = marching_cubes(f, gamma, identity_transform(d));
    MeshTopology topo = mesh_topology(mesh);
    CHECK(topo.boundary_edges == 0);
    CHECK(topo.nonmanifold_edges == 0);
    CHECK(!mesh.triangles.empty());
}
