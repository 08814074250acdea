#include "doctest.h"
#include "recon/synthetic.hpp"
#include "recon/vector_field.hpp"
#include "test_support.hpp"

using namespace recon;

namespace {

// brute-force separable 3-tap convolution, one pass
VectorGrid oracle_box_pass(const VectorGrid& g) {
    VectorGrid out(g.dims);
    for (int k = 0; k < g.dims.z; ++k)
        for (int j = 0; j < g.dims.y; ++j)
            for (int i = 0; i < g.dims.x; ++i) {
                Vec3 acc{};
                for (int dk = -1; dk <= 1; ++dk)
                    for (int dj = -1; dj <= 1; ++dj)
                        for (int di = -1; di <= 1; ++di) {
                            if (!g.dims.contains(i + di, j + dj, k + dk)) continue;
                            acc += g.at(i + di, j + dj, k + dk);
                        }
                out.at(i, j, k) = acc / 27.0;
            }
    return out;
}

SampleSet grid_samples(std::size_t n, const Dims& d, std::uint64_t seed) {
    Rng rng(seed);
    SampleSet set;
    set.space = CoordSpace::Grid;
    for (std::size_t i = 0; i < n; ++i)
        set.samples.push_back(
            {{rng.uniform(1, d.x - 2), rng.uniform(1, d.y - 2), rng.uniform(1, d.z - 2)},
             {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}});
    return set;
}

}  // namespace

TEST_CASE("splatting a sample at a vertex hits only that vertex") {
    SampleSet set;
    set.space = CoordSpace::Grid;
    set.samples.push_back({{3, 4, 5}, {0, 0, 1}});
    VectorGrid g = splat_normals(set, {8, 8, 8});
    for (int k = 0; k < 8; ++k)
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) {
                Vec3 want = (i == 3 && j == 4 && k == 5) ? Vec3{0, 0, 1} : Vec3{};
                CHECK(g.at(i, j, k).x == want.x);
                CHECK(g.at(i, j, k).y == want.y);
                CHECK(g.at(i, j, k).z == doctest::Approx(want.z).epsilon(1e-15));
            }
}

TEST_CASE("splatting at a cell center gives 1/8 per corner") {
    SampleSet set;
    set.space = CoordSpace::Grid;
    set.samples.push_back({{2.5, 2.5, 2.5}, {1, 0, 0}});
    VectorGrid g = splat_normals(set, {6, 6, 6});
    for (int c = 0; c < 8; ++c) {
        Vec3 v = g.at(2 + (c & 1), 2 + ((c >> 1) & 1), 2 + ((c >> 2) & 1));
        CHECK(v.x == doctest::Approx(0.125).epsilon(1e-14));
    }
}

TEST_CASE("splatting conserves the componentwise normal total") {
    Dims d{16, 14, 12};
    SampleSet set = grid_samples(10000, d, 77);
    VectorGrid g = splat_normals(set, d);
    Vec3 grid_total{}, normal_total{};
    for (const auto& v : g.values) grid_total += v;
    for (const auto& s : set.samples) normal_total += s.normal;
    CHECK(grid_total.x == doctest::Approx(normal_total.x).epsilon(1e-9));
    CHECK(grid_total.y == doctest::Approx(normal_total.y).epsilon(1e-9));
    CHECK(grid_total.z == doctest::Approx(normal_total.z).epsilon(1e-9));
}

TEST_CASE("one box pass spreads a delta into a 1/27 cube") {
    VectorGrid g({7, 7, 7});
    g.at(3, 3, 3) = {1, 2, -1};
    VectorGrid s = box_smooth(g, 1);
    VectorGrid want = oracle_box_pass(g);
    for (std::size_t v = 0; v < s.values.size(); ++v) {
        CHECK(s.values[v].x == doctest::Approx(want.values[v].x).epsilon(1e-14));
        CHECK(s.values[v].y == doctest::Approx(want.values[v].y).epsilon(1e-14));
        CHECK(s.values[v].z == doctest::Approx(want.values[v].z).epsilon(1e-14));
    }
    for (int dk = -1; dk <= 1; ++dk)
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di)
                CHECK(s.at(3 + di, 3 + dj, 3 + dk).x == doctest::Approx(1.0 / 27).epsilon(1e-14));
    CHECK(s.at(1, 3, 3).x == 0.0);
}

TEST_CASE("constants far from the boundary are unchanged by smoothing") {
    VectorGrid g({11, 11, 11});
    for (auto& v : g.values) v = {2, -1, 0.5};
    int passes = 2;
    VectorGrid s = box_smooth(g, passes);
    for (int k = passes; k < 11 - passes; ++k)
        for (int j = passes; j < 11 - passes; ++j)
            for (int i = passes; i < 11 - passes; ++i) {
                CHECK(s.at(i, j, k).x == doctest::Approx(2.0).epsilon(1e-13));
                CHECK(s.at(i, j, k).y == doctest::Approx(-1.0).epsilon(1e-13));
            }
}

TEST_CASE("three passes give the triple-box profile 1,3,6,7,6,3,1 over 27") {
    VectorGrid g({9, 9, 9});
    g.at(4, 4, 4) = {1, 0, 0};
    VectorGrid s = box_smooth(g, 3);
    const double want[7] = {1 / 27.0, 3 / 27.0, 6 / 27.0, 7 / 27.0, 6 / 27.0, 3 / 27.0, 1 / 27.0};
    // profile along x through the center, normalized by the perpendicular factors
    double center_factor = (7 / 27.0) * (7 / 27.0);
    for (int t = -3; t <= 3; ++t)
        CHECK(s.at(4 + t, 4, 4).x ==
              doctest::Approx(want[t + 3] * center_factor).epsilon(1e-12));
    CHECK_THROWS_AS(box_smooth(g, 0), std::invalid_argument);
}

TEST_CASE("divergence of a constant field is zero") {
    VectorGrid g({6, 6, 6});
    for (auto& v : g.values) v = {3, -2, 1};
    ScalarGrid d = divergence(g);
    for (double v : d.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("divergence of linear and quadratic ramps matches the stencil") {
    Dims dm{8, 5, 5};
    VectorGrid lin(dm), quad(dm);
    for (int k = 0; k < dm.z; ++k)
        for (int j = 0; j < dm.y; ++j)
            for (int i = 0; i < dm.x; ++i) {
                lin.at(i, j, k) = {static_cast<double>(i), 0, 0};
                quad.at(i, j, k) = {static_cast<double>(i) * i, 0, 0};
            }
    ScalarGrid dl = divergence(lin);
    ScalarGrid dq = divergence(quad);
    for (int k = 0; k < dm.z; ++k)
        for (int j = 0; j < dm.y; ++j)
            for (int i = 1; i + 1 < dm.x; ++i) {
                CHECK(dl.at(i, j, k) == doctest::Approx(1.0).epsilon(1e-14));
                CHECK(dq.at(i, j, k) == doctest::Approx(2.0 * i).epsilon(1e-13));
            }
    CHECK(dl.at(0, 2, 2) == doctest::Approx(1.0).epsilon(1e-14));  // one-sided
    CHECK_THROWS_AS(divergence(VectorGrid({2, 6, 6})), std::invalid_argument);
}

TEST_CASE("build_divergence of zero normals is a zero grid") {
    Dims d{12, 12, 12};
    SampleSet set = grid_samples(100, d, 3);
    for (auto& s : set.samples) s.normal = {0, 0, 0};
    ScalarGrid b = build_divergence(set, d, 3);
    for (double v : b.values) CHECK(v == 0.0);
}

TEST_CASE("a single oriented sample produces an antisymmetric dipole") {
    Dims d{17, 17, 17};
    SampleSet set;
    set.space = CoordSpace::Grid;
    set.samples.push_back({{8, 8, 8}, {0, 0, 1}});
    ScalarGrid b = build_divergence(set, d, 3);
    // odd in z about the sample, even in x and y
    for (int dz = 1; dz <= 4; ++dz)
        CHECK(b.at(8, 8, 8 + dz) == doctest::Approx(-b.at(8, 8, 8 - dz)).epsilon(1e-12));
    CHECK(b.at(8, 8, 8) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(b.at(8, 8, 9)) > 0.0);
    for (int dx = 1; dx <= 3; ++dx)
        CHECK(b.at(8 + dx, 8, 9) == doctest::Approx(b.at(8 - dx, 8, 9)).epsilon(1e-12));
}

TEST_CASE("outward sphere samples give opposite signs inside and outside") {
    Dims d{32, 32, 32};
    ShapeSpec sphere;
    SampleSet world = sample_primitive(sphere, 5000, 9);
    DomainTransform t = fit_domain(world, d, 6);
    SampleSet grid = to_grid(world, t);
    ScalarGrid b = build_divergence(grid, d, 3);
    Vec3 center = t.to_grid({0, 0, 0});
    double grid_r = 1.0 / t.scale;
    double inside_mean = 0, outside_mean = 0;
    int nin = 0, nout = 0;
    for (int k = 0; k < 32; ++k)
        for (int j = 0; j < 32; ++j)
            for (int i = 0; i < 32; ++i) {
                double r = norm(Vec3{(double)i, (double)j, (double)k} - center);
                if (r > grid_r - 3 && r < grid_r - 1) {
                    inside_mean += b.at(i, j, k);
                    nin++;
                } else if (r > grid_r + 1 && r < grid_r + 3) {
                    outside_mean += b.at(i, j, k);
                    nout++;
                }
            }
    inside_mean /= nin;
    outside_mean /= nout;
    CHECK(inside_mean * outside_mean < 0.0);  // opposite signs; global flip fixed later
}

TEST_CASE("build_divergence is linear in the sample set") {
    Dims d{14, 14, 14};
    SampleSet a = grid_samples(300, d, 41);
    SampleSet b = grid_samples(300, d, 42);
    SampleSet both = a;
    both.samples.insert(both.samples.end(), b.samples.begin(), b.samples.end());
    ScalarGrid da = build_divergence(a, d, 3);
    ScalarGrid db = build_divergence(b, d, 3);
    ScalarGrid dboth = build_divergence(both, d, 3);
    double scale = 0.0;
    for (double v : dboth.values) scale = std::max(scale, std::abs(v));
    for (std::size_t v = 0; v < dboth.values.size(); ++v)
        CHECK(std::abs(dboth.values[v] - da.values[v] - db.values[v]) <= 1e-10 * scale);
}

TEST_CASE("integer shifts of the samples shift the divergence grid") {
    // keep the smoothed support and its divergence reads away from the
    // boundary in both configurations so no one-sided stencils are involved
    Dims d{24, 24, 24};
    SampleSet set = grid_samples(200, {6, 6, 6}, 55);
    for (auto& s : set.samples) s.point += Vec3{6, 6, 6};  // support in [7,12]^3
    ScalarGrid base = build_divergence(set, d, 3);
    SampleSet shifted = set;
    for (auto& s : shifted.samples) s.point += Vec3{3, 2, 4};
    ScalarGrid moved = build_divergence(shifted, d, 3);
    for (int k = 1; k + 1 < 24; ++k)
        for (int j = 1; j + 1 < 24; ++j)
            for (int i = 1; i + 1 < 24; ++i) {
                int si = i + 3, sj = j + 2, sk = k + 4;
                if (si + 1 >= 24 || sj + 1 >= 24 || sk + 1 >= 24) continue;
                CHECK(moved.at(si, sj, sk) == doctest::Approx(base.at(i, j, k)).epsilon(1e-12));
            }
}

TEST_CASE("interior-supported fields have near-zero total divergence") {
    Dims d{24, 24, 24};
    SampleSet set = grid_samples(500, {10, 10, 10}, 61);
    for (auto& s : set.samples) s.point += Vec3{7, 7, 7};  // support well inside
    ScalarGrid b = build_divergence(set, d, 3);
    CHECK(std::abs(b.sum()) < 1e-9);
}
