#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here are written from the operation definitions (explicit stencil rows,
// dense linear algebra, brute-force search) and never call the production
// code paths they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "recon/energy.hpp"
#include "recon/grid.hpp"
#include "recon/mesh.hpp"
#include "recon/synthetic.hpp"

namespace testsup {

using recon::Dims;
using recon::EnergyModel;
using recon::ScalarGrid;
using recon::TriangleMesh;
using recon::Vec3;

// ---------------------------------------------------------------------------
// Dense stencil assembly, written row by row from the difference definitions.
// ---------------------------------------------------------------------------

using DenseMatrix = std::vector<std::vector<double>>;

inline int flat(const Dims& d, int i, int j, int k) { return i + d.x * (j + d.y * k); }

// Rows of one difference family as sparse (index, coefficient) lists; reads
// outside the grid are dropped (Dirichlet-0 exterior).
inline std::vector<std::vector<std::pair<int, double>>> stencil_rows(const Dims& d,
                                                                     const std::string& kind) {
    std::vector<std::vector<std::pair<int, double>>> rows;
    auto add = [&](std::vector<std::pair<int, double>>& row, int i, int j, int k, double c) {
        if (i >= 0 && i < d.x && j >= 0 && j < d.y && k >= 0 && k < d.z)
            row.push_back({flat(d, i, j, k), c});
    };
    for (int k = 0; k < d.z; ++k)
        for (int j = 0; j < d.y; ++j)
            for (int i = 0; i < d.x; ++i) {
                std::vector<std::pair<int, double>> row;
                if (kind == "gx") {
                    add(row, i + 1, j, k, 1.0);
                    add(row, i, j, k, -1.0);
                } else if (kind == "gy") {
                    add(row, i, j + 1, k, 1.0);
                    add(row, i, j, k, -1.0);
                } else if (kind == "gz") {
                    add(row, i, j, k + 1, 1.0);
                    add(row, i, j, k, -1.0);
                } else if (kind == "xx") {
                    add(row, i - 1, j, k, 1.0);
                    add(row, i, j, k, -2.0);
                    add(row, i + 1, j, k, 1.0);
                } else if (kind == "yy") {
                    add(row, i, j - 1, k, 1.0);
                    add(row, i, j, k, -2.0);
                    add(row, i, j + 1, k, 1.0);
                } else if (kind == "zz") {
                    add(row, i, j, k - 1, 1.0);
                    add(row, i, j, k, -2.0);
                    add(row, i, j, k + 1, 1.0);
                } else if (kind == "xy") {
                    add(row, i + 1, j + 1, k, 0.25);
                    add(row, i + 1, j - 1, k, -0.25);
                    add(row, i - 1, j + 1, k, -0.25);
                    add(row, i - 1, j - 1, k, 0.25);
                } else if (kind == "xz") {
                    add(row, i + 1, j, k + 1, 0.25);
                    add(row, i + 1, j, k - 1, -0.25);
                    add(row, i - 1, j, k + 1, -0.25);
                    add(row, i - 1, j, k - 1, 0.25);
                } else if (kind == "yz") {
                    add(row, i, j + 1, k + 1, 0.25);
                    add(row, i, j + 1, k - 1, -0.25);
                    add(row, i, j - 1, k + 1, -0.25);
                    add(row, i, j - 1, k - 1, 0.25);
                }
                rows.push_back(std::move(row));
            }
    return rows;
}

inline std::vector<std::pair<std::string, double>> stencil_families(EnergyModel model) {
    switch (model) {
        case EnergyModel::Membrane: return {{"gx", 1.0}, {"gy", 1.0}, {"gz", 1.0}};
        case EnergyModel::SecondOrder: return {{"xx", 1.0}, {"yy", 1.0}, {"zz", 1.0}};
        case EnergyModel::SecondOrderMixed:
            return {{"xx", 1.0}, {"yy", 1.0}, {"zz", 1.0},
                    {"xy", 2.0}, {"xz", 2.0}, {"yz", 2.0}};
        default: return {};
    }
}

// A = sum_s c_s * D_s' D_s assembled densely.
inline DenseMatrix dense_operator(const Dims& d, EnergyModel model) {
    int n = static_cast<int>(d.size());
    DenseMatrix A(n, std::vector<double>(n, 0.0));
    for (const auto& [kind, weight] : stencil_families(model)) {
        auto rows = stencil_rows(d, kind);
        for (const auto& row : rows)
            for (const auto& [ci, cv] : row)
                for (const auto& [cj, cw] : row) A[ci][cj] += weight * cv * cw;
    }
    return A;
}

// Literal energy: lambda * sum of squared stencil row values + x.b.
inline double literal_energy(const ScalarGrid& x, const ScalarGrid& b, double lambda,
                             EnergyModel model) {
    double es = 0.0;
    for (const auto& [kind, weight] : stencil_families(model)) {
        auto rows = stencil_rows(x.dims, kind);
        for (const auto& row : rows) {
            double v = 0.0;
            for (const auto& [ci, cv] : row) v += cv * x.values[ci];
            es += weight * v * v;
        }
    }
    double eb = 0.0;
    for (std::size_t v = 0; v < x.values.size(); ++v) eb += x.values[v] * b.values[v];
    return lambda * es + eb;
}

// Energy restricted to rows whose stencil stays >= `margin` cells from every
// face (no zero-padding truncation).
inline double interior_energy(const ScalarGrid& x, EnergyModel model, int margin) {
    double es = 0.0;
    const Dims& d = x.dims;
    for (const auto& [kind, weight] : stencil_families(model)) {
        auto rows = stencil_rows(d, kind);
        for (int k = margin; k < d.z - margin; ++k)
            for (int j = margin; j < d.y - margin; ++j)
                for (int i = margin; i < d.x - margin; ++i) {
                    const auto& row = rows[flat(d, i, j, k)];
                    double v = 0.0;
                    for (const auto& [ci, cv] : row) v += cv * x.values[ci];
                    es += weight * v * v;
                }
    }
    return es;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> lu_solve(DenseMatrix A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

// ---------------------------------------------------------------------------
// Independent point-to-triangle distance: solve the unconstrained 2x2 normal
// equations, then explicitly check the clamped edge/vertex candidates.
// ---------------------------------------------------------------------------
inline double oracle_point_triangle_distance2(const Vec3& p, const Vec3& a, const Vec3& b,
                                              const Vec3& c) {
    using recon::cross;
    using recon::dot;
    using recon::norm2;
    Vec3 e0 = b - a, e1 = c - a, w = p - a;
    double a00 = dot(e0, e0), a01 = dot(e0, e1), a11 = dot(e1, e1);
    double r0 = dot(e0, w), r1 = dot(e1, w);
    double det = a00 * a11 - a01 * a01;
    double best = std::numeric_limits<double>::max();
    if (det > 0) {
        double s = (a11 * r0 - a01 * r1) / det;
        double t = (a00 * r1 - a01 * r0) / det;
        if (s >= 0 && t >= 0 && s + t <= 1) best = norm2(p - (a + e0 * s + e1 * t));
    }
    auto edge = [&](const Vec3& u, const Vec3& v) {
        Vec3 d = v - u;
        double t = dot(p - u, d) / dot(d, d);
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, norm2(p - (u + d * t)));
    };
    edge(a, b);
    edge(b, c);
    edge(c, a);
    return best;
}

inline double oracle_rms(const std::vector<Vec3>& points, const TriangleMesh& mesh) {
    double acc = 0.0;
    for (const auto& p : points) {
        double best = std::numeric_limits<double>::max();
        for (const auto& t : mesh.triangles)
            best = std::min(best, oracle_point_triangle_distance2(p, mesh.vertices[t[0]],
                                                                  mesh.vertices[t[1]],
                                                                  mesh.vertices[t[2]]));
        acc += best;
    }
    return std::sqrt(acc / points.size());
}

// ---------------------------------------------------------------------------
// Mesh fixtures
// ---------------------------------------------------------------------------

inline TriangleMesh make_icosphere(double r, int subdivisions) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                               {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                               {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<std::uint32_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},  {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (auto& v : verts) v = recon::normalized(v) * r;
    for (int s = 0; s < subdivisions; ++s) {
        std::vector<std::array<std::uint32_t, 3>> next;
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back(recon::normalized((verts[a] + verts[b]) * 0.5) * r);
            std::uint32_t idx = static_cast<std::uint32_t>(verts.size() - 1);
            midpoint[key] = idx;
            return idx;
        };
        for (const auto& f : faces) {
            auto ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    TriangleMesh mesh;
    mesh.vertices = std::move(verts);
    mesh.triangles = std::move(faces);
    return mesh;
}

// Open cylinder shell (no caps), rings x segments quads.
inline TriangleMesh make_cylinder_mesh(double r, double h, int segments, int rings) {
    TriangleMesh mesh;
    for (int ring = 0; ring <= rings; ++ring) {
        double z = -0.5 * h + h * ring / rings;
        for (int s = 0; s < segments; ++s) {
            double theta = 2.0 * M_PI * s / segments;
            mesh.vertices.push_back({r * std::cos(theta), r * std::sin(theta), z});
        }
    }
    auto vid = [&](int ring, int s) {
        return static_cast<std::uint32_t>(ring * segments + (s % segments));
    };
    for (int ring = 0; ring < rings; ++ring)
        for (int s = 0; s < segments; ++s) {
            mesh.triangles.push_back({vid(ring, s), vid(ring, s + 1), vid(ring + 1, s)});
            mesh.triangles.push_back({vid(ring, s + 1), vid(ring + 1, s + 1), vid(ring + 1, s)});
        }
    return mesh;
}

// Flat grid patch in the z=0 plane.
inline TriangleMesh make_planar_patch(int n, double step) {
    TriangleMesh mesh;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) mesh.vertices.push_back({i * step, j * step, 0.0});
    auto vid = [&](int i, int j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
            mesh.triangles.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    return mesh;
}

inline ScalarGrid random_grid(const Dims& d, recon::Rng& rng, double lo = -1.0, double hi = 1.0) {
    ScalarGrid g(d);
    for (auto& v : g.values) v = rng.uniform(lo, hi);
    return g;
}

}  // namespace testsup
