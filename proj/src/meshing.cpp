#include "recon/meshing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace recon {

namespace {

// Cube corners are numbered by coordinate bits: corner c sits at offset
// ((c>>0)&1, (c>>1)&1, (c>>2)&1). Edge e = 4*axis + rank joins corner pairs
// along that axis; the first corner of a pair is the one with the lower
// coordinate, which makes the (lattice corner, axis) edge key unambiguous.
struct McTables {
    std::array<std::array<int, 2>, 12> edge_corners;
    // Per corner-sign mask: triangles as triples of cell-local edge ids,
    // wound so normals point from the inside (>= gamma) region outward.
    std::array<std::vector<std::array<int, 3>>, 256> triangles;
};

std::array<int, 3> corner_offset(int c) { return {c & 1, (c >> 1) & 1, (c >> 2) & 1}; }

// Interval DP triangulation of a contour loop that minimizes the number of
// diagonals joining crossings on a common cube face. The loop arrives with
// inside-on-the-left orientation; triangles are emitted reversed so their
// normals point from the inside (f-larger) region outward.
void triangulate_loop(const std::vector<int>& loop, const bool share_face[12][12],
                      std::vector<std::array<int, 3>>& out) {
    const int n = static_cast<int>(loop.size());
    if (n == 3) {
        out.push_back({loop[0], loop[2], loop[1]});
        return;
    }
    auto diag_cost = [&](int i, int j) {
        bool is_loop_edge = (j == i + 1) || (i == 0 && j == n - 1);
        return (!is_loop_edge && share_face[loop[i]][loop[j]]) ? 1 : 0;
    };
    constexpr int kBig = 1 << 20;
    int cost[12][12], split[12][12];
    for (int i = 0; i + 1 < n; ++i) cost[i][i + 1] = 0;
    for (int len = 2; len < n; ++len)
        for (int i = 0; i + len < n; ++i) {
            int j = i + len;
            cost[i][j] = kBig;
            for (int k = i + 1; k < j; ++k) {
                int c = cost[i][k] + cost[k][j] + diag_cost(i, k) + diag_cost(k, j);
                if (c < cost[i][j]) {
                    cost[i][j] = c;
                    split[i][j] = k;
                }
            }
        }
    // emit triangles from the split tree, reversed for outward winding
    std::vector<std::array<int, 2>> stack{{0, n - 1}};
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        if (j - i < 2) continue;
        int k = split[i][j];
        out.push_back({loop[i], loop[j], loop[k]});
        stack.push_back({i, k});
        stack.push_back({k, j});
    }
}

McTables build_mc_tables() {
    McTables T;

    int edge_of[8][8];
    for (auto& row : edge_of) std::fill(std::begin(row), std::end(row), -1);
    {
        int e = 0;
        for (int axis = 0; axis < 3; ++axis)
            for (int c = 0; c < 8; ++c)
                if (!(c & (1 << axis))) {
                    int d = c | (1 << axis);
                    T.edge_corners[e] = {c, d};
                    edge_of[c][d] = edge_of[d][c] = e;
                    ++e;
                }
    }

    // Face corner cycles, counterclockwise as seen from outside the cube.
    std::array<std::array<int, 4>, 6> faces;
    {
        int f = 0;
        for (int axis = 0; axis < 3; ++axis)
            for (int side = 0; side < 2; ++side) {
                int u = (axis + 1) % 3, v = (axis + 2) % 3;
                const int uv[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
                std::array<int, 4> cyc;
                for (int t = 0; t < 4; ++t)
                    cyc[t] = (side << axis) | (uv[t][0] << u) | (uv[t][1] << v);
                // (e_u, e_v, e_axis) is right-handed, so the cycle is CCW seen
                // from +axis; flip it for the side whose outward normal is -axis.
                if (side == 0) std::swap(cyc[1], cyc[3]);
                faces[f++] = cyc;
            }
    }

    // Two cube edges share a face when both lie on its boundary. A loop
    // diagonal joining such a pair could be emitted by both cells adjacent to
    // that face, stacking four triangles on one mesh edge, so the
    // triangulation below avoids those diagonals.
    bool share_face[12][12] = {};
    for (const auto& cyc : faces)
        for (int s = 0; s < 4; ++s)
            for (int t = 0; t < 4; ++t) {
                int e1 = edge_of[cyc[s]][cyc[(s + 1) % 4]];
                int e2 = edge_of[cyc[t]][cyc[(t + 1) % 4]];
                share_face[e1][e2] = true;
            }

    for (int mask = 1; mask < 255; ++mask) {
        auto inside = [&](int c) { return (mask >> c) & 1; };

        // Each face contributes one directed contour segment per maximal run
        // of inside corners along its boundary cycle: from the crossing where
        // the run ends to the crossing where it begins. Runs of insides are
        // kept separate, so two cells sharing a face always agree on the
        // pairing and the surface closes without cracks.
        int next_of[12];
        std::fill(std::begin(next_of), std::end(next_of), -1);
        for (const auto& cyc : faces) {
            for (int t = 0; t < 4; ++t) {
                int a = cyc[t], b = cyc[(t + 1) % 4];
                if (!(inside(a) && !inside(b))) continue;  // run ends on edge (a,b)
                int r = t;
                while (inside(cyc[(r + 3) % 4])) r = (r + 3) % 4;  // walk back to run start
                int entry_a = cyc[(r + 3) % 4], entry_b = cyc[r];
                next_of[edge_of[a][b]] = edge_of[entry_a][entry_b];
            }
        }

        bool used[12] = {};
        for (int e0 = 0; e0 < 12; ++e0) {
            if (next_of[e0] < 0 || used[e0]) continue;
            std::vector<int> loop;
            int e = e0;
            do {
                loop.push_back(e);
                used[e] = true;
                e = next_of[e];
            } while (e != e0);
            triangulate_loop(loop, share_face, T.triangles[mask]);
        }
    }
    return T;
}

const McTables& mc_tables() {
    static const McTables tables = build_mc_tables();
    return tables;
}

Vec3 field_gradient(const ScalarGrid& f, int i, int j, int k) {
    const Dims& d = f.dims;
    auto diff = [&](int a) {
        const int e[3] = {a == 0, a == 1, a == 2};
        int i0 = i - e[0], j0 = j - e[1], k0 = k - e[2];
        int i1 = i + e[0], j1 = j + e[1], k1 = k + e[2];
        bool has0 = d.contains(i0, j0, k0), has1 = d.contains(i1, j1, k1);
        double v0 = has0 ? f.at(i0, j0, k0) : f.at(i, j, k);
        double v1 = has1 ? f.at(i1, j1, k1) : f.at(i, j, k);
        return (has0 && has1) ? 0.5 * (v1 - v0) : (v1 - v0);
    };
    return {diff(0), diff(1), diff(2)};
}

}  // namespace

double select_isovalue(const ScalarGrid& f, const SampleSet& samples) {
    if (samples.empty()) throw std::invalid_argument("select_isovalue: empty sample set");
    double acc = 0.0;
    for (const auto& s : samples.samples) acc += sample_trilinear(f, s.point);
    return acc / static_cast<double>(samples.size());
}

TriangleMesh marching_cubes(const ScalarGrid& f, double gamma, const DomainTransform& transform,
                            bool with_normals) {
    const McTables& T = mc_tables();
    const Dims& d = f.dims;

    struct VertexEntry {
        Vec3 grid_pos;
        std::uint32_t index = 0;
    };
    std::unordered_map<std::uint64_t, VertexEntry> edge_vertices;
    std::vector<std::array<std::uint64_t, 3>> tri_keys;

    auto edge_key = [&](int i, int j, int k, int axis) {
        return static_cast<std::uint64_t>(d.index(i, j, k)) * 3 + static_cast<std::uint64_t>(axis);
    };

    double corner[8];
    for (int k = 0; k + 1 < d.z; ++k)
        for (int j = 0; j + 1 < d.y; ++j)
            for (int i = 0; i + 1 < d.x; ++i) {
                int mask = 0;
                for (int c = 0; c < 8; ++c) {
                    auto o = corner_offset(c);
                    double v = f.at(i + o[0], j + o[1], k + o[2]);
                    if (v >= gamma) mask |= 1 << c;
                    if (v == gamma) v += 1e-12;  // keep crossings off the corners
                    corner[c] = v;
                }
                if (mask == 0 || mask == 255) continue;

                for (const auto& tri : T.triangles[mask]) {
                    std::array<std::uint64_t, 3> keys;
                    for (int t = 0; t < 3; ++t) {
                        int e = tri[t];
                        int axis = e / 4;
                        int ca = T.edge_corners[e][0], cb = T.edge_corners[e][1];
                        auto oa = corner_offset(ca);
                        std::uint64_t key = edge_key(i + oa[0], j + oa[1], k + oa[2], axis);
                        keys[t] = key;
                        if (!edge_vertices.count(key)) {
                            double va = corner[ca], vb = corner[cb];
                            double frac = (gamma - va) / (vb - va);
                            Vec3 p{static_cast<double>(i + oa[0]), static_cast<double>(j + oa[1]),
                                   static_cast<double>(k + oa[2])};
                            p[axis] += frac;
                            edge_vertices.emplace(key, VertexEntry{p, 0});
                        }
                    }
                    tri_keys.push_back(keys);
                }
            }

    // Canonical vertex order: sorted by edge key.
    std::vector<std::uint64_t> keys;
    keys.reserve(edge_vertices.size());
    for (const auto& [key, entry] : edge_vertices) keys.push_back(key);
    std::sort(keys.begin(), keys.end());

    TriangleMesh mesh;
    mesh.vertices.reserve(keys.size());
    VectorGrid gradient;
    if (with_normals) {
        gradient = VectorGrid(d);
        for (int k = 0; k < d.z; ++k)
            for (int j = 0; j < d.y; ++j)
                for (int i = 0; i < d.x; ++i) gradient.at(i, j, k) = field_gradient(f, i, j, k);
        mesh.normals.reserve(keys.size());
    }
    for (std::uint32_t n = 0; n < keys.size(); ++n) {
        auto& entry = edge_vertices[keys[n]];
        entry.index = n;
        mesh.vertices.push_back(transform.to_world(entry.grid_pos));
        if (with_normals) {
            Vec3 g{};
            for (const auto& t : trilinear_weights(d, entry.grid_pos))
                g += gradient.at(t.i, t.j, t.k) * t.weight;
            mesh.normals.push_back(normalized(-g));  // f decreases outward
        }
    }
    mesh.triangles.reserve(tri_keys.size());
    for (const auto& tk : tri_keys)
        mesh.triangles.push_back({edge_vertices[tk[0]].index, edge_vertices[tk[1]].index,
                                  edge_vertices[tk[2]].index});
    return mesh;
}

}  // namespace recon
