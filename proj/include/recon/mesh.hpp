#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "recon/vec3.hpp"

namespace recon {

/// Indexed triangle mesh. Winding is consistent: triangle normals point from
/// the f-larger (inside) region toward the f-smaller (outside) region, i.e.
/// outward under the pipeline's orientation convention.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<Vec3> normals;  // per-vertex, optional (empty or vertices.size())

    bool empty() const { return triangles.empty(); }
    bool has_normals() const { return normals.size() == vertices.size(); }
};

/// Edge-incidence summary used for watertightness and genus checks.
struct MeshTopology {
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    std::size_t triangle_count = 0;
    std::size_t boundary_edges = 0;      // edges with exactly 1 incident triangle
    std::size_t nonmanifold_edges = 0;   // edges with more than 2 incident triangles
    long long euler_characteristic = 0;  // V - E + F

    bool watertight() const { return boundary_edges == 0 && nonmanifold_edges == 0; }
};

MeshTopology mesh_topology(const TriangleMesh& mesh);

/// Vertices incident to an edge with != 2 triangles. Empty for watertight
/// meshes; used to exclude boundary vertices from curvature statistics.
std::vector<bool> boundary_vertex_mask(const TriangleMesh& mesh);

}  // namespace recon
