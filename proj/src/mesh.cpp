#include "recon/mesh.hpp"

#include <algorithm>
#include <unordered_map>

namespace recon {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::unordered_map<std::uint64_t, int> edge_incidence(const TriangleMesh& mesh) {
    std::unordered_map<std::uint64_t, int> edges;
    edges.reserve(mesh.triangles.size() * 2);
    for (const auto& t : mesh.triangles) {
        edges[edge_key(t[0], t[1])]++;
        edges[edge_key(t[1], t[2])]++;
        edges[edge_key(t[2], t[0])]++;
    }
    return edges;
}

}  // namespace

MeshTopology mesh_topology(const TriangleMesh& mesh) {
    MeshTopology topo;
    topo.vertex_count = mesh.vertices.size();
    topo.triangle_count = mesh.triangles.size();
    auto edges = edge_incidence(mesh);
    topo.edge_count = edges.size();
    for (const auto& [key, count] : edges) {
        if (count == 1) topo.boundary_edges++;
        if (count > 2) topo.nonmanifold_edges++;
    }
    topo.euler_characteristic = static_cast<long long>(topo.vertex_count) -
                                static_cast<long long>(topo.edge_count) +
                                static_cast<long long>(topo.triangle_count);
    return topo;
}

std::vector<bool> boundary_vertex_mask(const TriangleMesh& mesh) {
    std::vector<bool> mask(mesh.vertices.size(), false);
    auto edges = edge_incidence(mesh);
    for (const auto& [key, count] : edges) {
        if (count != 2) {
            mask[static_cast<std::uint32_t>(key >> 32)] = true;
            mask[static_cast<std::uint32_t>(key & 0xffffffffu)] = true;
        }
    }
    return mask;
}

}  // namespace recon
