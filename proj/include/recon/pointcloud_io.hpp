#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "recon/mesh.hpp"
#include "recon/samples.hpp"

namespace recon {

/// File-level failure (missing file, unwritable path).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed content; the message carries the line or record index.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PointFormat { Ply, XyzNormal, Obj };
enum class MeshFormat { Ply, Obj };

PointFormat point_format_from_path(const std::string& path);
MeshFormat mesh_format_from_path(const std::string& path);

struct LoadOptions {
    /// Replace every normal with this direction (per-scan constant
    /// orientation); also permits inputs that carry no normals at all.
    std::optional<Vec3> constant_normal;
    bool normalize_normals = false;
};

struct LoadStats {
    std::size_t records = 0;               // valid samples loaded
    std::size_t zero_normal_rejected = 0;  // samples dropped for zero-length normals
};

/// Read an oriented point set in world coordinates, preserving file order.
/// Samples with zero-length normals are dropped and counted in `stats`.
SampleSet load_samples(const std::string& path, PointFormat format,
                       const LoadOptions& options = {}, LoadStats* stats = nullptr);

void save_samples(const SampleSet& samples, const std::string& path, PointFormat format,
                  bool binary = false);

/// PLY supports ascii and binary_little_endian with float32/float64 vertex
/// properties; OBJ uses v/vn/f records with 1-based indices.
TriangleMesh load_mesh(const std::string& path, MeshFormat format);

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format,
               bool binary = false);

}  // namespace recon
