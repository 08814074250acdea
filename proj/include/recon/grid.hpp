#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "recon/vec3.hpp"

namespace recon {

/// Grid resolution (m, n, l). Linear storage is x-fastest:
/// index(i,j,k) = i + m*(j + n*k).
struct Dims {
    int x = 0, y = 0, z = 0;

    constexpr bool operator==(const Dims&) const = default;
    std::size_t size() const {
        return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
               static_cast<std::size_t>(z);
    }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(x) * (static_cast<std::size_t>(j) +
                                              static_cast<std::size_t>(y) * static_cast<std::size_t>(k));
    }
    bool contains(int i, int j, int k) const {
        return i >= 0 && i < x && j >= 0 && j < y && k >= 0 && k < z;
    }
};

/// Regular 3D grid of scalars. Spacing is 1 in grid coordinates; world
/// scaling lives in DomainTransform.
struct ScalarGrid {
    Dims dims;
    std::vector<double> values;

    ScalarGrid() = default;
    explicit ScalarGrid(Dims d, double fill = 0.0) : dims(d), values(d.size(), fill) {}

    double& at(int i, int j, int k) { return values[dims.index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[dims.index(i, j, k)]; }
    /// Read with Dirichlet-0 exterior.
    double at_or_zero(int i, int j, int k) const {
        return dims.contains(i, j, k) ? values[dims.index(i, j, k)] : 0.0;
    }
    double sum() const;
};

/// Regular 3D grid of 3-vectors, same layout as ScalarGrid.
struct VectorGrid {
    Dims dims;
    std::vector<Vec3> values;

    VectorGrid() = default;
    explicit VectorGrid(Dims d) : dims(d), values(d.size()) {}

    Vec3& at(int i, int j, int k) { return values[dims.index(i, j, k)]; }
    const Vec3& at(int i, int j, int k) const { return values[dims.index(i, j, k)]; }
};

/// One corner of the cell containing an interpolation point.
struct TrilinearTerm {
    int i, j, k;
    double weight;
};

/// Trilinear weights of p against the eight corners of its cell. Weights are
/// (1-dx)(1-dy)(1-dz) ... dx*dy*dz where dx,dy,dz are the offsets of p from
/// the cell's smallest corner. Points on the upper boundary clamp into the
/// last cell. Throws std::out_of_range if p lies outside [0, dim-1].
std::array<TrilinearTerm, 8> trilinear_weights(const Dims& dims, const Vec3& p);

/// Trilinear interpolation of g at p (grid coordinates).
double sample_trilinear(const ScalarGrid& g, const Vec3& p);

/// Halve the resolution by summing 2x2x2 blocks; partial blocks at odd
/// boundaries sum the cells that exist. Conserves the grid total.
ScalarGrid downsample_sum(const ScalarGrid& g);

/// Interpolate a coarse grid onto the next finer pyramid level: fine vertex i
/// maps to coarse coordinate i/2 (clamped). target_dims must satisfy
/// ceil(target/2) == coarse dims per axis.
ScalarGrid upsample_trilinear(const ScalarGrid& g, const Dims& target_dims);

/// Debug dump: three little-endian int32 (m, n, l) followed by m*n*l
/// little-endian float32 values, x-fastest.
void dump_raw(const ScalarGrid& g, const std::string& path);

}  // namespace recon
