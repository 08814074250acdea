#pragma once

#include <vector>

#include "recon/grid.hpp"
#include "recon/vec3.hpp"

namespace recon {

enum class CoordSpace { World, Grid };

/// An oriented sample: a point plus a weak surface-orientation estimate.
/// Normals are not required to be unit length.
struct Sample {
    Vec3 point;
    Vec3 normal;
};

struct SampleSet {
    std::vector<Sample> samples;
    CoordSpace space = CoordSpace::World;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
};

/// Similarity mapping between world coordinates and the grid domain.
/// Grid spacing is 1; `scale` is world units per grid cell.
struct DomainTransform {
    Vec3 origin;
    double scale = 1.0;
    Dims resolution;

    Vec3 to_grid(const Vec3& p) const { return (p - origin) / scale; }
    Vec3 to_world(const Vec3& p) const { return p * scale + origin; }
};

/// Fit an isotropic world-to-grid mapping so the sample bounding box sits
/// centered inside the margin-shrunk grid. Degenerate (zero-extent) axes are
/// inflated to the largest axis extent. Throws std::invalid_argument when the
/// samples are empty or the resolution leaves fewer than 2 interior cells per
/// axis after the margin.
DomainTransform fit_domain(const SampleSet& samples, const Dims& resolution, int margin_cells);

/// Map sample points into grid coordinates via (p - origin)/scale. Normals
/// are direction-only and pass through unchanged.
SampleSet to_grid(const SampleSet& samples, const DomainTransform& t);

/// Inverse of to_grid.
SampleSet to_world(const SampleSet& samples, const DomainTransform& t);

}  // namespace recon
