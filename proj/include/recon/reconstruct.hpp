#pragma once

#include <iosfwd>
#include <optional>

#include "recon/energy.hpp"
#include "recon/mesh.hpp"
#include "recon/samples.hpp"

namespace recon {

/// Full pipeline configuration with documented defaults.
struct ReconConfig {
    Dims grid{64, 64, 64};
    EnergyModel model = EnergyModel::SecondOrderMixed;
    double lambda = 0.2;
    int levels = 3;
    double tol = 1e-6;
    int max_sweeps = 2000;
    bool clamp = true;
    std::optional<double> narrow_band_radius;
    int passes = 3;       // box-filter smoothing passes
    int margin_cells = 6; // keeps the smoothed field away from the grid boundary
    bool with_normals = false;
    bool verbose = false;
};

struct ReconResult {
    TriangleMesh mesh;  // world coordinates
    ScalarGrid field;   // solved embedding function, grid coordinates
    DomainTransform transform;
    double gamma = 0.0;
    bool flipped = false;  // field negated so f is larger inside than outside
    MultiscaleStats solve;
    double seconds = 0.0;
};

/// fit_domain -> to_grid -> build_divergence -> multiscale_solve ->
/// select_isovalue -> marching_cubes -> world mapping. Writes per-level
/// convergence, the isovalue and the mesh size to `log` when given; verbose
/// per-sweep lines also go there.
ReconResult reconstruct(const SampleSet& world_samples, const ReconConfig& config,
                        std::ostream* log = nullptr);

}  // namespace recon
