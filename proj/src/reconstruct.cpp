#include "recon/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "recon/meshing.hpp"
#include "recon/vector_field.hpp"

namespace recon {

namespace {

Vec3 clamp_into(const Vec3& p, const Dims& d) {
    return {std::clamp(p.x, 0.0, static_cast<double>(d.x - 1)),
            std::clamp(p.y, 0.0, static_cast<double>(d.y - 1)),
            std::clamp(p.z, 0.0, static_cast<double>(d.z - 1))};
}

// Positive when f is larger on the -n side of the samples (inside under the
// outward-normal convention), negative when the solve came out sign-flipped.
double inside_bias(const ScalarGrid& f, const SampleSet& grid_samples) {
    const double probe = 2.0;  // cells
    double acc = 0.0;
    for (const auto& s : grid_samples.samples) {
        Vec3 n = normalized(s.normal);
        double inside = sample_trilinear(f, clamp_into(s.point - n * probe, f.dims));
        double outside = sample_trilinear(f, clamp_into(s.point + n * probe, f.dims));
        acc += inside - outside;
    }
    return acc;
}

}  // namespace

ReconResult reconstruct(const SampleSet& world_samples, const ReconConfig& config,
                        std::ostream* log) {
    auto t0 = std::chrono::steady_clock::now();
    ReconResult result;

    result.transform = fit_domain(world_samples, config.grid, config.margin_cells);
    SampleSet grid_samples = to_grid(world_samples, result.transform);

    ScalarGrid b = build_divergence(grid_samples, config.grid, config.passes);

    SolverParams params;
    params.lambda = config.lambda;
    params.tol = config.tol;
    params.max_sweeps = config.max_sweeps;
    params.clamp = config.clamp;
    params.levels = config.levels;
    params.narrow_band_radius = config.narrow_band_radius;
    params.verbose_log = config.verbose ? log : nullptr;

    result.field = multiscale_solve(b, config.model, params, &grid_samples, &result.solve);

    if (inside_bias(result.field, grid_samples) < 0.0) {
        for (double& v : result.field.values) v = -v;
        result.flipped = true;
    }

    result.gamma = select_isovalue(result.field, grid_samples);
    result.mesh = marching_cubes(result.field, result.gamma, result.transform,
                                 config.with_normals);

    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (log) {
        for (const auto& lvl : result.solve.levels)
            *log << "level dims=" << lvl.dims.x << "x" << lvl.dims.y << "x" << lvl.dims.z
                 << " sweeps=" << lvl.sweeps << " delta=" << lvl.final_delta << "\n";
        *log << "model=" << energy_model_name(config.model) << " lambda=" << config.lambda
             << " gamma=" << result.gamma << (result.flipped ? " (field sign flipped)" : "")
             << "\n"
             << "mesh vertices=" << result.mesh.vertices.size()
             << " triangles=" << result.mesh.triangles.size() << " seconds=" << result.seconds
             << "\n";
    }
    return result;
}

}  // namespace recon
