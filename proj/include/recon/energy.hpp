#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "recon/grid.hpp"
#include "recon/samples.hpp"

namespace recon {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Smoothness measures. Membrane penalizes squared first differences,
/// SecondOrder the three pure second differences, SecondOrderMixed adds the
/// mixed second differences with weight 2 (rotationally invariant form).
/// TotalVariation is the L1 gradient norm and has no fixed linear operator.
enum class EnergyModel { Membrane = 1, TotalVariation = 2, SecondOrder = 3, SecondOrderMixed = 4 };

inline bool is_quadratic(EnergyModel m) { return m != EnergyModel::TotalVariation; }

const char* energy_model_name(EnergyModel m);

struct SolverParams {
    double lambda = 0.2;    // smoothness weight, > 0
    double tol = 1e-6;      // max-norm of the sweep delta that stops iteration
    int max_sweeps = 2000;  // per level
    bool clamp = true;      // project iterates into [-1, 1]
    int levels = 3;
    std::optional<double> narrow_band_radius;  // cells (Chebyshev); off when unset
    double tv_epsilon = 1e-4;                  // gradient-magnitude regularizer for TV
    int tv_max_outer = 50;
    std::ostream* verbose_log = nullptr;  // per-sweep machine-readable lines when set
};

struct SolveStats {
    int sweeps = 0;
    double final_delta = 0.0;
};

struct LevelStats {
    Dims dims;
    int sweeps = 0;
    double final_delta = 0.0;
};

struct MultiscaleStats {
    std::vector<LevelStats> levels;  // coarsest first
};

/// A*x for the symmetric positive definite operator of the quadratic form
/// E_s = x'Ax assembled from the per-voxel difference stencils (h = 1).
/// Stencil rows exist at every voxel; reads outside the grid are zero
/// (Dirichlet-0 exterior). Throws for TotalVariation.
ScalarGrid apply_smoothness_operator(const ScalarGrid& x, EnergyModel model);

/// E_s alone: x'Ax for quadratic models (computed as the row-wise sum of
/// squared stencil values), or the L1 gradient sum for TotalVariation.
double smoothness_energy(const ScalarGrid& x, EnergyModel model);

/// Total energy lambda*E_s + x'b.
double energy_value(const ScalarGrid& x, const ScalarGrid& b, const SolverParams& params,
                    EnergyModel model);

/// Voxels within `radius` cells (Chebyshev distance) of any sample point.
/// Samples must be in grid coordinates of `dims`.
std::vector<bool> narrow_band_mask(const Dims& dims, const SampleSet& samples, double radius);

/// Lexicographic projected Gauss-Seidel for A x = -b/(2 lambda), matrix-free.
/// Starts from x0; when update_mask is given, voxels outside the mask retain
/// their x0 value. Stops when the max-norm sweep delta reaches params.tol or
/// after params.max_sweeps sweeps.
ScalarGrid gauss_seidel_solve(const ScalarGrid& b, EnergyModel model, const SolverParams& params,
                              const ScalarGrid& x0, SolveStats* stats = nullptr,
                              const std::vector<bool>* update_mask = nullptr);

/// Total-variation smoothness via lagged-diffusivity outer iterations: each
/// outer step solves a weighted-membrane quadratic with per-voxel weights
/// 1/(2*sqrt(|grad f|^2 + eps^2)) using the Gauss-Seidel machinery. The
/// eps-smoothed TV-plus-data energy is checked to be non-increasing across
/// outer iterations.
ScalarGrid tv_solve(const ScalarGrid& b, const SolverParams& params, const ScalarGrid& x0,
                    SolveStats* stats = nullptr);

/// Coarse-to-fine solve: the divergence is downsampled by summation
/// (levels-1 times), the coarsest level starts from zero, and each finer
/// level starts from the trilinearly upsampled coarser solution. With
/// levels = 1 this is identical to gauss_seidel_solve from zero. `samples`
/// (grid coordinates of the finest level) enables the narrow band on the
/// non-coarsest levels when params.narrow_band_radius is set.
ScalarGrid multiscale_solve(const ScalarGrid& b_fine, EnergyModel model,
                            const SolverParams& params, const SampleSet* samples = nullptr,
                            MultiscaleStats* stats = nullptr);

}  // namespace recon
