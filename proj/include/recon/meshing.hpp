#pragma once

#include "recon/grid.hpp"
#include "recon/mesh.hpp"
#include "recon/samples.hpp"

namespace recon {

/// Isovalue per the mean-of-samples rule: gamma = (1/|S|) sum_s f(p_s) with
/// trilinear interpolation. Samples must be in grid coordinates.
double select_isovalue(const ScalarGrid& f, const SampleSet& samples);

/// Table-driven marching cubes over the 256 corner configurations. Corners
/// with f == gamma are treated as inside (>=); their value is perturbed by
/// +1e-12 for the edge interpolation so crossings stay strictly interior.
/// Edge vertices are deduplicated through an edge-keyed map (canonical order:
/// sorted by edge key) and mapped to world coordinates via `transform`.
/// When `with_normals` is set, per-vertex normals are interpolated
/// central-difference gradients of f, negated to point outward.
TriangleMesh marching_cubes(const ScalarGrid& f, double gamma, const DomainTransform& transform,
                            bool with_normals = false);

}  // namespace recon
