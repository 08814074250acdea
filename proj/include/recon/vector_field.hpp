#pragma once

#include "recon/grid.hpp"
#include "recon/samples.hpp"

namespace recon {

/// Distribute each sample's orientation vector to the eight corners of its
/// cell with trilinear weights. The componentwise grid total equals the sum
/// of all sample normals. Samples must be in grid coordinates.
VectorGrid splat_normals(const SampleSet& samples, const Dims& dims);

/// Separable 3-tap box filter ([1,1,1]/3 per axis, zero padding), applied
/// `passes` times per component. Three passes approximate a Gaussian.
VectorGrid box_smooth(const VectorGrid& g, int passes);

/// Central-difference divergence on interior voxels, one-sided differences
/// on the boundary (h = 1). Requires dims >= 3 per axis.
ScalarGrid divergence(const VectorGrid& g);

/// divergence(box_smooth(splat_normals(samples, dims), passes)) — the linear
/// term b of the discrete energy.
ScalarGrid build_divergence(const SampleSet& samples, const Dims& dims, int passes);

}  // namespace recon
