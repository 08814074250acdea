#include "recon/vector_field.hpp"

#include <stdexcept>

namespace recon {

VectorGrid splat_normals(const SampleSet& samples, const Dims& dims) {
    VectorGrid g(dims);
    for (const auto& s : samples.samples)
        for (const auto& t : trilinear_weights(dims, s.point))
            g.at(t.i, t.j, t.k) += s.normal * t.weight;
    return g;
}

namespace {

// One 3-tap pass along `axis`, per component, zero padding outside.
VectorGrid box_pass(const VectorGrid& g, int axis) {
    VectorGrid out(g.dims);
    const int step[3] = {1, g.dims.x, g.dims.x * g.dims.y};
    const int extent[3] = {g.dims.x, g.dims.y, g.dims.z};
    const int stride = step[axis];
    const int count = extent[axis];
    const double third = 1.0 / 3.0;

    for (int k = 0; k < g.dims.z; ++k)
        for (int j = 0; j < g.dims.y; ++j)
            for (int i = 0; i < g.dims.x; ++i) {
                std::size_t idx = g.dims.index(i, j, k);
                int pos = axis == 0 ? i : (axis == 1 ? j : k);
                Vec3 acc = g.values[idx];
                if (pos > 0) acc += g.values[idx - stride];
                if (pos + 1 < count) acc += g.values[idx + stride];
                out.values[idx] = acc * third;
            }
    return out;
}

}  // namespace

VectorGrid box_smooth(const VectorGrid& g, int passes) {
    if (passes < 1) throw std::invalid_argument("box_smooth: passes must be >= 1");
    VectorGrid out = g;
    for (int p = 0; p < passes; ++p)
        for (int axis = 0; axis < 3; ++axis) out = box_pass(out, axis);
    return out;
}

ScalarGrid divergence(const VectorGrid& g) {
    if (g.dims.x < 3 || g.dims.y < 3 || g.dims.z < 3)
        throw std::invalid_argument("divergence: dims must be >= 3 per axis");
    ScalarGrid d(g.dims);
    auto diff = [](double prev, double next, bool has_prev, bool has_next) {
        if (has_prev && has_next) return (next - prev) * 0.5;
        return next - prev;  // one-sided at the boundary
    };
    for (int k = 0; k < g.dims.z; ++k)
        for (int j = 0; j < g.dims.y; ++j)
            for (int i = 0; i < g.dims.x; ++i) {
                bool ix0 = i > 0, ix1 = i + 1 < g.dims.x;
                bool iy0 = j > 0, iy1 = j + 1 < g.dims.y;
                bool iz0 = k > 0, iz1 = k + 1 < g.dims.z;
                double dx = diff(g.at(ix0 ? i - 1 : i, j, k).x, g.at(ix1 ? i + 1 : i, j, k).x, ix0, ix1);
                double dy = diff(g.at(i, iy0 ? j - 1 : j, k).y, g.at(i, iy1 ? j + 1 : j, k).y, iy0, iy1);
                double dz = diff(g.at(i, j, iz0 ? k - 1 : k).z, g.at(i, j, iz1 ? k + 1 : k).z, iz0, iz1);
                d.at(i, j, k) = dx + dy + dz;
            }
    return d;
}

ScalarGrid build_divergence(const SampleSet& samples, const Dims& dims, int passes) {
    return divergence(box_smooth(splat_normals(samples, dims), passes));
}

}  // namespace recon
