#include "recon/samples.hpp"

#include <algorithm>
#include <stdexcept>

namespace recon {

DomainTransform fit_domain(const SampleSet& samples, const Dims& resolution, int margin_cells) {
    if (samples.empty()) throw std::invalid_argument("fit_domain: empty sample set");
    if (margin_cells < 0) throw std::invalid_argument("fit_domain: negative margin");

    int dim[3] = {resolution.x, resolution.y, resolution.z};
    double interior[3];
    for (int a = 0; a < 3; ++a) {
        interior[a] = dim[a] - 1 - 2 * margin_cells;
        if (interior[a] < 2)
            throw std::invalid_argument(
                "fit_domain: resolution too small for margin (interior < 2 cells)");
    }

    Vec3 lo = samples.samples.front().point;
    Vec3 hi = lo;
    for (const auto& s : samples.samples)
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], s.point[a]);
            hi[a] = std::max(hi[a], s.point[a]);
        }

    Vec3 extent = hi - lo;
    double max_extent = std::max({extent.x, extent.y, extent.z});
    if (max_extent <= 0.0) max_extent = 1.0;  // single repeated point
    for (int a = 0; a < 3; ++a)
        if (extent[a] <= 0.0) extent[a] = max_extent;

    double scale = 0.0;
    for (int a = 0; a < 3; ++a) scale = std::max(scale, extent[a] / interior[a]);
    scale *= 1.0 + 1e-12;  // keep extreme points inside the margin under roundoff

    Vec3 center = (lo + hi) * 0.5;
    DomainTransform t;
    t.resolution = resolution;
    t.scale = scale;
    for (int a = 0; a < 3; ++a) t.origin[a] = center[a] - scale * 0.5 * (dim[a] - 1);
    return t;
}

SampleSet to_grid(const SampleSet& samples, const DomainTransform& t) {
    SampleSet out;
    out.space = CoordSpace::Grid;
    out.samples.reserve(samples.size());
    for (const auto& s : samples.samples) out.samples.push_back({t.to_grid(s.point), s.normal});
    return out;
}

SampleSet to_world(const SampleSet& samples, const DomainTransform& t) {
    SampleSet out;
    out.space = CoordSpace::World;
    out.samples.reserve(samples.size());
    for (const auto& s : samples.samples) out.samples.push_back({t.to_world(s.point), s.normal});
    return out;
}

}  // namespace recon
