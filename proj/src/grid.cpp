#include "recon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace recon {

double ScalarGrid::sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

std::array<TrilinearTerm, 8> trilinear_weights(const Dims& dims, const Vec3& p) {
    for (int a = 0; a < 3; ++a) {
        double hi = static_cast<double>((a == 0 ? dims.x : (a == 1 ? dims.y : dims.z)) - 1);
        if (!(p[a] >= 0.0 && p[a] <= hi))
            throw std::out_of_range("trilinear_weights: point outside grid");
    }
    auto cell = [](double c, int dim) {
        int i0 = static_cast<int>(std::floor(c));
        i0 = std::clamp(i0, 0, std::max(dim - 2, 0));
        return i0;
    };
    int i0 = cell(p.x, dims.x);
    int j0 = cell(p.y, dims.y);
    int k0 = cell(p.z, dims.z);
    int i1 = std::min(i0 + 1, dims.x - 1);
    int j1 = std::min(j0 + 1, dims.y - 1);
    int k1 = std::min(k0 + 1, dims.z - 1);
    double dx = p.x - i0, dy = p.y - j0, dz = p.z - k0;

    return {{
        {i0, j0, k0, (1 - dx) * (1 - dy) * (1 - dz)},
        {i1, j0, k0, dx * (1 - dy) * (1 - dz)},
        {i0, j1, k0, (1 - dx) * dy * (1 - dz)},
        {i1, j1, k0, dx * dy * (1 - dz)},
        {i0, j0, k1, (1 - dx) * (1 - dy) * dz},
        {i1, j0, k1, dx * (1 - dy) * dz},
        {i0, j1, k1, (1 - dx) * dy * dz},
        {i1, j1, k1, dx * dy * dz},
    }};
}

double sample_trilinear(const ScalarGrid& g, const Vec3& p) {
    double v = 0.0;
    for (const auto& t : trilinear_weights(g.dims, p))
        v += t.weight * g.at(t.i, t.j, t.k);
    return v;
}

ScalarGrid downsample_sum(const ScalarGrid& g) {
    if (g.dims.x < 2 || g.dims.y < 2 || g.dims.z < 2)
        throw std::invalid_argument("downsample_sum: each dimension must be >= 2");
    Dims out{(g.dims.x + 1) / 2, (g.dims.y + 1) / 2, (g.dims.z + 1) / 2};
    ScalarGrid r(out);
    for (int k = 0; k < g.dims.z; ++k)
        for (int j = 0; j < g.dims.y; ++j)
            for (int i = 0; i < g.dims.x; ++i)
                r.at(i / 2, j / 2, k / 2) += g.at(i, j, k);
    return r;
}

ScalarGrid upsample_trilinear(const ScalarGrid& g, const Dims& target_dims) {
    Dims expect{(target_dims.x + 1) / 2, (target_dims.y + 1) / 2, (target_dims.z + 1) / 2};
    if (!(expect == g.dims))
        throw std::invalid_argument("upsample_trilinear: target dims are not the next finer level");
    ScalarGrid r(target_dims);
    auto coarse = [](int i, int dim) { return std::min(0.5 * i, static_cast<double>(dim - 1)); };
    for (int k = 0; k < target_dims.z; ++k)
        for (int j = 0; j < target_dims.y; ++j)
            for (int i = 0; i < target_dims.x; ++i)
                r.at(i, j, k) = sample_trilinear(
                    g, {coarse(i, g.dims.x), coarse(j, g.dims.y), coarse(k, g.dims.z)});
    return r;
}

void dump_raw(const ScalarGrid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_raw: cannot open " + path);
    std::int32_t header[3] = {g.dims.x, g.dims.y, g.dims.z};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::vector<float> buf(g.values.size());
    std::transform(g.values.begin(), g.values.end(), buf.begin(),
                   [](double v) { return static_cast<float>(v); });
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw std::runtime_error("dump_raw: write failed for " + path);
}

}  // namespace recon
