#include "recon/energy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace recon {

namespace {

constexpr int kAxisStep[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

// Difference-stencil row values at voxel (i,j,k), h = 1. Rows exist at every
// voxel; reads outside the grid are zero (Dirichlet-0 exterior).

inline double first_diff(const ScalarGrid& x, int i, int j, int k, int a) {
    const int* e = kAxisStep[a];
    return x.at_or_zero(i + e[0], j + e[1], k + e[2]) - x.at(i, j, k);
}

inline double second_diff(const ScalarGrid& x, int i, int j, int k, int a) {
    const int* e = kAxisStep[a];
    return x.at_or_zero(i - e[0], j - e[1], k - e[2]) - 2.0 * x.at(i, j, k) +
           x.at_or_zero(i + e[0], j + e[1], k + e[2]);
}

inline double mixed_diff(const ScalarGrid& x, int i, int j, int k, int a, int b) {
    const int* ea = kAxisStep[a];
    const int* eb = kAxisStep[b];
    return 0.25 * (x.at_or_zero(i + ea[0] + eb[0], j + ea[1] + eb[1], k + ea[2] + eb[2]) -
                   x.at_or_zero(i + ea[0] - eb[0], j + ea[1] - eb[1], k + ea[2] - eb[2]) -
                   x.at_or_zero(i - ea[0] + eb[0], j - ea[1] + eb[1], k - ea[2] + eb[2]) +
                   x.at_or_zero(i - ea[0] - eb[0], j - ea[1] - eb[1], k - ea[2] - eb[2]));
}

// (A x) at one voxel, assembled as sum over the stencil rows that read this
// voxel: A = sum_s c_s D_s' D_s.
double row_apply_general(const ScalarGrid& x, int i, int j, int k, EnergyModel model) {
    const Dims& d = x.dims;
    double acc = 0.0;
    if (model == EnergyModel::Membrane) {
        for (int a = 0; a < 3; ++a) {
            const int* e = kAxisStep[a];
            if (d.contains(i - e[0], j - e[1], k - e[2]))
                acc += first_diff(x, i - e[0], j - e[1], k - e[2], a);
            acc -= first_diff(x, i, j, k, a);
        }
        return acc;
    }
    for (int a = 0; a < 3; ++a) {
        const int* e = kAxisStep[a];
        if (d.contains(i - e[0], j - e[1], k - e[2]))
            acc += second_diff(x, i - e[0], j - e[1], k - e[2], a);
        acc -= 2.0 * second_diff(x, i, j, k, a);
        if (d.contains(i + e[0], j + e[1], k + e[2]))
            acc += second_diff(x, i + e[0], j + e[1], k + e[2], a);
    }
    if (model == EnergyModel::SecondOrderMixed) {
        constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (const auto& pq : pairs) {
            const int* ea = kAxisStep[pq[0]];
            const int* eb = kAxisStep[pq[1]];
            for (int sa = -1; sa <= 1; sa += 2)
                for (int sb = -1; sb <= 1; sb += 2) {
                    int ri = i - sa * ea[0] - sb * eb[0];
                    int rj = j - sa * ea[1] - sb * eb[1];
                    int rk = k - sa * ea[2] - sb * eb[2];
                    if (d.contains(ri, rj, rk))
                        acc += 2.0 * (sa * sb * 0.25) * mixed_diff(x, ri, rj, rk, pq[0], pq[1]);
                }
        }
    }
    return acc;
}

double diag_general(const Dims& d, int i, int j, int k, EnergyModel model) {
    double diag = 0.0;
    if (model == EnergyModel::Membrane) {
        for (int a = 0; a < 3; ++a) {
            const int* e = kAxisStep[a];
            diag += 1.0 + (d.contains(i - e[0], j - e[1], k - e[2]) ? 1.0 : 0.0);
        }
        return diag;
    }
    for (int a = 0; a < 3; ++a) {
        const int* e = kAxisStep[a];
        diag += 4.0;
        if (d.contains(i - e[0], j - e[1], k - e[2])) diag += 1.0;
        if (d.contains(i + e[0], j + e[1], k + e[2])) diag += 1.0;
    }
    if (model == EnergyModel::SecondOrderMixed) {
        constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (const auto& pq : pairs) {
            const int* ea = kAxisStep[pq[0]];
            const int* eb = kAxisStep[pq[1]];
            for (int sa = -1; sa <= 1; sa += 2)
                for (int sb = -1; sb <= 1; sb += 2)
                    if (d.contains(i - sa * ea[0] - sb * eb[0], j - sa * ea[1] - sb * eb[1],
                                   k - sa * ea[2] - sb * eb[2]))
                        diag += 2.0 / 16.0;
        }
    }
    return diag;
}

// Fused constant-coefficient stencil for voxels away from the boundary,
// probed from the general path so both stay consistent by construction.
struct InteriorKernel {
    struct Term {
        std::ptrdiff_t delta;
        double coef;
    };
    std::vector<Term> offdiag;
    double diag = 0.0;
    int margin = 0;
};

InteriorKernel build_interior_kernel(EnergyModel model, const Dims& dims) {
    InteriorKernel kern;
    kern.margin = model == EnergyModel::Membrane ? 1 : 2;
    ScalarGrid probe({9, 9, 9});
    const int c = 4;
    for (int dk = -2; dk <= 2; ++dk)
        for (int dj = -2; dj <= 2; ++dj)
            for (int di = -2; di <= 2; ++di) {
                std::fill(probe.values.begin(), probe.values.end(), 0.0);
                probe.at(c + di, c + dj, c + dk) = 1.0;
                double coef = row_apply_general(probe, c, c, c, model);
                if (coef == 0.0) continue;
                if (di == 0 && dj == 0 && dk == 0) {
                    kern.diag = coef;
                } else {
                    std::ptrdiff_t delta =
                        di + static_cast<std::ptrdiff_t>(dims.x) *
                                 (dj + static_cast<std::ptrdiff_t>(dims.y) * dk);
                    kern.offdiag.push_back({delta, coef});
                }
            }
    return kern;
}

void require_quadratic(EnergyModel model, const char* op) {
    if (!is_quadratic(model))
        throw std::invalid_argument(std::string(op) + ": total-variation model has no fixed linear operator");
}

void require_same_dims(const ScalarGrid& a, const ScalarGrid& b, const char* op) {
    if (!(a.dims == b.dims)) throw std::invalid_argument(std::string(op) + ": grid dims mismatch");
}

void validate_params(const SolverParams& p) {
    if (!(p.lambda > 0.0)) throw std::invalid_argument("solver: lambda must be > 0");
    if (!(p.tol > 0.0)) throw std::invalid_argument("solver: tol must be > 0");
    if (p.max_sweeps < 1) throw std::invalid_argument("solver: max_sweeps must be >= 1");
    if (p.levels < 1) throw std::invalid_argument("solver: levels must be >= 1");
}

void check_finite(const ScalarGrid& g, const char* what) {
    for (std::size_t v = 0; v < g.values.size(); ++v)
        if (!std::isfinite(g.values[v])) {
            int i = static_cast<int>(v % g.dims.x);
            int j = static_cast<int>((v / g.dims.x) % g.dims.y);
            int k = static_cast<int>(v / (static_cast<std::size_t>(g.dims.x) * g.dims.y));
            throw SolverError(std::string(what) + ": non-finite value at voxel (" +
                              std::to_string(i) + "," + std::to_string(j) + "," +
                              std::to_string(k) + ")");
        }
}

double gs_sweep(ScalarGrid& x, const ScalarGrid& rhs, EnergyModel model,
                const InteriorKernel& kern, bool clamp, const std::vector<bool>* mask) {
    const Dims d = x.dims;
    const int M = kern.margin;
    double delta = 0.0;
    std::size_t idx = 0;
    for (int k = 0; k < d.z; ++k) {
        const bool k_in = k >= M && k < d.z - M;
        for (int j = 0; j < d.y; ++j) {
            const bool row_in = k_in && j >= M && j < d.y - M;
            for (int i = 0; i < d.x; ++i, ++idx) {
                if (mask && !(*mask)[idx]) continue;
                double ax, diag;
                if (row_in && i >= M && i < d.x - M) {
                    double acc = kern.diag * x.values[idx];
                    for (const auto& t : kern.offdiag) acc += t.coef * x.values[idx + t.delta];
                    ax = acc;
                    diag = kern.diag;
                } else {
                    ax = row_apply_general(x, i, j, k, model);
                    diag = diag_general(d, i, j, k, model);
                }
                double next = x.values[idx] + (rhs.values[idx] - ax) / diag;
                if (clamp) next = std::clamp(next, -1.0, 1.0);
                double change = std::abs(next - x.values[idx]);
                if (change > delta) delta = change;
                x.values[idx] = next;
            }
        }
    }
    return delta;
}

ScalarGrid gauss_seidel_impl(const ScalarGrid& b, EnergyModel model, const SolverParams& params,
                             const ScalarGrid& x0, SolveStats* stats,
                             const std::vector<bool>* mask, int level_tag) {
    require_quadratic(model, "gauss_seidel_solve");
    require_same_dims(b, x0, "gauss_seidel_solve");
    validate_params(params);
    if (mask && mask->size() != b.values.size())
        throw std::invalid_argument("gauss_seidel_solve: mask size mismatch");
    check_finite(b, "gauss_seidel_solve(b)");
    check_finite(x0, "gauss_seidel_solve(x0)");

    ScalarGrid rhs = b;
    const double scale = -1.0 / (2.0 * params.lambda);
    for (double& v : rhs.values) v *= scale;

    InteriorKernel kern = build_interior_kernel(model, b.dims);
    ScalarGrid x = x0;
    int sweeps = 0;
    double delta = 0.0;
    while (sweeps < params.max_sweeps) {
        delta = gs_sweep(x, rhs, model, kern, params.clamp, mask);
        ++sweeps;
        if (!std::isfinite(delta)) check_finite(x, "gauss_seidel_solve");
        if (params.verbose_log)
            *params.verbose_log << "gs level=" << level_tag << " sweep=" << sweeps
                                << " delta=" << delta
                                << " energy=" << energy_value(x, b, params, model) << "\n";
        if (delta <= params.tol) break;
    }
    if (stats) {
        stats->sweeps = sweeps;
        stats->final_delta = delta;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Weighted membrane rows for the TV inner solves: per-voxel row weight w(v)
// shared by the three forward differences anchored at v.
// ---------------------------------------------------------------------------

double weighted_membrane_row(const ScalarGrid& x, const ScalarGrid& w, int i, int j, int k) {
    const Dims& d = x.dims;
    double acc = 0.0;
    for (int a = 0; a < 3; ++a) {
        const int* e = kAxisStep[a];
        if (d.contains(i - e[0], j - e[1], k - e[2]))
            acc += w.at(i - e[0], j - e[1], k - e[2]) *
                   first_diff(x, i - e[0], j - e[1], k - e[2], a);
        acc -= w.at(i, j, k) * first_diff(x, i, j, k, a);
    }
    return acc;
}

double weighted_membrane_diag(const ScalarGrid& w, int i, int j, int k) {
    const Dims& d = w.dims;
    double diag = 0.0;
    for (int a = 0; a < 3; ++a) {
        const int* e = kAxisStep[a];
        diag += w.at(i, j, k);
        if (d.contains(i - e[0], j - e[1], k - e[2])) diag += w.at(i - e[0], j - e[1], k - e[2]);
    }
    return diag;
}

double gradient_magnitude2(const ScalarGrid& x, int i, int j, int k) {
    double gx = first_diff(x, i, j, k, 0);
    double gy = first_diff(x, i, j, k, 1);
    double gz = first_diff(x, i, j, k, 2);
    return gx * gx + gy * gy + gz * gz;
}

double smoothed_tv_energy(const ScalarGrid& x, const ScalarGrid& b, const SolverParams& p) {
    double es = 0.0, eb = 0.0;
    const Dims& d = x.dims;
    for (int k = 0; k < d.z; ++k)
        for (int j = 0; j < d.y; ++j)
            for (int i = 0; i < d.x; ++i) {
                es += std::sqrt(gradient_magnitude2(x, i, j, k) + p.tv_epsilon * p.tv_epsilon);
                eb += x.at(i, j, k) * b.at(i, j, k);
            }
    return p.lambda * es + eb;
}

}  // namespace

const char* energy_model_name(EnergyModel m) {
    switch (m) {
        case EnergyModel::Membrane: return "membrane";
        case EnergyModel::TotalVariation: return "total-variation";
        case EnergyModel::SecondOrder: return "second-order";
        case EnergyModel::SecondOrderMixed: return "second-order-mixed";
    }
    return "?";
}

ScalarGrid apply_smoothness_operator(const ScalarGrid& x, EnergyModel model) {
    require_quadratic(model, "apply_smoothness_operator");
    InteriorKernel kern = build_interior_kernel(model, x.dims);
    ScalarGrid out(x.dims);
    const Dims d = x.dims;
    const int M = kern.margin;
    std::size_t idx = 0;
    for (int k = 0; k < d.z; ++k) {
        const bool k_in = k >= M && k < d.z - M;
        for (int j = 0; j < d.y; ++j) {
            const bool row_in = k_in && j >= M && j < d.y - M;
            for (int i = 0; i < d.x; ++i, ++idx) {
                if (row_in && i >= M && i < d.x - M) {
                    double acc = kern.diag * x.values[idx];
                    for (const auto& t : kern.offdiag) acc += t.coef * x.values[idx + t.delta];
                    out.values[idx] = acc;
                } else {
                    out.values[idx] = row_apply_general(x, i, j, k, model);
                }
            }
        }
    }
    return out;
}

double smoothness_energy(const ScalarGrid& x, EnergyModel model) {
    const Dims& d = x.dims;
    double es = 0.0;
    if (model == EnergyModel::TotalVariation) {
        for (int k = 0; k < d.z; ++k)
            for (int j = 0; j < d.y; ++j)
                for (int i = 0; i < d.x; ++i) es += std::sqrt(gradient_magnitude2(x, i, j, k));
        return es;
    }
    for (int k = 0; k < d.z; ++k)
        for (int j = 0; j < d.y; ++j)
            for (int i = 0; i < d.x; ++i) {
                if (model == EnergyModel::Membrane) {
                    for (int a = 0; a < 3; ++a) {
                        double g = first_diff(x, i, j, k, a);
                        es += g * g;
                    }
                } else {
                    for (int a = 0; a < 3; ++a) {
                        double s = second_diff(x, i, j, k, a);
                        es += s * s;
                    }
                    if (model == EnergyModel::SecondOrderMixed) {
                        constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
                        for (const auto& pq : pairs) {
                            double m = mixed_diff(x, i, j, k, pq[0], pq[1]);
                            es += 2.0 * m * m;
                        }
                    }
                }
            }
    return es;
}

double energy_value(const ScalarGrid& x, const ScalarGrid& b, const SolverParams& params,
                    EnergyModel model) {
    require_same_dims(x, b, "energy_value");
    double eb = 0.0;
    for (std::size_t v = 0; v < x.values.size(); ++v) eb += x.values[v] * b.values[v];
    return params.lambda * smoothness_energy(x, model) + eb;
}

std::vector<bool> narrow_band_mask(const Dims& dims, const SampleSet& samples, double radius) {
    if (radius < 0.0) throw std::invalid_argument("narrow_band_mask: negative radius");
    std::vector<bool> mask(dims.size(), false);
    for (const auto& s : samples.samples) {
        int lo[3], hi[3];
        const int ext[3] = {dims.x, dims.y, dims.z};
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::max(0, static_cast<int>(std::ceil(s.point[a] - radius)));
            hi[a] = std::min(ext[a] - 1, static_cast<int>(std::floor(s.point[a] + radius)));
        }
        for (int k = lo[2]; k <= hi[2]; ++k)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int i = lo[0]; i <= hi[0]; ++i) mask[dims.index(i, j, k)] = true;
    }
    return mask;
}

ScalarGrid gauss_seidel_solve(const ScalarGrid& b, EnergyModel model, const SolverParams& params,
                              const ScalarGrid& x0, SolveStats* stats,
                              const std::vector<bool>* update_mask) {
    return gauss_seidel_impl(b, model, params, x0, stats, update_mask, 0);
}

ScalarGrid tv_solve(const ScalarGrid& b, const SolverParams& params, const ScalarGrid& x0,
                    SolveStats* stats) {
    require_same_dims(b, x0, "tv_solve");
    validate_params(params);
    if (!(params.tv_epsilon > 0.0)) throw std::invalid_argument("tv_solve: tv_epsilon must be > 0");
    check_finite(b, "tv_solve(b)");
    check_finite(x0, "tv_solve(x0)");

    const Dims d = b.dims;
    ScalarGrid x = x0;
    ScalarGrid rhs = b;
    const double scale = -1.0 / (2.0 * params.lambda);
    for (double& v : rhs.values) v *= scale;

    double energy_prev = smoothed_tv_energy(x, b, params);
    int total_inner = 0;
    double outer_delta = 0.0;

    for (int outer = 1; outer <= params.tv_max_outer; ++outer) {
        ScalarGrid w(d);
        for (int k = 0; k < d.z; ++k)
            for (int j = 0; j < d.y; ++j)
                for (int i = 0; i < d.x; ++i)
                    w.at(i, j, k) = 1.0 / (2.0 * std::sqrt(gradient_magnitude2(x, i, j, k) +
                                                           params.tv_epsilon * params.tv_epsilon));

        ScalarGrid x_prev = x;
        for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
            double delta = 0.0;
            std::size_t idx = 0;
            for (int k = 0; k < d.z; ++k)
                for (int j = 0; j < d.y; ++j)
                    for (int i = 0; i < d.x; ++i, ++idx) {
                        double ax = weighted_membrane_row(x, w, i, j, k);
                        double diag = weighted_membrane_diag(w, i, j, k);
                        double next = x.values[idx] + (rhs.values[idx] - ax) / diag;
                        if (params.clamp) next = std::clamp(next, -1.0, 1.0);
                        double change = std::abs(next - x.values[idx]);
                        if (change > delta) delta = change;
                        x.values[idx] = next;
                    }
            ++total_inner;
            if (!std::isfinite(delta)) check_finite(x, "tv_solve");
            if (delta <= params.tol) break;
        }

        double energy = smoothed_tv_energy(x, b, params);
        if (energy > energy_prev + 1e-9 * std::abs(energy_prev) + 1e-12)
            throw SolverError("tv_solve: smoothed TV energy increased across outer iterations");
        energy_prev = energy;

        outer_delta = 0.0;
        for (std::size_t v = 0; v < x.values.size(); ++v)
            outer_delta = std::max(outer_delta, std::abs(x.values[v] - x_prev.values[v]));
        if (params.verbose_log)
            *params.verbose_log << "tv outer=" << outer << " delta=" << outer_delta
                                << " energy=" << energy << "\n";
        if (outer_delta <= params.tol) break;
    }
    if (stats) {
        stats->sweeps = total_inner;
        stats->final_delta = outer_delta;
    }
    return x;
}

ScalarGrid multiscale_solve(const ScalarGrid& b_fine, EnergyModel model,
                            const SolverParams& params, const SampleSet* samples,
                            MultiscaleStats* stats) {
    validate_params(params);
    const int levels = params.levels;
    const int min_extent = 4 << (levels - 1);
    if (b_fine.dims.x < min_extent || b_fine.dims.y < min_extent || b_fine.dims.z < min_extent)
        throw std::invalid_argument("multiscale_solve: finest dims must be >= 4*2^(levels-1)");

    std::vector<ScalarGrid> pyramid;
    pyramid.reserve(levels);
    pyramid.push_back(b_fine);
    for (int l = 1; l < levels; ++l) pyramid.push_back(downsample_sum(pyramid.back()));

    ScalarGrid x(pyramid.back().dims);
    for (int l = levels - 1; l >= 0; --l) {
        const ScalarGrid& b = pyramid[l];
        if (l != levels - 1) x = upsample_trilinear(x, b.dims);

        std::vector<bool> mask;
        const std::vector<bool>* mask_ptr = nullptr;
        bool band_level = l != levels - 1 || levels == 1;
        if (params.narrow_band_radius && samples && band_level) {
            SampleSet scaled = *samples;
            const double inv = 1.0 / static_cast<double>(1 << l);
            for (auto& s : scaled.samples) s.point *= inv;
            mask = narrow_band_mask(b.dims, scaled, *params.narrow_band_radius);
            mask_ptr = &mask;
        }

        SolveStats level_stats;
        if (is_quadratic(model)) {
            x = gauss_seidel_impl(b, model, params, x, &level_stats, mask_ptr, l);
        } else {
            x = tv_solve(b, params, x, &level_stats);
        }
        if (stats) stats->levels.push_back({b.dims, level_stats.sweeps, level_stats.final_delta});
    }
    return x;
}

}  // namespace recon
