#include "recon/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recon {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586;
    spare_ = mag * std::sin(two_pi * u2);
    have_spare_ = true;
    return mag * std::cos(two_pi * u2);
}

Vec3 Rng::unit_vector() {
    double z = uniform(-1.0, 1.0);
    double phi = uniform(0.0, 6.283185307179586);
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

namespace {

constexpr double kTwoPi = 6.283185307179586;

Sample sample_sphere(double r, Rng& rng) {
    Vec3 dir = rng.unit_vector();
    return {dir * r, dir};
}

Sample sample_cylinder(double r, double h, Rng& rng) {
    double lateral = kTwoPi * r * h;
    double caps = 2.0 * (kTwoPi / 2.0) * r * r;  // 2 * pi r^2
    double u = rng.uniform() * (lateral + caps);
    if (u < lateral) {
        double theta = rng.uniform(0.0, kTwoPi);
        double z = rng.uniform(-0.5 * h, 0.5 * h);
        Vec3 n{std::cos(theta), std::sin(theta), 0.0};
        return {{r * n.x, r * n.y, z}, n};
    }
    double sz = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double rho = r * std::sqrt(rng.uniform());
    double theta = rng.uniform(0.0, kTwoPi);
    return {{rho * std::cos(theta), rho * std::sin(theta), sz * 0.5 * h}, {0.0, 0.0, sz}};
}

Sample sample_box(const Vec3& size, Rng& rng) {
    // face picked by area; faces come in +/- pairs per axis
    double area[3] = {size.y * size.z, size.x * size.z, size.x * size.y};
    double total = 2.0 * (area[0] + area[1] + area[2]);
    double u = rng.uniform() * total;
    int axis = 0;
    for (; axis < 3; ++axis) {
        if (u < 2.0 * area[axis]) break;
        u -= 2.0 * area[axis];
    }
    axis = std::min(axis, 2);
    double side = u < area[axis] ? 1.0 : -1.0;
    Vec3 p, n;
    n[axis] = side;
    p[axis] = side * 0.5 * size[axis];
    int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    p[a1] = rng.uniform(-0.5 * size[a1], 0.5 * size[a1]);
    p[a2] = rng.uniform(-0.5 * size[a2], 0.5 * size[a2]);
    return {p, n};
}

Sample sample_torus(double R, double r, Rng& rng) {
    double theta = rng.uniform(0.0, kTwoPi);
    // minor angle by rejection: area density is proportional to R + r*cos(phi)
    double phi;
    do {
        phi = rng.uniform(0.0, kTwoPi);
    } while (rng.uniform() * (R + r) > R + r * std::cos(phi));
    Vec3 n{std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta), std::sin(phi)};
    Vec3 ring{R * std::cos(theta), R * std::sin(theta), 0.0};
    return {ring + n * r, n};
}

// Fixed low-frequency radial bumps; directions chosen once so the shape is a
// pure function of its parameters.
const Vec3 kBumpDirs[5] = {
    {0.577350269189626, 0.577350269189626, 0.577350269189626},
    {-0.801783725737273, 0.267261241912424, 0.534522483824849},
    {0.096673648972784, -0.870062840755053, 0.483368244863919},
    {0.485071250072666, 0.727606875108999, -0.485071250072666},
    {-0.408248290463863, -0.408248290463863, -0.816496580927726},
};

double bump_profile(const Vec3& dir, const ShapeSpec& shape) {
    double b = 0.0;
    for (const auto& a : kBumpDirs) b += std::cos(shape.bump_frequency * dot(dir, a));
    return shape.radius * (1.0 + shape.bump_amplitude * (b / 5.0));
}

double bumpy_implicit(const Vec3& p, const ShapeSpec& shape) {
    double len = norm(p);
    if (len == 0.0) return -shape.radius;
    return len - bump_profile(p / len, shape);
}

Sample sample_bumpy_sphere(const ShapeSpec& shape, Rng& rng) {
    Vec3 dir = rng.unit_vector();
    Vec3 p = dir * bump_profile(dir, shape);
    const double h = 1e-5 * shape.radius;
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
        Vec3 dp{};
        dp[a] = h;
        g[a] = (bumpy_implicit(p + dp, shape) - bumpy_implicit(p - dp, shape)) / (2.0 * h);
    }
    return {p, normalized(g)};
}

// Scene: overlapping sphere + box + cylinder. Sampled per-primitive by full
// area, keeping only points on the union boundary.
struct ScenePrimitive {
    ShapeKind kind;
    Vec3 center;
    ShapeSpec spec;
};

std::vector<ScenePrimitive> scene_primitives(const ShapeSpec& base) {
    double s = base.radius;  // overall scale
    std::vector<ScenePrimitive> prims(3);
    prims[0] = {ShapeKind::Sphere, {-0.55 * s, 0.0, 0.15 * s}, {}};
    prims[0].spec.radius = 0.62 * s;
    prims[1] = {ShapeKind::Box, {0.25 * s, 0.0, 0.0}, {}};
    prims[1].spec.box_size = {1.35 * s, 0.95 * s, 0.75 * s};
    prims[2] = {ShapeKind::Cylinder, {0.45 * s, 0.25 * s, 0.3 * s}, {}};
    prims[2].spec.radius = 0.32 * s;
    prims[2].spec.height = 1.5 * s;
    return prims;
}

bool strictly_inside(const Vec3& p, const ScenePrimitive& prim) {
    Vec3 q = p - prim.center;
    switch (prim.kind) {
        case ShapeKind::Sphere: return norm(q) < prim.spec.radius * (1.0 - 1e-9);
        case ShapeKind::Box:
            return std::abs(q.x) < 0.5 * prim.spec.box_size.x * (1.0 - 1e-9) &&
                   std::abs(q.y) < 0.5 * prim.spec.box_size.y * (1.0 - 1e-9) &&
                   std::abs(q.z) < 0.5 * prim.spec.box_size.z * (1.0 - 1e-9);
        case ShapeKind::Cylinder:
            return std::hypot(q.x, q.y) < prim.spec.radius * (1.0 - 1e-9) &&
                   std::abs(q.z) < 0.5 * prim.spec.height * (1.0 - 1e-9);
        default: return false;
    }
}

double primitive_area(const ScenePrimitive& prim) {
    switch (prim.kind) {
        case ShapeKind::Sphere: return 2.0 * kTwoPi * prim.spec.radius * prim.spec.radius;
        case ShapeKind::Box: {
            const Vec3& s = prim.spec.box_size;
            return 2.0 * (s.x * s.y + s.x * s.z + s.y * s.z);
        }
        case ShapeKind::Cylinder:
            return kTwoPi * prim.spec.radius * prim.spec.height +
                   kTwoPi * prim.spec.radius * prim.spec.radius;
        default: return 0.0;
    }
}

Sample sample_scene(const ShapeSpec& base, Rng& rng) {
    auto prims = scene_primitives(base);
    double total = 0.0;
    for (const auto& p : prims) total += primitive_area(p);
    for (;;) {
        double u = rng.uniform() * total;
        std::size_t pick = 0;
        for (; pick + 1 < prims.size(); ++pick) {
            if (u < primitive_area(prims[pick])) break;
            u -= primitive_area(prims[pick]);
        }
        const auto& prim = prims[pick];
        Sample s;
        switch (prim.kind) {
            case ShapeKind::Sphere: s = sample_sphere(prim.spec.radius, rng); break;
            case ShapeKind::Box: s = sample_box(prim.spec.box_size, rng); break;
            default: s = sample_cylinder(prim.spec.radius, prim.spec.height, rng); break;
        }
        s.point += prim.center;
        bool interior = false;
        for (std::size_t q = 0; q < prims.size(); ++q)
            if (q != pick && strictly_inside(s.point, prims[q])) interior = true;
        if (!interior) return s;
    }
}

void validate_shape(const ShapeSpec& shape) {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    switch (shape.kind) {
        case ShapeKind::Sphere:
        case ShapeKind::Scene:
            if (!positive(shape.radius)) throw std::invalid_argument("shape: radius must be > 0");
            break;
        case ShapeKind::Cylinder:
            if (!positive(shape.radius) || !positive(shape.height))
                throw std::invalid_argument("shape: cylinder radius/height must be > 0");
            break;
        case ShapeKind::Box:
            if (!positive(shape.box_size.x) || !positive(shape.box_size.y) ||
                !positive(shape.box_size.z))
                throw std::invalid_argument("shape: box sides must be > 0");
            break;
        case ShapeKind::Torus:
            if (!positive(shape.radius) || !positive(shape.major_radius) ||
                shape.radius >= shape.major_radius)
                throw std::invalid_argument("shape: torus needs 0 < tube radius < major radius");
            break;
        case ShapeKind::BumpySphere:
            if (!positive(shape.radius) || shape.bump_amplitude < 0.0 ||
                shape.bump_amplitude >= 1.0)
                throw std::invalid_argument("shape: bumpy sphere needs radius > 0, 0 <= amp < 1");
            break;
    }
}

}  // namespace

SampleSet sample_primitive(const ShapeSpec& shape, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_primitive: n must be >= 1");
    validate_shape(shape);
    Rng rng(seed);
    SampleSet out;
    out.space = CoordSpace::World;
    out.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (shape.kind) {
            case ShapeKind::Sphere: out.samples.push_back(sample_sphere(shape.radius, rng)); break;
            case ShapeKind::Cylinder:
                out.samples.push_back(sample_cylinder(shape.radius, shape.height, rng));
                break;
            case ShapeKind::Box: out.samples.push_back(sample_box(shape.box_size, rng)); break;
            case ShapeKind::Torus:
                out.samples.push_back(sample_torus(shape.major_radius, shape.radius, rng));
                break;
            case ShapeKind::Scene: out.samples.push_back(sample_scene(shape, rng)); break;
            case ShapeKind::BumpySphere:
                out.samples.push_back(sample_bumpy_sphere(shape, rng));
                break;
        }
    }
    return out;
}

SampleSet corrupt(const SampleSet& samples, const CorruptParams& params, std::uint64_t seed) {
    if (params.outlier_fraction < 0.0 || params.outlier_fraction > 1.0)
        throw std::invalid_argument("corrupt: outlier_fraction must be in [0,1]");
    if (params.density_split &&
        (params.density_split->keep_fraction < 0.0 || params.density_split->keep_fraction > 1.0))
        throw std::invalid_argument("corrupt: keep_fraction must be in [0,1]");
    if (params.noise_sigma < 0.0) throw std::invalid_argument("corrupt: negative noise sigma");

    Rng rng(seed);
    SampleSet out = samples;

    Vec3 centroid{};
    double bound_radius = 0.0;
    for (const auto& s : samples.samples) centroid += s.point;
    centroid = centroid / static_cast<double>(std::max<std::size_t>(samples.size(), 1));
    for (const auto& s : samples.samples)
        bound_radius = std::max(bound_radius, norm(s.point - centroid));

    if (params.noise_sigma > 0.0)
        for (auto& s : out.samples)
            s.point += Vec3{rng.normal(), rng.normal(), rng.normal()} * params.noise_sigma;

    if (params.outlier_fraction > 0.0) {
        double radius = params.outlier_radius > 0.0 ? params.outlier_radius : 1.5 * bound_radius;
        for (auto& s : out.samples) {
            if (rng.uniform() >= params.outlier_fraction) continue;
            Vec3 dir = rng.unit_vector();
            double r = radius * std::cbrt(rng.uniform());
            s.point = centroid + dir * r;
            s.normal = rng.unit_vector();
        }
    }

    for (const auto& hole : params.holes) {
        std::vector<Sample> kept;
        kept.reserve(out.samples.size());
        if (hole.kind == HoleSpec::Kind::Cap) {
            Vec3 axis = normalized(hole.direction);
            if (norm2(axis) == 0.0) throw std::invalid_argument("corrupt: zero cap direction");
            double cos_limit = std::cos(hole.angle_deg * kTwoPi / 360.0);
            for (const auto& s : out.samples) {
                Vec3 d = normalized(s.point - centroid);
                if (dot(d, axis) >= cos_limit) continue;
                kept.push_back(s);
            }
        } else {
            for (const auto& s : out.samples) {
                if (norm(s.point - hole.center) <= hole.radius) continue;
                kept.push_back(s);
            }
        }
        out.samples = std::move(kept);
    }

    if (params.density_split) {
        const auto& split = *params.density_split;
        if (norm2(split.plane_normal) == 0.0)
            throw std::invalid_argument("corrupt: zero density-split normal");
        std::vector<Sample> kept;
        kept.reserve(out.samples.size());
        for (const auto& s : out.samples) {
            bool thinned_side = dot(s.point, split.plane_normal) > split.plane_offset;
            if (thinned_side && rng.uniform() >= split.keep_fraction) continue;
            kept.push_back(s);
        }
        out.samples = std::move(kept);
    }

    if (out.samples.empty())
        throw std::invalid_argument("corrupt: corruption removed every sample");
    return out;
}

SampleSet coarsen_orientation(const SampleSet& samples, const OrientationMode& mode) {
    auto require_dir = [](const Vec3& v, const char* what) {
        if (norm2(v) == 0.0) throw std::invalid_argument(std::string("coarsen_orientation: zero ") + what);
    };
    SampleSet out = samples;
    switch (mode.kind) {
        case OrientationMode::Kind::Constant:
            require_dir(mode.dir1, "direction");
            for (auto& s : out.samples) s.normal = mode.dir1;
            break;
        case OrientationMode::Kind::HalfSpace:
            require_dir(mode.dir1, "direction");
            require_dir(mode.dir2, "direction");
            require_dir(mode.plane_normal, "plane normal");
            for (auto& s : out.samples)
                s.normal = dot(s.point, mode.plane_normal) >= mode.plane_offset ? mode.dir1
                                                                                : mode.dir2;
            break;
        case OrientationMode::Kind::ViewDirection:
            for (auto& s : out.samples) {
                Vec3 v = mode.eye - s.point;
                require_dir(v, "view direction (eye coincides with a point)");
                s.normal = normalized(v);
            }
            break;
    }
    return out;
}

}  // namespace recon
