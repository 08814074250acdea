#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "recon/samples.hpp"

namespace recon {

/// Deterministic splitmix64 generator so fixtures are identical across
/// platforms (standard-library distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal();      // standard Gaussian, Box-Muller
    Vec3 unit_vector();   // uniform direction

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class ShapeKind { Sphere, Cylinder, Box, Torus, Scene, BumpySphere };

struct ShapeSpec {
    ShapeKind kind = ShapeKind::Sphere;
    double radius = 1.0;       // sphere, cylinder, torus tube, bumpy sphere
    double height = 2.0;       // cylinder (closed with caps), axis z
    Vec3 box_size{1.0, 1.0, 1.0};
    double major_radius = 1.0;  // torus, axis z
    double bump_amplitude = 0.08;
    double bump_frequency = 6.0;
};

/// n points drawn uniformly by surface area with exact outward normals;
/// deterministic per seed. The Scene shape is a fixed overlapping
/// sphere/box/cylinder union sampled on its outer boundary.
SampleSet sample_primitive(const ShapeSpec& shape, std::size_t n, std::uint64_t seed);

struct HoleSpec {
    enum class Kind { Cap, Ball } kind = Kind::Cap;
    Vec3 direction{0, 0, 1};  // cap axis from the set centroid
    double angle_deg = 30.0;  // cap angular radius
    Vec3 center;              // ball center
    double radius = 0.0;      // ball metric radius
};

struct DensitySplit {
    Vec3 plane_normal{1, 0, 0};
    double plane_offset = 0.0;
    double keep_fraction = 1.0;  // applied to points with dot(p, n) > offset
};

struct CorruptParams {
    double noise_sigma = 0.0;
    double outlier_fraction = 0.0;
    double outlier_radius = 0.0;  // 0 = 1.5x the set's bounding radius
    std::vector<HoleSpec> holes;
    std::optional<DensitySplit> density_split;
};

/// Applies, in order: Gaussian positional noise, outlier replacement (uniform
/// in a bounding sphere, random unit normals), hole removal, density
/// thinning. With all knobs at identity settings the input is returned
/// bitwise. Throws if holes or thinning empty the set.
SampleSet corrupt(const SampleSet& samples, const CorruptParams& params, std::uint64_t seed);

struct OrientationMode {
    enum class Kind { Constant, HalfSpace, ViewDirection } kind = Kind::Constant;
    Vec3 dir1{0, 0, 1};
    Vec3 dir2{0, 0, -1};
    Vec3 plane_normal{1, 0, 0};  // half-space split: dot(p, n) >= offset gets dir1
    double plane_offset = 0.0;
    Vec3 eye;  // view mode: normal = normalize(eye - p)
};

/// Replace every normal per the mode; positions untouched.
SampleSet coarsen_orientation(const SampleSet& samples, const OrientationMode& mode);

}  // namespace recon
