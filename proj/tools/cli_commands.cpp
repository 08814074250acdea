#include "cli_commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "recon/metrics.hpp"
#include "recon/pointcloud_io.hpp"
#include "recon/reconstruct.hpp"
#include "recon/synthetic.hpp"

namespace recon::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_num(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("cannot parse ") + what + " from '" + s + "'");
    }
}

// "+z", "-x", or "x,y,z"
Vec3 parse_direction(const std::string& s) {
    if (s == "+x") return {1, 0, 0};
    if (s == "-x") return {-1, 0, 0};
    if (s == "+y") return {0, 1, 0};
    if (s == "-y") return {0, -1, 0};
    if (s == "+z") return {0, 0, 1};
    if (s == "-z") return {0, 0, -1};
    auto parts = split(s, ',');
    if (parts.size() != 3)
        throw std::invalid_argument("direction must be +x/-x/+y/-y/+z/-z or x,y,z: '" + s + "'");
    return {parse_num(parts[0], "direction"), parse_num(parts[1], "direction"),
            parse_num(parts[2], "direction")};
}

Dims parse_grid(const std::string& s) {
    std::string norm = s;
    for (char& c : norm)
        if (c == 'x') c = ',';
    auto parts = split(norm, ',');
    auto as_dim = [&](const std::string& p) {
        double v = parse_num(p, "grid resolution");
        if (v < 2 || v != std::floor(v)) throw std::invalid_argument("bad grid resolution: " + s);
        return static_cast<int>(v);
    };
    if (parts.size() == 1) {
        int n = as_dim(parts[0]);
        return {n, n, n};
    }
    if (parts.size() == 3) return {as_dim(parts[0]), as_dim(parts[1]), as_dim(parts[2])};
    throw std::invalid_argument("grid must be N or NX,NY,NZ: '" + s + "'");
}

// "cap:+z:30deg" or "ball:x,y,z:r"
HoleSpec parse_hole(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("hole must be cap:DIR:ANGLE or ball:CENTER:R");
    HoleSpec hole;
    if (parts[0] == "cap") {
        hole.kind = HoleSpec::Kind::Cap;
        hole.direction = parse_direction(parts[1]);
        std::string angle = parts[2];
        if (angle.size() > 3 && angle.substr(angle.size() - 3) == "deg")
            angle = angle.substr(0, angle.size() - 3);
        hole.angle_deg = parse_num(angle, "cap angle");
    } else if (parts[0] == "ball") {
        hole.kind = HoleSpec::Kind::Ball;
        hole.center = parse_direction(parts[1]);
        hole.radius = parse_num(parts[2], "ball radius");
    } else {
        throw std::invalid_argument("hole kind must be cap or ball: '" + s + "'");
    }
    return hole;
}

// "x=0:0.02" (axis=offset:keep)
DensitySplit parse_density_split(const std::string& s) {
    auto parts = split(s, ':');
    if (parts.size() != 2)
        throw std::invalid_argument("density split must be AXIS=OFFSET:KEEP: '" + s + "'");
    auto plane = split(parts[0], '=');
    if (plane.size() != 2)
        throw std::invalid_argument("density split must be AXIS=OFFSET:KEEP: '" + s + "'");
    DensitySplit out;
    if (plane[0] == "x") out.plane_normal = {1, 0, 0};
    else if (plane[0] == "y") out.plane_normal = {0, 1, 0};
    else if (plane[0] == "z") out.plane_normal = {0, 0, 1};
    else out.plane_normal = parse_direction(plane[0]);
    out.plane_offset = parse_num(plane[1], "plane offset");
    out.keep_fraction = parse_num(parts[1], "keep fraction");
    return out;
}

// "const:+z" | "halfspace:x=0:+x:-x" | "view:ex,ey,ez"
OrientationMode parse_orientation(const std::string& s) {
    auto parts = split(s, ':');
    OrientationMode mode;
    if (parts[0] == "const" && parts.size() == 2) {
        mode.kind = OrientationMode::Kind::Constant;
        mode.dir1 = parse_direction(parts[1]);
        return mode;
    }
    if (parts[0] == "halfspace" && parts.size() == 4) {
        mode.kind = OrientationMode::Kind::HalfSpace;
        auto plane = split(parts[1], '=');
        if (plane.size() != 2) throw std::invalid_argument("halfspace needs AXIS=OFFSET");
        if (plane[0] == "x") mode.plane_normal = {1, 0, 0};
        else if (plane[0] == "y") mode.plane_normal = {0, 1, 0};
        else if (plane[0] == "z") mode.plane_normal = {0, 0, 1};
        else mode.plane_normal = parse_direction(plane[0]);
        mode.plane_offset = parse_num(plane[1], "plane offset");
        mode.dir1 = parse_direction(parts[2]);
        mode.dir2 = parse_direction(parts[3]);
        return mode;
    }
    if (parts[0] == "view" && parts.size() == 2) {
        mode.kind = OrientationMode::Kind::ViewDirection;
        mode.eye = parse_direction(parts[1]);
        return mode;
    }
    throw std::invalid_argument(
        "orient must be const:DIR, halfspace:AXIS=OFF:DIR1:DIR2 or view:EYE: '" + s + "'");
}

struct ReconstructArgs {
    std::string input, output, grid = "64", const_normal, dump_field, config;
    int energy = 4;
    double lambda = 0.2, tol = 1e-6;
    int levels = 3, max_sweeps = 2000, passes = 3, margin = 6;
    bool clamp = true, normalize_normals = false, with_normals = false, verbose = false;
    bool binary = false;
    double narrow_band = -1.0;  // <0 = off
};

// Plain key=value config file ('#' comments). Command-line flags take
// precedence: a key is applied only when its flag was not given.
void apply_config_file(ReconstructArgs& a, const CLI::App* cmd) {
    std::ifstream in(a.config);
    if (!in) throw IoError("cannot open config file " + a.config);
    auto parse_bool = [](const std::string& v) {
        if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
        if (v == "0" || v == "false" || v == "off" || v == "no") return false;
        throw std::invalid_argument("config: boolean expected, got '" + v + "'");
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(a.config + ": expected key=value at line " +
                                        std::to_string(lineno));
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (cmd->count("--" + key) > 0) continue;  // flag wins

        if (key == "input") a.input = value;
        else if (key == "output") a.output = value;
        else if (key == "grid") a.grid = value;
        else if (key == "energy") a.energy = static_cast<int>(parse_num(value, "energy"));
        else if (key == "lambda") a.lambda = parse_num(value, "lambda");
        else if (key == "levels") a.levels = static_cast<int>(parse_num(value, "levels"));
        else if (key == "tol") a.tol = parse_num(value, "tol");
        else if (key == "max-sweeps")
            a.max_sweeps = static_cast<int>(parse_num(value, "max-sweeps"));
        else if (key == "clamp") a.clamp = parse_bool(value);
        else if (key == "narrow-band") a.narrow_band = parse_num(value, "narrow-band");
        else if (key == "passes") a.passes = static_cast<int>(parse_num(value, "passes"));
        else if (key == "margin") a.margin = static_cast<int>(parse_num(value, "margin"));
        else if (key == "const-normal") a.const_normal = value;
        else if (key == "normalize-normals") a.normalize_normals = parse_bool(value);
        else if (key == "with-normals") a.with_normals = parse_bool(value);
        else if (key == "binary") a.binary = parse_bool(value);
        else if (key == "dump-field") a.dump_field = value;
        else if (key == "verbose") a.verbose = parse_bool(value);
        else
            throw std::invalid_argument(a.config + ": unknown key '" + key + "' at line " +
                                        std::to_string(lineno));
    }
}

int cmd_reconstruct(const ReconstructArgs& a) {
    ReconConfig cfg;
    cfg.grid = parse_grid(a.grid);
    if (a.energy < 1 || a.energy > 4)
        throw std::invalid_argument("--energy must be 1, 2, 3 or 4");
    cfg.model = static_cast<EnergyModel>(a.energy);
    cfg.lambda = a.lambda;
    cfg.levels = a.levels;
    cfg.tol = a.tol;
    cfg.max_sweeps = a.max_sweeps;
    cfg.clamp = a.clamp;
    if (a.narrow_band >= 0.0) cfg.narrow_band_radius = a.narrow_band;
    cfg.passes = a.passes;
    cfg.margin_cells = a.margin;
    cfg.with_normals = a.with_normals;
    cfg.verbose = a.verbose;

    LoadOptions load_opts;
    load_opts.normalize_normals = a.normalize_normals;
    if (!a.const_normal.empty()) load_opts.constant_normal = parse_direction(a.const_normal);

    std::ostream& log = std::cerr;
    log << "config: input=" << a.input << " output=" << a.output << " grid=" << cfg.grid.x << "x"
        << cfg.grid.y << "x" << cfg.grid.z << " energy=" << a.energy << " lambda=" << cfg.lambda
        << " levels=" << cfg.levels << " tol=" << cfg.tol << " max_sweeps=" << cfg.max_sweeps
        << " clamp=" << cfg.clamp << " narrow_band="
        << (cfg.narrow_band_radius ? std::to_string(*cfg.narrow_band_radius) : "off")
        << " passes=" << cfg.passes << " margin=" << cfg.margin_cells
        << " normalize_normals=" << a.normalize_normals << " const_normal="
        << (a.const_normal.empty() ? "none" : a.const_normal)
        << " with_normals=" << a.with_normals << "\n";

    LoadStats stats;
    SampleSet samples = load_samples(a.input, point_format_from_path(a.input), load_opts, &stats);
    log << "loaded " << stats.records << " samples";
    if (stats.zero_normal_rejected)
        log << " (" << stats.zero_normal_rejected << " rejected for zero normals)";
    log << "\n";
    if (samples.empty()) throw ParseError(a.input + ": no usable samples");

    ReconResult result = reconstruct(samples, cfg, &log);
    save_mesh(result.mesh, a.output, mesh_format_from_path(a.output), a.binary);
    if (!a.dump_field.empty()) dump_raw(result.field, a.dump_field);
    log << "wrote " << a.output << "\n";
    return 0;
}

struct MetricsArgs {
    std::string points, mesh, label;
    bool tsv = false;
};

int cmd_metrics(const MetricsArgs& a) {
    LoadOptions opts;
    opts.constant_normal = Vec3{0, 0, 1};  // orientation is irrelevant for metrics
    SampleSet samples = load_samples(a.points, point_format_from_path(a.points), opts);
    TriangleMesh mesh = load_mesh(a.mesh, mesh_format_from_path(a.mesh));
    std::string label = a.label.empty() ? a.mesh : a.label;
    std::vector<ReportRow> rows{make_report_row(label, mesh, samples)};
    std::cout << (a.tsv ? format_report_tsv(rows) : format_report_text(rows));
    return 0;
}

struct SynthArgs {
    std::string shape = "sphere", output, density_split, orient;
    std::vector<std::string> holes;
    std::size_t n = 20000;
    std::uint64_t seed = 0;
    double radius = 1.0, height = 2.0, major_radius = 1.0;
    std::string size = "1,1,1";
    double bump_amp = 0.06, bump_freq = 12.0;
    double noise = 0.0, outliers = 0.0, outlier_radius = 0.0;
    bool normalize_normals = false, binary = false;
};

int cmd_synth(const SynthArgs& a) {
    ShapeSpec shape;
    if (a.shape == "sphere") shape.kind = ShapeKind::Sphere;
    else if (a.shape == "cylinder") shape.kind = ShapeKind::Cylinder;
    else if (a.shape == "box") shape.kind = ShapeKind::Box;
    else if (a.shape == "torus") shape.kind = ShapeKind::Torus;
    else if (a.shape == "scene") shape.kind = ShapeKind::Scene;
    else if (a.shape == "bumpy-sphere") shape.kind = ShapeKind::BumpySphere;
    else throw std::invalid_argument("unknown shape '" + a.shape + "'");
    shape.radius = a.radius;
    shape.height = a.height;
    shape.major_radius = a.major_radius;
    auto size = split(a.size, ',');
    if (size.size() != 3) throw std::invalid_argument("--size must be a,b,c");
    shape.box_size = {parse_num(size[0], "size"), parse_num(size[1], "size"),
                      parse_num(size[2], "size")};
    shape.bump_amplitude = a.bump_amp;
    shape.bump_frequency = a.bump_freq;

    SampleSet samples = sample_primitive(shape, a.n, a.seed);

    if (!a.orient.empty()) samples = coarsen_orientation(samples, parse_orientation(a.orient));

    CorruptParams corrupt_params;
    corrupt_params.noise_sigma = a.noise;
    corrupt_params.outlier_fraction = a.outliers;
    corrupt_params.outlier_radius = a.outlier_radius;
    for (const auto& h : a.holes) corrupt_params.holes.push_back(parse_hole(h));
    if (!a.density_split.empty())
        corrupt_params.density_split = parse_density_split(a.density_split);
    samples = corrupt(samples, corrupt_params, a.seed + 0x9e3779b9ull);

    if (a.normalize_normals)
        for (auto& s : samples.samples) s.normal = normalized(s.normal);

    save_samples(samples, a.output, point_format_from_path(a.output), a.binary);
    std::cerr << "wrote " << samples.size() << " samples to " << a.output << "\n";
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Implicit surface reconstruction from oriented points on a regular grid"};
    app.require_subcommand(1);

    ReconstructArgs ra;
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a watertight mesh from points");
    rec->add_option("--config", ra.config, "Key=value file; command-line flags take precedence");
    rec->add_option("--input", ra.input, "Oriented point file (.ply/.xyz/.obj)")->required();
    rec->add_option("--output", ra.output, "Mesh output (.ply/.obj)")->required();
    rec->add_option("--grid", ra.grid, "Finest grid resolution, N or NX,NY,NZ (default 64)");
    rec->add_option("--energy", ra.energy,
                    "Smoothness model: 1=membrane 2=total-variation 3=second-order "
                    "4=second-order-mixed (default 4)");
    rec->add_option("--lambda", ra.lambda, "Smoothness weight (default 0.2)");
    rec->add_option("--levels", ra.levels, "Multi-scale levels (default 3)");
    rec->add_option("--tol", ra.tol, "Stop when the sweep delta falls below this (default 1e-6)");
    rec->add_option("--max-sweeps", ra.max_sweeps, "Sweep cap per level (default 2000)");
    rec->add_flag("--clamp,!--no-clamp", ra.clamp, "Clamp iterates to [-1,1] (default on)");
    rec->add_option("--narrow-band", ra.narrow_band,
                    "Update only voxels within this many cells of a sample");
    rec->add_option("--passes", ra.passes, "Box-filter smoothing passes (default 3)");
    rec->add_option("--margin", ra.margin, "Empty margin cells around the data (default 6)");
    rec->add_option("--const-normal", ra.const_normal,
                    "Replace all normals with this direction (e.g. +z or x,y,z)");
    rec->add_flag("--normalize-normals", ra.normalize_normals, "Normalize normals at load");
    rec->add_flag("--with-normals", ra.with_normals, "Write per-vertex normals");
    rec->add_flag("--binary", ra.binary, "Write binary PLY");
    rec->add_option("--dump-field", ra.dump_field, "Dump the solved field as raw float32");
    rec->add_flag("--verbose", ra.verbose, "Per-sweep convergence log on stderr");

    MetricsArgs ma;
    auto* met = app.add_subcommand("metrics", "Fit and smoothness statistics for a mesh");
    met->add_option("--points", ma.points, "Point file the mesh should fit")->required();
    met->add_option("--mesh", ma.mesh, "Mesh file (.ply/.obj)")->required();
    met->add_option("--label", ma.label, "Row label (default: mesh path)");
    met->add_flag("--tsv", ma.tsv, "Tab-separated output instead of the aligned table");

    SynthArgs sa;
    auto* syn = app.add_subcommand("synth", "Generate synthetic oriented point sets");
    syn->add_option("--shape", sa.shape,
                    "sphere | cylinder | box | torus | scene | bumpy-sphere");
    syn->add_option("--output", sa.output, "Output point file (.ply/.xyz/.obj)")->required();
    syn->add_option("--n", sa.n, "Sample count (default 20000)");
    syn->add_option("--seed", sa.seed, "Random seed (default 0)");
    syn->add_option("--radius", sa.radius, "Sphere/cylinder/torus-tube radius");
    syn->add_option("--height", sa.height, "Cylinder height");
    syn->add_option("--size", sa.size, "Box sides a,b,c");
    syn->add_option("--major-radius", sa.major_radius, "Torus major radius");
    syn->add_option("--bump-amp", sa.bump_amp, "Bumpy sphere amplitude (default 0.06)");
    syn->add_option("--bump-freq", sa.bump_freq, "Bumpy sphere frequency (default 12)");
    syn->add_option("--noise", sa.noise, "Gaussian position noise sigma");
    syn->add_option("--outliers", sa.outliers, "Fraction replaced by ambient outliers");
    syn->add_option("--outlier-radius", sa.outlier_radius, "Outlier sphere radius (0 = auto)");
    syn->add_option("--hole", sa.holes, "cap:DIR:ANGLEdeg or ball:CENTER:R (repeatable)");
    syn->add_option("--density-split", sa.density_split, "AXIS=OFFSET:KEEP, e.g. x=0:0.02");
    syn->add_option("--orient", sa.orient,
                    "const:DIR | halfspace:AXIS=OFF:DIR1:DIR2 | view:EYE");
    syn->add_flag("--normalize-normals", sa.normalize_normals, "Normalize output normals");
    syn->add_flag("--binary", sa.binary, "Write binary PLY");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 3;
    }

    try {
        if (rec->parsed()) {
            if (!ra.config.empty()) apply_config_file(ra, rec);
            return cmd_reconstruct(ra);
        }
        if (met->parsed()) return cmd_metrics(ma);
        if (syn->parsed()) return cmd_synth(sa);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 3;
}

}  // namespace recon::cli
