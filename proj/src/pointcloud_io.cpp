#include "recon/pointcloud_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace recon {

namespace {

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

void write_double_text(std::ostream& out, double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.write(buf, r.ptr - buf);
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::Int8:
        case PlyType::UInt8: return 1;
        case PlyType::Int16:
        case PlyType::UInt16: return 2;
        case PlyType::Int32:
        case PlyType::UInt32:
        case PlyType::Float32: return 4;
        case PlyType::Float64: return 8;
    }
    return 0;
}

PlyType parse_ply_type(const std::string& s) {
    if (s == "char" || s == "int8") return PlyType::Int8;
    if (s == "uchar" || s == "uint8") return PlyType::UInt8;
    if (s == "short" || s == "int16") return PlyType::Int16;
    if (s == "ushort" || s == "uint16") return PlyType::UInt16;
    if (s == "int" || s == "int32") return PlyType::Int32;
    if (s == "uint" || s == "uint32") return PlyType::UInt32;
    if (s == "float" || s == "float32") return PlyType::Float32;
    if (s == "double" || s == "float64") return PlyType::Float64;
    throw ParseError("ply: unknown property type '" + s + "'");
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float32;
    bool is_list = false;
    PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;

    int property_index(const std::string& name) const {
        for (std::size_t i = 0; i < properties.size(); ++i)
            if (properties[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

struct PlyHeader {
    bool binary = false;
    std::vector<PlyElement> elements;
};

PlyHeader read_ply_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("ply: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ply") throw ParseError("ply: missing magic in " + path);

    PlyHeader header;
    bool have_format = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word.empty() || word == "comment" || word == "obj_info") continue;
        if (word == "format") {
            std::string fmt, version;
            ls >> fmt >> version;
            if (fmt == "ascii") header.binary = false;
            else if (fmt == "binary_little_endian") header.binary = true;
            else throw ParseError("ply: unsupported format '" + fmt + "' in " + path);
            have_format = true;
        } else if (word == "element") {
            PlyElement el;
            ls >> el.name >> el.count;
            if (ls.fail()) throw ParseError("ply: malformed element line in " + path);
            header.elements.push_back(el);
        } else if (word == "property") {
            if (header.elements.empty())
                throw ParseError("ply: property before element in " + path);
            std::string t;
            ls >> t;
            PlyProperty prop;
            if (t == "list") {
                std::string ct, et;
                ls >> ct >> et >> prop.name;
                prop.is_list = true;
                prop.count_type = parse_ply_type(ct);
                prop.type = parse_ply_type(et);
            } else {
                prop.type = parse_ply_type(t);
                ls >> prop.name;
            }
            if (ls.fail()) throw ParseError("ply: malformed property line in " + path);
            header.elements.back().properties.push_back(prop);
        } else if (word == "end_header") {
            if (!have_format) throw ParseError("ply: missing format line in " + path);
            return header;
        } else {
            throw ParseError("ply: unexpected header token '" + word + "' in " + path);
        }
    }
    throw ParseError("ply: unterminated header in " + path);
}

double read_binary_scalar(std::istream& in, PlyType t) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(ply_type_size(t)));
    switch (t) {
        case PlyType::Int8: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
        case PlyType::UInt8: return static_cast<double>(buf[0]);
        case PlyType::Int16: {
            std::int16_t v;
            std::memcpy(&v, buf, 2);
            return v;
        }
        case PlyType::UInt16: {
            std::uint16_t v;
            std::memcpy(&v, buf, 2);
            return v;
        }
        case PlyType::Int32: {
            std::int32_t v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case PlyType::UInt32: {
            std::uint32_t v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case PlyType::Float32: {
            float v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case PlyType::Float64: {
            double v;
            std::memcpy(&v, buf, 8);
            return v;
        }
    }
    return 0.0;
}

// One PLY element instance: scalar properties land in `scalars` (NaN for
// lists), list properties land in `list_out` when requested.
struct PlyRowReader {
    const PlyHeader& header;
    std::istream& in;
    const std::string& path;

    void read_row(const PlyElement& el, std::vector<double>& scalars,
                  std::vector<double>* list_out, int list_prop) {
        scalars.assign(el.properties.size(), std::numeric_limits<double>::quiet_NaN());
        if (header.binary) {
            for (std::size_t p = 0; p < el.properties.size(); ++p) {
                const auto& prop = el.properties[p];
                if (prop.is_list) {
                    auto n = static_cast<std::size_t>(read_binary_scalar(in, prop.count_type));
                    if (static_cast<int>(p) == list_prop && list_out) {
                        list_out->clear();
                        for (std::size_t i = 0; i < n; ++i)
                            list_out->push_back(read_binary_scalar(in, prop.type));
                    } else {
                        in.ignore(static_cast<std::streamsize>(n * ply_type_size(prop.type)));
                    }
                } else {
                    scalars[p] = read_binary_scalar(in, prop.type);
                }
            }
            if (!in) throw ParseError("ply: truncated binary data in " + path);
        } else {
            std::string line;
            do {
                if (!std::getline(in, line)) throw ParseError("ply: truncated data in " + path);
            } while (line.find_first_not_of(" \t\r") == std::string::npos);
            std::istringstream ls(line);
            for (std::size_t p = 0; p < el.properties.size(); ++p) {
                const auto& prop = el.properties[p];
                if (prop.is_list) {
                    std::size_t n;
                    ls >> n;
                    double v;
                    if (static_cast<int>(p) == list_prop && list_out) list_out->clear();
                    for (std::size_t i = 0; i < n; ++i) {
                        ls >> v;
                        if (static_cast<int>(p) == list_prop && list_out) list_out->push_back(v);
                    }
                } else {
                    ls >> scalars[p];
                }
            }
            if (ls.fail()) throw ParseError("ply: malformed record in " + path + ": '" + line + "'");
        }
    }
};

// ---------------------------------------------------------------------------
// Sample loaders
// ---------------------------------------------------------------------------

bool finish_sample(Vec3 point, Vec3 normal, const LoadOptions& options, SampleSet& out,
                   LoadStats& stats, const std::string& where) {
    if (!is_finite(point)) throw ParseError("non-finite point at " + where);
    if (options.constant_normal) normal = *options.constant_normal;
    if (!is_finite(normal)) throw ParseError("non-finite normal at " + where);
    if (norm2(normal) == 0.0) {
        stats.zero_normal_rejected++;
        return false;
    }
    if (options.normalize_normals) normal = normalized(normal);
    out.samples.push_back({point, normal});
    stats.records++;
    return true;
}

SampleSet load_samples_ply(const std::string& path, const LoadOptions& options, LoadStats& stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    PlyHeader header = read_ply_header(in, path);

    SampleSet out;
    PlyRowReader reader{header, in, path};
    std::vector<double> scalars;
    for (const auto& el : header.elements) {
        if (el.name != "vertex") {  // skip foreign elements record by record
            for (std::size_t r = 0; r < el.count; ++r) reader.read_row(el, scalars, nullptr, -1);
            continue;
        }
        int px = el.property_index("x"), py = el.property_index("y"), pz = el.property_index("z");
        int nx = el.property_index("nx"), ny = el.property_index("ny"), nz = el.property_index("nz");
        if (px < 0 || py < 0 || pz < 0)
            throw ParseError("ply: vertex element lacks x/y/z in " + path);
        bool has_normals = nx >= 0 && ny >= 0 && nz >= 0;
        if (!has_normals && !options.constant_normal)
            throw ParseError("ply: no nx/ny/nz in " + path + " and no constant-normal override");
        out.samples.reserve(el.count);
        for (std::size_t r = 0; r < el.count; ++r) {
            reader.read_row(el, scalars, nullptr, -1);
            Vec3 p{scalars[px], scalars[py], scalars[pz]};
            Vec3 n = has_normals ? Vec3{scalars[nx], scalars[ny], scalars[nz]} : Vec3{};
            finish_sample(p, n, options, out, stats,
                          path + " vertex " + std::to_string(r));
        }
    }
    if (out.samples.empty() && stats.zero_normal_rejected == 0)
        throw ParseError("ply: no vertex element in " + path);
    return out;
}

SampleSet load_samples_xyz(const std::string& path, const LoadOptions& options, LoadStats& stats) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    SampleSet out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ls(line);
        double v[6];
        int got = 0;
        while (got < 6 && (ls >> v[got])) ++got;
        bool need_normals = !options.constant_normal;
        if (got != 6 && !(got == 3 && !need_normals))
            throw ParseError(path + ": malformed record at line " + std::to_string(lineno));
        std::string trailing;
        if (ls >> trailing)
            throw ParseError(path + ": trailing tokens at line " + std::to_string(lineno));
        Vec3 p{v[0], v[1], v[2]};
        Vec3 n = got == 6 ? Vec3{v[3], v[4], v[5]} : Vec3{};
        finish_sample(p, n, options, out, stats, path + " line " + std::to_string(lineno));
    }
    return out;
}

SampleSet load_samples_obj(const std::string& path, const LoadOptions& options, LoadStats& stats) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Vec3> points, normals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v" || tag == "vn") {
            Vec3 v;
            ls >> v.x >> v.y >> v.z;
            if (ls.fail())
                throw ParseError(path + ": malformed " + tag + " at line " + std::to_string(lineno));
            (tag == "v" ? points : normals).push_back(v);
        }
    }
    if (!normals.empty() && normals.size() != points.size() && !options.constant_normal)
        throw ParseError(path + ": vn count does not match v count");
    if (normals.empty() && !options.constant_normal)
        throw ParseError(path + ": no vn records and no constant-normal override");
    SampleSet out;
    LoadStats local;
    for (std::size_t i = 0; i < points.size(); ++i) {
        Vec3 n = i < normals.size() ? normals[i] : Vec3{};
        finish_sample(points[i], n, options, out, stats, path + " vertex " + std::to_string(i));
    }
    (void)local;
    return out;
}

// ---------------------------------------------------------------------------
// Mesh loaders
// ---------------------------------------------------------------------------

TriangleMesh load_mesh_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    PlyHeader header = read_ply_header(in, path);

    TriangleMesh mesh;
    PlyRowReader reader{header, in, path};
    std::vector<double> scalars, list;
    for (const auto& el : header.elements) {
        if (el.name == "vertex") {
            int px = el.property_index("x"), py = el.property_index("y"),
                pz = el.property_index("z");
            int nx = el.property_index("nx"), ny = el.property_index("ny"),
                nz = el.property_index("nz");
            if (px < 0 || py < 0 || pz < 0)
                throw ParseError("ply: vertex element lacks x/y/z in " + path);
            bool has_normals = nx >= 0 && ny >= 0 && nz >= 0;
            mesh.vertices.reserve(el.count);
            for (std::size_t r = 0; r < el.count; ++r) {
                reader.read_row(el, scalars, nullptr, -1);
                mesh.vertices.push_back({scalars[px], scalars[py], scalars[pz]});
                if (has_normals) mesh.normals.push_back({scalars[nx], scalars[ny], scalars[nz]});
            }
        } else if (el.name == "face") {
            int pl = el.property_index("vertex_indices");
            if (pl < 0) pl = el.property_index("vertex_index");
            if (pl < 0) throw ParseError("ply: face element lacks vertex_indices in " + path);
            for (std::size_t r = 0; r < el.count; ++r) {
                reader.read_row(el, scalars, &list, pl);
                if (list.size() < 3)
                    throw ParseError("ply: degenerate face record " + std::to_string(r) + " in " + path);
                for (std::size_t t = 1; t + 1 < list.size(); ++t)
                    mesh.triangles.push_back({static_cast<std::uint32_t>(list[0]),
                                              static_cast<std::uint32_t>(list[t]),
                                              static_cast<std::uint32_t>(list[t + 1])});
            }
        } else {
            for (std::size_t r = 0; r < el.count; ++r) reader.read_row(el, scalars, nullptr, -1);
        }
    }
    for (const auto& t : mesh.triangles)
        for (auto idx : t)
            if (idx >= mesh.vertices.size())
                throw ParseError("ply: face index out of range in " + path);
    return mesh;
}

TriangleMesh load_mesh_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    TriangleMesh mesh;
    std::vector<Vec3> vns;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 v;
            ls >> v.x >> v.y >> v.z;
            if (ls.fail()) throw ParseError(path + ": malformed v at line " + std::to_string(lineno));
            mesh.vertices.push_back(v);
        } else if (tag == "vn") {
            Vec3 v;
            ls >> v.x >> v.y >> v.z;
            if (ls.fail()) throw ParseError(path + ": malformed vn at line " + std::to_string(lineno));
            vns.push_back(v);
        } else if (tag == "f") {
            std::vector<std::uint32_t> idx;
            std::string tok;
            while (ls >> tok) {
                // accept "a", "a/b", "a//c", "a/b/c"; only the vertex index matters
                long v = 0;
                auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (r.ec != std::errc{} || v < 1)
                    throw ParseError(path + ": bad face index at line " + std::to_string(lineno));
                idx.push_back(static_cast<std::uint32_t>(v - 1));
            }
            if (idx.size() < 3)
                throw ParseError(path + ": face with <3 vertices at line " + std::to_string(lineno));
            for (std::size_t t = 1; t + 1 < idx.size(); ++t)
                mesh.triangles.push_back({idx[0], idx[t], idx[t + 1]});
        }
    }
    if (vns.size() == mesh.vertices.size()) mesh.normals = std::move(vns);
    for (const auto& t : mesh.triangles)
        for (auto i : t)
            if (i >= mesh.vertices.size())
                throw ParseError(path + ": face index out of range");
    return mesh;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

void save_samples_ply(const SampleSet& samples, const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
        << "element vertex " << samples.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n"
        << "property double nx\nproperty double ny\nproperty double nz\n"
        << "end_header\n";
    if (binary) {
        for (const auto& s : samples.samples) {
            double row[6] = {s.point.x, s.point.y, s.point.z, s.normal.x, s.normal.y, s.normal.z};
            out.write(reinterpret_cast<const char*>(row), sizeof(row));
        }
    } else {
        for (const auto& s : samples.samples) {
            double row[6] = {s.point.x, s.point.y, s.point.z, s.normal.x, s.normal.y, s.normal.z};
            for (int i = 0; i < 6; ++i) {
                if (i) out << ' ';
                write_double_text(out, row[i]);
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

void save_samples_xyz(const SampleSet& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& s : samples.samples) {
        double row[6] = {s.point.x, s.point.y, s.point.z, s.normal.x, s.normal.y, s.normal.z};
        for (int i = 0; i < 6; ++i) {
            if (i) out << ' ';
            write_double_text(out, row[i]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

void save_mesh_ply(const TriangleMesh& mesh, const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    bool normals = mesh.has_normals();
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
        << "element vertex " << mesh.vertices.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n";
    if (normals) out << "property double nx\nproperty double ny\nproperty double nz\n";
    out << "element face " << mesh.triangles.size() << "\n"
        << "property list uchar uint vertex_indices\n"
        << "end_header\n";
    if (binary) {
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Vec3& v = mesh.vertices[i];
            double row[3] = {v.x, v.y, v.z};
            out.write(reinterpret_cast<const char*>(row), sizeof(row));
            if (normals) {
                const Vec3& n = mesh.normals[i];
                double nrow[3] = {n.x, n.y, n.z};
                out.write(reinterpret_cast<const char*>(nrow), sizeof(nrow));
            }
        }
        for (const auto& t : mesh.triangles) {
            unsigned char count = 3;
            out.write(reinterpret_cast<const char*>(&count), 1);
            std::uint32_t idx[3] = {t[0], t[1], t[2]};
            out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
        }
    } else {
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Vec3& v = mesh.vertices[i];
            write_double_text(out, v.x);
            out << ' ';
            write_double_text(out, v.y);
            out << ' ';
            write_double_text(out, v.z);
            if (normals) {
                const Vec3& n = mesh.normals[i];
                out << ' ';
                write_double_text(out, n.x);
                out << ' ';
                write_double_text(out, n.y);
                out << ' ';
                write_double_text(out, n.z);
            }
            out << '\n';
        }
        for (const auto& t : mesh.triangles)
            out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

void save_mesh_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    bool normals = mesh.has_normals();
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        out << "v ";
        write_double_text(out, v.x);
        out << ' ';
        write_double_text(out, v.y);
        out << ' ';
        write_double_text(out, v.z);
        out << '\n';
        if (normals) {
            const Vec3& n = mesh.normals[i];
            out << "vn ";
            write_double_text(out, n.x);
            out << ' ';
            write_double_text(out, n.y);
            out << ' ';
            write_double_text(out, n.z);
            out << '\n';
        }
    }
    for (const auto& t : mesh.triangles) {
        if (normals)
            out << "f " << t[0] + 1 << "//" << t[0] + 1 << ' ' << t[1] + 1 << "//" << t[1] + 1
                << ' ' << t[2] + 1 << "//" << t[2] + 1 << '\n';
        else
            out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace

PointFormat point_format_from_path(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "ply") return PointFormat::Ply;
    if (ext == "obj") return PointFormat::Obj;
    if (ext == "xyz" || ext == "xyzn" || ext == "txt") return PointFormat::XyzNormal;
    throw IoError("cannot infer point format from '" + path + "'");
}

MeshFormat mesh_format_from_path(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "ply") return MeshFormat::Ply;
    if (ext == "obj") return MeshFormat::Obj;
    throw IoError("cannot infer mesh format from '" + path + "'");
}

SampleSet load_samples(const std::string& path, PointFormat format, const LoadOptions& options,
                       LoadStats* stats) {
    LoadStats local;
    SampleSet out;
    switch (format) {
        case PointFormat::Ply: out = load_samples_ply(path, options, local); break;
        case PointFormat::XyzNormal: out = load_samples_xyz(path, options, local); break;
        case PointFormat::Obj: out = load_samples_obj(path, options, local); break;
    }
    out.space = CoordSpace::World;
    if (stats) *stats = local;
    return out;
}

void save_samples(const SampleSet& samples, const std::string& path, PointFormat format,
                  bool binary) {
    switch (format) {
        case PointFormat::Ply: save_samples_ply(samples, path, binary); break;
        case PointFormat::XyzNormal: save_samples_xyz(samples, path); break;
        case PointFormat::Obj: {
            // v/vn pairs; usable as an oriented point cloud by load_samples
            TriangleMesh m;
            m.vertices.reserve(samples.size());
            m.normals.reserve(samples.size());
            for (const auto& s : samples.samples) {
                m.vertices.push_back(s.point);
                m.normals.push_back(s.normal);
            }
            save_mesh_obj(m, path);
            break;
        }
    }
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
    return format == MeshFormat::Ply ? load_mesh_ply(path) : load_mesh_obj(path);
}

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format, bool binary) {
    for (const auto& t : mesh.triangles)
        for (auto idx : t)
            if (idx >= mesh.vertices.size())
                throw std::invalid_argument("save_mesh: triangle index out of range");
    if (format == MeshFormat::Ply)
        save_mesh_ply(mesh, path, binary);
    else
        save_mesh_obj(mesh, path);
}

}  // namespace recon
