#include "dtcwt/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace dtcwt {

namespace {

static_assert(std::endian::native == std::endian::little,
              "container blobs are little-endian; big-endian hosts are not supported");

void write_blob(const std::string& path, const double* data, size_t count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write blob: " + path);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    if (!out) throw std::runtime_error("write error: " + path);
}

std::vector<double> read_blob(const std::string& path, size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read blob: " + path);
    std::vector<double> buf(expected);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != expected * sizeof(double))
        throw std::runtime_error("blob too short: " + path);
    return buf;
}

json shape_json(const Shape4& s) { return json::array({s[0], s[1], s[2], s[3]}); }

Shape4 shape_from(const json& j) {
    if (!j.is_array() || j.size() != 4) throw std::runtime_error("manifest: bad extents");
    return Shape4{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

json load_manifest(const std::string& dir, const std::string& kind) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw std::runtime_error("cannot open container manifest: " + dir + "/manifest.json");
    json j = json::parse(in, nullptr, true, true);
    if (j.value("kind", "") != kind)
        throw std::runtime_error(dir + ": expected container kind \"" + kind + "\", found \"" +
                                 j.value("kind", "<missing>") + "\"");
    return j;
}

void store_manifest(const json& j, const std::string& dir) {
    fs::create_directories(dir);
    std::string tmp = dir + "/manifest.json.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write manifest in " + dir);
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, dir + "/manifest.json");
}

std::string subband_blob_name(int level, int kappa, int zeta) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "j%d_k%02d_z%d.bin", level, kappa, zeta);
    return buf;
}

void write_complex_blob(const std::string& path, const ComplexArray4D& a) {
    std::vector<double> buf(2 * a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        buf[2 * i] = a.data()[i].real();
        buf[2 * i + 1] = a.data()[i].imag();
    }
    write_blob(path, buf.data(), buf.size());
}

ComplexArray4D read_complex_blob(const std::string& path, const Shape4& s) {
    ComplexArray4D a(s);
    auto buf = read_blob(path, 2 * a.size());
    for (size_t i = 0; i < a.size(); ++i) a.data()[i] = {buf[2 * i], buf[2 * i + 1]};
    return a;
}

}  // namespace

void save_volume(const Volume4D& v, const std::string& dir) {
    json j{{"kind", "volume4d"}, {"extents", shape_json(v.shape())}, {"dtype", "f64le"}};
    store_manifest(j, dir);
    write_blob(dir + "/volume.bin", v.data(), v.size());
}

Volume4D load_volume(const std::string& dir) {
    json j = load_manifest(dir, "volume4d");
    Volume4D v(shape_from(j.at("extents")));
    v.vec() = read_blob(dir + "/volume.bin", v.size());
    return v;
}

void save_coeffs(const Coeffs4D& c, const std::string& dir) {
    json j{{"kind", "dtcwt_coeffs4d"},
           {"levels", c.levels},
           {"extents", shape_json(c.original_extents)},
           {"filter_bank", c.filter_bank},
           {"level1_details_included", c.level1_details_included},
           {"normalization", c.normalization == Normalization::kStandard ? "standard" : "parseval"},
           {"dtype", "c128le"}};
    store_manifest(j, dir);
    for (int jl = 1; jl <= c.levels; ++jl) {
        if (jl == 1 && !c.level1_details_included) continue;
        for (int k = 1; k <= 15; ++k)
            for (int z = 1; z <= 8; ++z)
                write_complex_blob(dir + "/" + subband_blob_name(jl, k, z),
                                   c.subbands[static_cast<size_t>(jl - 1)][static_cast<size_t>(k - 1)][static_cast<size_t>(z - 1)]);
    }
    for (int z = 1; z <= 8; ++z)
        write_complex_blob(dir + "/scal_z" + std::to_string(z) + ".bin",
                           c.final_scaling[static_cast<size_t>(z - 1)]);
}

Coeffs4D load_coeffs(const std::string& dir) {
    json j = load_manifest(dir, "dtcwt_coeffs4d");
    Coeffs4D c;
    c.levels = j.at("levels").get<int>();
    c.original_extents = shape_from(j.at("extents"));
    c.filter_bank = j.value("filter_bank", "");
    c.level1_details_included = j.at("level1_details_included").get<bool>();
    c.normalization =
        j.value("normalization", "standard") == "parseval" ? Normalization::kParseval : Normalization::kStandard;
    c.subbands.resize(static_cast<size_t>(c.levels));
    for (int jl = 1; jl <= c.levels; ++jl) {
        if (jl == 1 && !c.level1_details_included) continue;
        Shape4 s = c.subband_shape(jl);
        for (int k = 1; k <= 15; ++k)
            for (int z = 1; z <= 8; ++z)
                c.subbands[static_cast<size_t>(jl - 1)][static_cast<size_t>(k - 1)][static_cast<size_t>(z - 1)] =
                    read_complex_blob(dir + "/" + subband_blob_name(jl, k, z), s);
    }
    Shape4 fs = c.subband_shape(c.levels);
    for (int z = 1; z <= 8; ++z)
        c.final_scaling[static_cast<size_t>(z - 1)] =
            read_complex_blob(dir + "/scal_z" + std::to_string(z) + ".bin", fs);
    return c;
}

void save_dwt_coeffs(const DwtCoeffs4D& c, const std::string& dir) {
    json j{{"kind", "dwt_coeffs4d"},
           {"levels", c.levels},
           {"extents", shape_json(c.original_extents)},
           {"wavelet", c.wavelet},
           {"real_valued", true},
           {"dtype", "f64le"}};
    store_manifest(j, dir);
    for (int jl = 1; jl <= c.levels; ++jl)
        for (int k = 1; k <= 15; ++k) {
            const auto& sb = c.details[static_cast<size_t>(jl - 1)][static_cast<size_t>(k - 1)];
            write_blob(dir + "/" + subband_blob_name(jl, k, 0), sb.data(), sb.size());
        }
    write_blob(dir + "/approx.bin", c.approx.data(), c.approx.size());
}

DwtCoeffs4D load_dwt_coeffs(const std::string& dir) {
    json j = load_manifest(dir, "dwt_coeffs4d");
    DwtCoeffs4D c;
    c.levels = j.at("levels").get<int>();
    c.original_extents = shape_from(j.at("extents"));
    c.wavelet = j.at("wavelet").get<std::string>();
    c.details.resize(static_cast<size_t>(c.levels));
    for (int jl = 1; jl <= c.levels; ++jl) {
        Shape4 s = c.subband_shape(jl);
        for (int k = 1; k <= 15; ++k) {
            Volume4D sb(s);
            sb.vec() = read_blob(dir + "/" + subband_blob_name(jl, k, 0), sb.size());
            c.details[static_cast<size_t>(jl - 1)][static_cast<size_t>(k - 1)] = std::move(sb);
        }
    }
    Volume4D ap(c.subband_shape(c.levels));
    ap.vec() = read_blob(dir + "/approx.bin", ap.size());
    c.approx = std::move(ap);
    return c;
}

void save_geometry(const Geometry& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write geometry: " + path);
    out << "image " << g.nx << " " << g.ny << " " << g.nz << " " << g.nt << "\n";
    out << "det_count " << g.det_count << "\n";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", g.det_spacing);
    out << "det_spacing " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", g.pixel_size);
    out << "pixel_size " << buf << "\n";
    for (int t = 0; t < g.nt; ++t) {
        out << "angles " << t;
        for (double a : g.angles[static_cast<size_t>(t)]) {
            std::snprintf(buf, sizeof(buf), "%.17g", a);
            out << " " << buf;
        }
        out << "\n";
    }
}

Geometry load_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open geometry: " + path);
    Geometry g;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        if (key == "image") {
            if (!(ss >> g.nx >> g.ny >> g.nz >> g.nt))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": image needs 4 ints");
            g.angles.assign(static_cast<size_t>(g.nt), {});
        } else if (key == "det_count") {
            ss >> g.det_count;
        } else if (key == "det_spacing") {
            ss >> g.det_spacing;
        } else if (key == "pixel_size") {
            ss >> g.pixel_size;
        } else if (key == "angles") {
            int t;
            if (!(ss >> t) || t < 0 || t >= g.nt)
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad time index");
            double a;
            while (ss >> a) g.angles[static_cast<size_t>(t)].push_back(a);
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    return g;
}

void save_sinogram(const ProjectionData& p, const std::string& dir) {
    json j{{"kind", "sinogram"},
           {"nz", p.geom.nz},
           {"nt", p.geom.nt},
           {"det_count", p.geom.det_count},
           {"samples", p.data.size()},
           {"dtype", "f64le"}};
    store_manifest(j, dir);
    save_geometry(p.geom, dir + "/geometry.cfg");
    write_blob(dir + "/data.bin", p.data.data(), p.data.size());
}

ProjectionData load_sinogram(const std::string& dir) {
    json j = load_manifest(dir, "sinogram");
    ProjectionData p;
    p.geom = load_geometry(dir + "/geometry.cfg");
    size_t n = j.at("samples").get<size_t>();
    if (n != static_cast<size_t>(p.geom.total_rays()))
        throw std::runtime_error(dir + ": sample count does not match geometry");
    p.data = read_blob(dir + "/data.bin", n);
    return p;
}

void write_pgm(const std::string& path, const std::vector<double>& img, int width, int height,
               double lo, double hi) {
    if (static_cast<size_t>(width) * static_cast<size_t>(height) != img.size())
        throw std::invalid_argument("pgm: size mismatch");
    if (!(hi > lo)) throw std::invalid_argument("pgm: window must satisfy hi > lo");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write pgm: " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    std::vector<unsigned char> bytes(img.size());
    for (size_t i = 0; i < img.size(); ++i) {
        double v = (img[i] - lo) / (hi - lo);
        v = std::clamp(v, 0.0, 1.0);
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string export_slice(const Volume4D& v, const SlicePick& pick, const std::string& dir, double lo,
                         double hi) {
    const Shape4& s = v.shape();
    if (pick.time < 0 || pick.time >= s[3])
        throw std::invalid_argument("slice time " + std::to_string(pick.time) + " outside [0, " +
                                    std::to_string(s[3] - 1) + "]");
    int w = 0, h = 0;
    const char* plane = "";
    char axis = ' ';
    int bound = 0;
    switch (pick.plane) {
        case SlicePlane::kXY: plane = "xy"; axis = 'z'; bound = s[2]; w = s[0]; h = s[1]; break;
        case SlicePlane::kXZ: plane = "xz"; axis = 'y'; bound = s[1]; w = s[0]; h = s[2]; break;
        case SlicePlane::kYZ: plane = "yz"; axis = 'x'; bound = s[0]; w = s[1]; h = s[2]; break;
    }
    if (pick.index < 0 || pick.index >= bound)
        throw std::invalid_argument("slice index " + std::to_string(pick.index) + " outside [0, " +
                                    std::to_string(bound - 1) + "] for plane " + plane);
    std::vector<double> img(static_cast<size_t>(w) * static_cast<size_t>(h));
    for (int r = 0; r < h; ++r)
        for (int cidx = 0; cidx < w; ++cidx) {
            double val = 0;
            switch (pick.plane) {
                case SlicePlane::kXY: val = v.at(cidx, r, pick.index, pick.time); break;
                case SlicePlane::kXZ: val = v.at(cidx, pick.index, r, pick.time); break;
                case SlicePlane::kYZ: val = v.at(pick.index, cidx, r, pick.time); break;
            }
            img[static_cast<size_t>(r) * static_cast<size_t>(w) + static_cast<size_t>(cidx)] = val;
        }
    char name[64];
    std::snprintf(name, sizeof(name), "slice_%s_%c%03d_t%02d.pgm", plane, axis, pick.index, pick.time);
    fs::create_directories(dir);
    write_pgm(dir + "/" + name, img, w, h, lo, hi);
    return name;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

void write_convergence_csv(const ConvergenceReport& rep, const std::string& path) {
    std::vector<std::vector<double>> rows;
    rows.reserve(rep.rows.size());
    for (const auto& r : rep.rows)
        rows.push_back({static_cast<double>(r.iteration), r.objective, r.misfit, r.l1, r.sparsity, r.mu,
                        r.rel_change});
    write_csv(path, {"iteration", "objective", "misfit", "l1", "sparsity", "mu", "iterate_change"}, rows);
}

void RunManifest::add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
void RunManifest::add(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    entries.emplace_back(key, buf);
}
void RunManifest::add(const std::string& key, long long value) {
    entries.emplace_back(key, std::to_string(value));
}

void RunManifest::write(const std::string& dir) const {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["version"] = "dtcwt4d 1.0";
    j["timing_seconds"] = elapsed_seconds;
    json cfg = json::object();
    for (const auto& [k, v] : entries) cfg[k] = v;
    j["config"] = cfg;
    fs::create_directories(dir);
    std::string tmp = dir + "/run_manifest.json.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write run manifest in " + dir);
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, dir + "/run_manifest.json");
}

}  // namespace dtcwt
