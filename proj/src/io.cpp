#include "cpl/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace cpl {

namespace {

constexpr char kMagic[8] = {'C', 'P', 'L', 'F', 'L', 'D', '0', '1'};

void write_u32(std::ofstream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_f64(std::ofstream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t read_u32(std::ifstream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
double read_f64(std::ifstream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_header(std::ofstream& os, double R, int nx, int ny, int nz, uint32_t ncomp,
                  bool is_complex) {
    os.write(kMagic, 8);
    write_f64(os, R);
    write_u32(os, static_cast<uint32_t>(nx));
    write_u32(os, static_cast<uint32_t>(ny));
    write_u32(os, static_cast<uint32_t>(nz));
    write_u32(os, ncomp);
    write_u32(os, is_complex ? 1u : 0u);
}

}  // namespace

void save_fields(const std::string& path, double R, const std::vector<ScalarField>& comps) {
    ensure(!comps.empty(), "save_fields: no components");
    std::ofstream os(path, std::ios::binary);
    ensure(os.good(), "save_fields: cannot open " + path);
    write_header(os, R, comps[0].nx, comps[0].ny, comps[0].nz,
                 static_cast<uint32_t>(comps.size()), true);
    for (const auto& f : comps) {
        ensure(f.same_shape(comps[0]), "save_fields: component shape mismatch");
        for (const Complex& z : f.a) {
            write_f64(os, z.real());
            write_f64(os, z.imag());
        }
    }
    ensure(os.good(), "save_fields: write failed for " + path);
}

void save_fields(const std::string& path, double R, const std::vector<RealField>& comps) {
    ensure(!comps.empty(), "save_fields: no components");
    std::ofstream os(path, std::ios::binary);
    ensure(os.good(), "save_fields: cannot open " + path);
    write_header(os, R, comps[0].nx, comps[0].ny, comps[0].nz,
                 static_cast<uint32_t>(comps.size()), false);
    for (const auto& f : comps) {
        ensure(f.same_shape(comps[0]), "save_fields: component shape mismatch");
        for (double v : f.a) write_f64(os, v);
    }
    ensure(os.good(), "save_fields: write failed for " + path);
}

FieldBundle load_fields(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    ensure(is.good(), "load_fields: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    ensure(is.good() && std::memcmp(magic, kMagic, 8) == 0,
           "load_fields: bad magic in " + path);
    FieldBundle b;
    b.R = read_f64(is);
    b.nx = static_cast<int>(read_u32(is));
    b.ny = static_cast<int>(read_u32(is));
    b.nz = static_cast<int>(read_u32(is));
    uint32_t ncomp = read_u32(is);
    b.is_complex = read_u32(is) != 0;
    ensure(b.nx > 0 && b.ny > 0 && b.nz > 0 && ncomp > 0, "load_fields: bad header");
    for (uint32_t c = 0; c < ncomp; ++c) {
        if (b.is_complex) {
            ScalarField f(b.nx, b.ny, b.nz);
            for (Complex& z : f.a) {
                double re = read_f64(is), im = read_f64(is);
                z = Complex(re, im);
            }
            b.cfields.push_back(std::move(f));
        } else {
            RealField f(b.nx, b.ny, b.nz);
            for (double& v : f.a) v = read_f64(is);
            b.rfields.push_back(std::move(f));
        }
    }
    ensure(is.good(), "load_fields: truncated file " + path);
    return b;
}

void save_vtk(const std::string& path, const Grid3D& g,
              const std::vector<std::pair<std::string, const RealField*>>& fields) {
    std::ofstream os(path);
    ensure(os.good(), "save_vtk: cannot open " + path);
    os << "# vtk DataFile Version 3.0\n";
    os << "field export\n";
    os << "ASCII\n";
    os << "DATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.nx << " " << g.nx << " " << g.nx << "\n";
    os << "ORIGIN " << -g.R << " " << -g.R << " " << -g.R << "\n";
    os << "SPACING " << g.dx << " " << g.dx << " " << g.dx << "\n";
    os << "POINT_DATA " << g.nodes() << "\n";
    char buf[64];
    for (const auto& [name, f] : fields) {
        os << "SCALARS " << name << " double 1\n";
        os << "LOOKUP_TABLE default\n";
        // VTK wants x fastest; internal layout has t fastest.
        for (int t = 0; t < g.nx; ++t)
            for (int j = 0; j < g.nx; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    std::snprintf(buf, sizeof buf, "%.17g\n", f->at(i, j, t));
                    os << buf;
                }
    }
}

void save_csv_slice(const std::string& path, const Grid3D& g, const RealField& f,
                    double z_plane) {
    int best = 0;
    for (int t = 1; t < g.nx; ++t)
        if (std::abs(g.coord(t) - z_plane) < std::abs(g.coord(best) - z_plane)) best = t;
    std::ofstream os(path);
    ensure(os.good(), "save_csv_slice: cannot open " + path);
    char buf[96];
    os << "x,y,value\n";
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.coord(i), g.coord(j),
                          f.at(i, j, best));
            os << buf;
        }
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace cpl
