#include "pinflow/field_io.hpp"
#include "pinflow/error.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <istream>
#include <vector>

namespace pinflow {

namespace {

constexpr std::array<char, 5> magic{'P', 'F', 'L', 'D', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
    os.write(b, 8);
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated PFLD1 stream");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void write_header(std::ostream& os, const Grid2D& g) {
    os.write(magic.data(), magic.size());
    put_u64(os, static_cast<std::uint64_t>(g.nx()));
    put_u64(os, static_cast<std::uint64_t>(g.ny()));
    put_f64(os, g.lx());
    put_f64(os, g.ly());
}

Grid2D read_header(std::istream& is, Vec2 origin) {
    std::array<char, 5> m{};
    if (!is.read(m.data(), m.size()) || m != magic) throw Error("not a PFLD1 stream");
    const auto nx = get_u64(is), ny = get_u64(is);
    const double lx = get_f64(is), ly = get_f64(is);
    if (nx > (1u << 20) || ny > (1u << 20)) throw Error("PFLD1 header has implausible dimensions");
    return Grid2D(static_cast<int>(nx), static_cast<int>(ny), lx, ly, origin);
}

void csv_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

} // namespace

void write_csv(std::ostream& os, const ScalarField& f, const std::string& name) {
    const Grid2D& g = f.grid();
    os << "x,y," << name << "\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            csv_double(os, g.x(i));
            os << ',';
            csv_double(os, g.y(j));
            os << ',';
            csv_double(os, f(i, j));
            os << '\n';
        }
}

void write_csv(std::ostream& os, const VectorField& f) {
    const Grid2D& g = f.grid();
    os << "x,y,vx,vy\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 v = f(i, j);
            for (double d : {g.x(i), g.y(j), v.x}) {
                csv_double(os, d);
                os << ',';
            }
            csv_double(os, v.y);
            os << '\n';
        }
}

void write_csv(std::ostream& os, const ComplexField& f) {
    const Grid2D& g = f.grid();
    os << "x,y,re,im\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const auto v = f(i, j);
            for (double d : {g.x(i), g.y(j), v.real()}) {
                csv_double(os, d);
                os << ',';
            }
            csv_double(os, v.imag());
            os << '\n';
        }
}

void write_binary(std::ostream& os, const ScalarField& f) {
    write_header(os, f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) put_f64(os, f[k]);
}

void write_binary(std::ostream& os, const VectorField& f) {
    write_header(os, f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) {
        put_f64(os, f.x()[k]);
        put_f64(os, f.y()[k]);
    }
}

void write_binary(std::ostream& os, const ComplexField& f) {
    write_header(os, f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) {
        put_f64(os, f[k].real());
        put_f64(os, f[k].imag());
    }
}

ScalarField read_scalar_binary(std::istream& is, Vec2 origin) {
    ScalarField f(read_header(is, origin));
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = get_f64(is);
    return f;
}

VectorField read_vector_binary(std::istream& is, Vec2 origin) {
    VectorField f(read_header(is, origin));
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double x = get_f64(is);
        f.set(k, {x, get_f64(is)});
    }
    return f;
}

ComplexField read_complex_binary(std::istream& is, Vec2 origin) {
    ComplexField f(read_header(is, origin));
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double re = get_f64(is);
        f[k] = {re, get_f64(is)};
    }
    return f;
}

namespace {
template <class F>
void save_with(const std::string& path, const F& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_binary(os, f);
    if (!os) throw Error("write failed for " + path);
}
} // namespace

void save_binary(const std::string& path, const ScalarField& f) { save_with(path, f); }
void save_binary(const std::string& path, const VectorField& f) { save_with(path, f); }
void save_binary(const std::string& path, const ComplexField& f) { save_with(path, f); }

ScalarField load_scalar_binary(const std::string& path, Vec2 origin) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return read_scalar_binary(is, origin);
}

void save_csv(const std::string& path, const ScalarField& f, const std::string& name) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_csv(os, f, name);
}

} // namespace pinflow
