#include "pinflow/spectral.hpp"
#include "pinflow/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace pinflow {

namespace {

/// FFTW plans for one grid shape; planning is serialized, execution is reentrant
struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    fftw_plan c2c_fwd = nullptr;
    fftw_plan c2c_bwd = nullptr;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

const Plans& plans_for(int nx, int ny) {
    static std::map<std::pair<int, int>, Plans> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_pair(nx, ny);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    const std::size_t nh = static_cast<std::size_t>(nx / 2 + 1) * ny;
    double* r = fftw_alloc_real(n);
    fftw_complex* c = fftw_alloc_complex(nh);
    fftw_complex* c1 = fftw_alloc_complex(n);
    fftw_complex* c2 = fftw_alloc_complex(n);
    // ESTIMATE keeps plan choice deterministic across runs; UNALIGNED allows std::vector buffers
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p;
    p.r2c = fftw_plan_dft_r2c_2d(ny, nx, r, c, flags);
    p.c2r = fftw_plan_dft_c2r_2d(ny, nx, c, r, flags);
    p.c2c_fwd = fftw_plan_dft_2d(ny, nx, c1, c2, FFTW_FORWARD, flags);
    p.c2c_bwd = fftw_plan_dft_2d(ny, nx, c1, c2, FFTW_BACKWARD, flags);
    fftw_free(r);
    fftw_free(c);
    fftw_free(c1);
    fftw_free(c2);
    if (!p.r2c || !p.c2r || !p.c2c_fwd || !p.c2c_bwd) throw NumericalError("FFTW planning failed");
    return cache.emplace(key, p).first->second;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

template <class Fn>
ScalarField apply_symbol(const ScalarField& f, Fn symbol) {
    Spectrum s = forward_fft(f);
    for (int j = 0; j < s.rows(); ++j)
        for (int i = 0; i < s.cols(); ++i) s(i, j) *= symbol(s, i, j);
    return inverse_fft(s);
}

} // namespace

Spectrum::Spectrum(const Grid2D& g)
    : grid_(g), data_(static_cast<std::size_t>(g.nx() / 2 + 1) * g.ny()) {}

Spectrum forward_fft(const ScalarField& f) {
    const Grid2D& g = f.grid();
    const Plans& p = plans_for(g.nx(), g.ny());
    Spectrum s(g);
    // r2c does not modify its input
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(f.values().data()), as_fftw(s.data()));
    return s;
}

ScalarField inverse_fft(const Spectrum& s) {
    const Grid2D& g = s.grid();
    const Plans& p = plans_for(g.nx(), g.ny());
    Spectrum work = s; // c2r destroys its input
    ScalarField out(g);
    fftw_execute_dft_c2r(p.c2r, as_fftw(work.data()), out.values().data());
    out *= 1.0 / static_cast<double>(g.size());
    return out;
}

std::vector<std::complex<double>> forward_fft(const ComplexField& f) {
    const Grid2D& g = f.grid();
    const Plans& p = plans_for(g.nx(), g.ny());
    std::vector<std::complex<double>> in = f.values(), out(g.size());
    fftw_execute_dft(p.c2c_fwd, as_fftw(in.data()), as_fftw(out.data()));
    return out;
}

ComplexField inverse_fft(const Grid2D& g, std::vector<std::complex<double>> coeffs) {
    require(coeffs.size() == g.size(), "coefficient count does not match grid");
    const Plans& p = plans_for(g.nx(), g.ny());
    std::vector<std::complex<double>> out(g.size());
    fftw_execute_dft(p.c2c_bwd, as_fftw(coeffs.data()), as_fftw(out.data()));
    const double inv = 1.0 / static_cast<double>(g.size());
    for (auto& v : out) v *= inv;
    return ComplexField(g, std::move(out));
}

ScalarField partial_x(const ScalarField& f) {
    return apply_symbol(f, [](const Spectrum& s, int i, int) { return std::complex<double>(0.0, s.kx_d1(i)); });
}

ScalarField partial_y(const ScalarField& f) {
    return apply_symbol(f, [](const Spectrum& s, int, int j) { return std::complex<double>(0.0, s.ky_d1(j)); });
}

VectorField gradient(const ScalarField& f) {
    Spectrum s = forward_fft(f);
    Spectrum sx = s, sy = s;
    for (int j = 0; j < s.rows(); ++j)
        for (int i = 0; i < s.cols(); ++i) {
            sx(i, j) *= std::complex<double>(0.0, s.kx_d1(i));
            sy(i, j) *= std::complex<double>(0.0, s.ky_d1(j));
        }
    return VectorField(inverse_fft(sx), inverse_fft(sy));
}

VectorField perp_gradient(const ScalarField& f) {
    VectorField g = gradient(f);
    return VectorField(-1.0 * g.y(), g.x());
}

ScalarField divergence(const VectorField& v) {
    Spectrum a = forward_fft(v.x());
    Spectrum b = forward_fft(v.y());
    for (int j = 0; j < a.rows(); ++j)
        for (int i = 0; i < a.cols(); ++i)
            a(i, j) = std::complex<double>(0.0, a.kx_d1(i)) * a(i, j) + std::complex<double>(0.0, a.ky_d1(j)) * b(i, j);
    return inverse_fft(a);
}

ScalarField curl(const VectorField& v) {
    Spectrum a = forward_fft(v.y());
    Spectrum b = forward_fft(v.x());
    for (int j = 0; j < a.rows(); ++j)
        for (int i = 0; i < a.cols(); ++i)
            a(i, j) = std::complex<double>(0.0, a.kx_d1(i)) * a(i, j) - std::complex<double>(0.0, a.ky_d1(j)) * b(i, j);
    return inverse_fft(a);
}

ScalarField laplacian(const ScalarField& f) {
    return apply_symbol(f, [](const Spectrum& s, int i, int j) {
        return std::complex<double>(-(s.kx(i) * s.kx(i) + s.ky(j) * s.ky(j)), 0.0);
    });
}

VectorField laplacian(const VectorField& v) { return VectorField(laplacian(v.x()), laplacian(v.y())); }

std::pair<ComplexField, ComplexField> gradient(const ComplexField& u) {
    const Grid2D& g = u.grid();
    auto c = forward_fft(u);
    auto cx = c, cy = c;
    const int nx = g.nx(), ny = g.ny();
    for (int j = 0; j < ny; ++j) {
        const int jj = j <= ny / 2 ? j : j - ny;
        const double ky = (j == ny / 2) ? 0.0 : 2.0 * std::numbers::pi / g.ly() * jj;
        for (int i = 0; i < nx; ++i) {
            const int ii = i <= nx / 2 ? i : i - nx;
            const double kx = (i == nx / 2) ? 0.0 : 2.0 * std::numbers::pi / g.lx() * ii;
            const std::size_t k = g.index(i, j);
            cx[k] *= std::complex<double>(0.0, kx);
            cy[k] *= std::complex<double>(0.0, ky);
        }
    }
    return {inverse_fft(g, std::move(cx)), inverse_fft(g, std::move(cy))};
}

ScalarField dealias(const ScalarField& f) {
    const int nx = f.grid().nx(), ny = f.grid().ny();
    return apply_symbol(f, [nx, ny](const Spectrum&, int i, int j) {
        const int jj = j <= ny / 2 ? j : ny - j;
        return (3 * i < nx && 3 * jj < ny) ? 1.0 : 0.0;
    });
}

VectorField dealias(const VectorField& v) { return VectorField(dealias(v.x()), dealias(v.y())); }

} // namespace pinflow
