#include "pinflow/poisson.hpp"
#include "pinflow/error.hpp"
#include "pinflow/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

namespace pinflow {

namespace {

constexpr double inv_two_pi = 0.5 / std::numbers::pi;

/// Transformed free-space kernels for one grid shape and spacing
struct FreespaceKernels {
    Spectrum green;
    Spectrum dgreen_x;
    Spectrum dgreen_y;
};

Grid2D doubled(const Grid2D& g) { return Grid2D(2 * g.nx(), 2 * g.ny(), 2 * g.lx(), 2 * g.ly()); }

std::shared_ptr<const FreespaceKernels> kernels_for(const Grid2D& g) {
    using Key = std::tuple<int, int, double, double>;
    static std::map<Key, std::shared_ptr<const FreespaceKernels>> cache;
    static std::mutex mutex;
    const Key key{g.nx(), g.ny(), g.hx(), g.hy()};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const Grid2D big = doubled(g);
    const int NX = big.nx(), NY = big.ny();
    const double hx = g.hx(), hy = g.hy();
    ScalarField G(big), Kx(big), Ky(big);
    // Cell-averaged log over the disk of equal area regularizes the origin
    const double r_eq = std::sqrt(hx * hy / std::numbers::pi);
    for (int j = 0; j < NY; ++j) {
        const int jj = j < g.ny() ? j : j - NY;
        for (int i = 0; i < NX; ++i) {
            const int ii = i < g.nx() ? i : i - NX;
            const double x = ii * hx, y = jj * hy, r2 = x * x + y * y;
            if (ii == 0 && jj == 0) {
                G(i, j) = inv_two_pi * (std::log(r_eq) - 0.5);
                continue;
            }
            G(i, j) = inv_two_pi * 0.5 * std::log(r2);
            // The folded offsets -nx, -ny never pair two physical cells
            Kx(i, j) = (ii == -g.nx()) ? 0.0 : inv_two_pi * x / r2;
            Ky(i, j) = (jj == -g.ny()) ? 0.0 : inv_two_pi * y / r2;
        }
    }
    auto k = std::make_shared<const FreespaceKernels>(FreespaceKernels{forward_fft(G), forward_fft(Kx), forward_fft(Ky)});
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(key, k).first->second;
}

Spectrum padded_spectrum(const ScalarField& f) {
    const Grid2D& g = f.grid();
    ScalarField pad(doubled(g));
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) pad(i, j) = f(i, j);
    return forward_fft(pad);
}

ScalarField convolve(const Spectrum& fhat, const Spectrum& khat, const Grid2D& g) {
    Spectrum prod = fhat;
    for (std::size_t k = 0; k < prod.size(); ++k) prod.data()[k] *= khat.data()[k];
    ScalarField big = inverse_fft(prod);
    ScalarField out(g);
    const double area = g.cell_area();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out(i, j) = area * big(i, j);
    return out;
}

ScalarField poisson_periodic(const ScalarField& f) {
    Spectrum s = forward_fft(f);
    for (int j = 0; j < s.rows(); ++j)
        for (int i = 0; i < s.cols(); ++i) {
            const double k2 = s.kx(i) * s.kx(i) + s.ky(j) * s.ky(j);
            s(i, j) = (i == 0 && j == 0) ? 0.0 : -s(i, j) / k2;
        }
    return inverse_fft(s);
}

} // namespace

void check_freespace_support(const ScalarField& f, const FreespaceOptions& opt) {
    const Grid2D& g = f.grid();
    const double fmax = f.max_abs();
    if (fmax == 0.0) return;
    const int mx = static_cast<int>(std::ceil(opt.margin_fraction * g.nx()));
    const int my = static_cast<int>(std::ceil(opt.margin_fraction * g.ny()));
    double band = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (i < mx || i >= g.nx() - mx || j < my || j >= g.ny() - my) band = std::max(band, std::abs(f(i, j)));
    if (band > opt.margin_tolerance * fmax)
        throw ConfigError("free-space input touches the boundary margin (relative size " + std::to_string(band / fmax) +
                          ")");
}

ScalarField poisson_solve(const ScalarField& f, PoissonMode mode, const FreespaceOptions& opt) {
    if (mode == PoissonMode::periodic_meanfree) return poisson_periodic(f);
    check_freespace_support(f, opt);
    auto k = kernels_for(f.grid());
    return convolve(padded_spectrum(f), k->green, f.grid());
}

VectorField freespace_gradient(const ScalarField& f, const FreespaceOptions& opt) {
    check_freespace_support(f, opt);
    auto k = kernels_for(f.grid());
    const Spectrum fhat = padded_spectrum(f);
    return VectorField(convolve(fhat, k->dgreen_x, f.grid()), convolve(fhat, k->dgreen_y, f.grid()));
}

} // namespace pinflow
