#pragma once

/// @file spectral.hpp
/// @brief Fourier pseudo-spectral differential calculus on periodic grids
///
/// First derivatives drop the Nyquist modes (their derivative is not
/// representable as a real field); the Laplacian keeps the full -|k|^2 symbol.

#include "pinflow/grid.hpp"

#include <complex>
#include <numbers>
#include <utility>
#include <vector>

namespace pinflow {

/// Half-complex spectrum of a real field: ny rows of nx/2 + 1 coefficients
class Spectrum {
public:
    explicit Spectrum(const Grid2D& g);

    const Grid2D& grid() const { return grid_; }
    int rows() const { return grid_.ny(); }
    int cols() const { return grid_.nx() / 2 + 1; }
    std::size_t size() const { return data_.size(); }
    std::complex<double>& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * cols() + i]; }
    const std::complex<double>& operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * cols() + i]; }
    std::complex<double>* data() { return data_.data(); }
    const std::complex<double>* data() const { return data_.data(); }

    /// Angular wavenumber of column i (0 <= i <= nx/2)
    double kx(int i) const { return 2.0 * std::numbers::pi / grid_.lx() * i; }
    /// Angular wavenumber of row j, folded to (-ny/2, ny/2]
    double ky(int j) const { return 2.0 * std::numbers::pi / grid_.ly() * (j <= grid_.ny() / 2 ? j : j - grid_.ny()); }
    /// Wavenumbers for first derivatives (Nyquist entries set to zero)
    double kx_d1(int i) const { return i == grid_.nx() / 2 ? 0.0 : kx(i); }
    double ky_d1(int j) const { return j == grid_.ny() / 2 ? 0.0 : ky(j); }

private:
    Grid2D grid_;
    std::vector<std::complex<double>> data_;
};

/// Unnormalized forward real-to-complex transform
Spectrum forward_fft(const ScalarField& f);
/// Normalized inverse transform (inverse_fft(forward_fft(f)) == f)
ScalarField inverse_fft(const Spectrum& s);

/// Unnormalized forward complex transform
std::vector<std::complex<double>> forward_fft(const ComplexField& f);
/// Normalized inverse complex transform
ComplexField inverse_fft(const Grid2D& g, std::vector<std::complex<double>> coeffs);

ScalarField partial_x(const ScalarField& f);
ScalarField partial_y(const ScalarField& f);
VectorField gradient(const ScalarField& f);
/// grad^perp f = J grad f = (-d2 f, d1 f)
VectorField perp_gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// curl v = d1 v2 - d2 v1
ScalarField curl(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
/// Componentwise Laplacian
VectorField laplacian(const VectorField& v);

/// Spectral (d1 u, d2 u) of a periodic complex field
std::pair<ComplexField, ComplexField> gradient(const ComplexField& u);

/// Zeroes Fourier modes outside the 2/3 band in each direction
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);

} // namespace pinflow
