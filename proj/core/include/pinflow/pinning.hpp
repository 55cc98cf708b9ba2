#pragma once

/// @file pinning.hpp
/// @brief Two-scale pinning landscapes h(x) = eta * h0(x, x/eta)

#include "pinflow/grid.hpp"
#include "pinflow/vec2.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pinflow {

/// Symmetric 2x2 matrix (xx, xy, yy)
struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
};

/// Periodic cell potential y -> c(y) with period 1 in each coordinate
class CellPotential {
public:
    virtual ~CellPotential() = default;

    virtual double value(Vec2 y) const = 0;
    virtual Vec2 gradient(Vec2 y) const = 0;
    virtual Sym2 hessian(Vec2 y) const = 0;
    virtual double min_value() const = 0;
    virtual double max_value() const = 0;
    virtual std::string kind() const = 0;

    double osc() const { return max_value() - min_value(); }
};

/// c(y) = value
std::shared_ptr<const CellPotential> make_constant_cell(double value);
/// c(y) = amplitude * cos(2 pi y1); the washboard uses amplitude -1/(2 pi)
std::shared_ptr<const CellPotential> make_cosine1d_cell(double amplitude);
/// c(y) = amplitude * (cos 2 pi y1 + cos 2 pi y2)
std::shared_ptr<const CellPotential> make_eggbox_cell(double amplitude);

/// One term c cos(2 pi k.y) + s sin(2 pi k.y)
struct FourierMode {
    int k1 = 0, k2 = 0;
    double cos_coef = 0.0, sin_coef = 0.0;
};

/// c(y) = mean + sum of Fourier modes
std::shared_ptr<const CellPotential> make_fourier_cell(std::vector<FourierMode> modes, double mean = 0.0);

/// Random Fourier series with all wavevectors 1 <= |k|_inf <= modes, coefficient
/// spread decaying like |k|^-2, scaled so that sum |coef| = amplitude
std::shared_ptr<const CellPotential> make_tilted_random_fourier_cell(std::uint64_t seed, int modes, double amplitude);

/// Periodic bicubic (Catmull-Rom) interpolant of n x n samples at y = (i/n, j/n), row-major in j
std::shared_ptr<const CellPotential> make_tabulated_cell(int n, std::vector<double> values);

/// Slow multiplicative modulation s(x) = 1 + amplitude * cos(q.x)
struct SlowModulation {
    double amplitude = 0.0;
    Vec2 wavevector{};

    double value(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;
    bool active() const { return amplitude != 0.0; }
};

/// Values returned by eval_pinning
struct PinningSample {
    double h = 0.0;
    Vec2 gradh{};
    double a = 1.0;
};

/// Two-scale landscape h0(x, y) = scale * s(x) * c(y) with pin separation eta
class PinningLandscape {
public:
    PinningLandscape();
    PinningLandscape(std::shared_ptr<const CellPotential> cell, double eta = 1.0, double scale = 1.0,
                     SlowModulation slow = {});

    static PinningLandscape zero();
    /// h0 = -cos(2 pi y1) / (2 pi)
    static PinningLandscape washboard(double eta = 1.0);
    /// h0 = -(cos 2 pi y1 + cos 2 pi y2) / (2 pi)
    static PinningLandscape eggbox(double eta = 1.0);

    /// h(x) = eta h0(x, x/eta), grad h = grad_y h0 + eta grad_x h0, a = e^h
    PinningSample eval(Vec2 x) const;

    /// h0(x_slow, y)
    double cell_value(Vec2 y, Vec2 x_slow = {}) const;
    /// grad_y h0(x_slow, y)
    Vec2 cell_gradient(Vec2 y, Vec2 x_slow = {}) const;
    Sym2 cell_hessian(Vec2 y, Vec2 x_slow = {}) const;
    /// max_y h0 - min_y h0 at the given slow position
    double osc(Vec2 x_slow = {}) const;

    /// True when h0 <= 0 everywhere (required by the GL regimes with h bounded above)
    bool admissible_nonpositive() const;
    /// True when the cell potential vanishes identically
    bool is_zero() const;

    double eta() const { return eta_; }
    double scale() const { return scale_; }
    const SlowModulation& slow() const { return slow_; }
    const CellPotential& cell() const { return *cell_; }
    std::shared_ptr<const CellPotential> cell_ptr() const { return cell_; }

    /// Samples h, grad h and a on a grid
    ScalarField sample_h(const Grid2D& g) const;
    VectorField sample_gradh(const Grid2D& g) const;
    ScalarField sample_a(const Grid2D& g) const;

private:
    std::shared_ptr<const CellPotential> cell_;
    double eta_;
    double scale_;
    SlowModulation slow_;
};

/// Free-function form of PinningLandscape::eval
inline PinningSample eval_pinning(const PinningLandscape& land, Vec2 x) { return land.eval(x); }

/// Parses a JSON landscape descriptor; throws ConfigError on invalid input
PinningLandscape landscape_from_json(const std::string& text);

} // namespace pinflow
