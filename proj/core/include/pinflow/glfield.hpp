#pragma once

/// @file glfield.hpp
/// @brief Synthetic Ginzburg-Landau order parameters and field-level diagnostics:
/// supercurrent, vorticity, winding numbers, modulated energy and excess

#include "pinflow/grid.hpp"
#include "pinflow/pinning.hpp"
#include "pinflow/vec2.hpp"

#include <string>
#include <vector>

namespace pinflow {

enum class VortexProfile {
    tanh,      ///< rho(r) = tanh(r / sqrt 2)
    polynomial ///< rho(r) = r / sqrt(r^2 + 2)
};

/// Vortex centers with integer degrees and a core size epsilon
struct SyntheticVortexConfig {
    std::vector<Vec2> centers;
    std::vector<int> degrees;
    double epsilon = 0.01;
    VortexProfile profile = VortexProfile::tanh;
    /// Constant phase offset
    double phase = 0.0;

    /// Checks epsilon > 0, matching sizes and pairwise separations >= 10 epsilon; throws ConfigError
    void validate() const;
};

/// Core profile rho(r) with r measured in units of epsilon
double vortex_profile(VortexProfile p, double r);

/// u(x) = e^{i phase} prod_i rho(|x - a_i| / eps) e^{i d_i theta_i(x)}; centers must lie at least
/// 10 epsilon inside the grid box
ComplexField synthesize_field(const SyntheticVortexConfig& cfg, const Grid2D& g);

enum class DerivativeMethod {
    automatic,        ///< spectral when the boundary winding vanishes, finite differences otherwise
    spectral,         ///< periodic Fourier derivatives
    finite_difference ///< fourth-order centered differences, second-order one-sided at the box edges
};

/// Gradient of a complex field with the selected method
std::pair<ComplexField, ComplexField> field_gradient(const ComplexField& u, DerivativeMethod method = DerivativeMethod::automatic);

struct CurrentVorticity {
    /// Supercurrent j = <grad u, i u> = Im(conj(u) grad u)
    VectorField j;
    /// Vorticity mu = curl j
    ScalarField mu;
    DerivativeMethod method = DerivativeMethod::spectral;
    std::vector<std::string> warnings;
};

/// Supercurrent and vorticity; warns when the grid spacing exceeds epsilon / 4 (epsilon > 0 given)
CurrentVorticity supercurrent_and_vorticity(const ComplexField& u, double epsilon = 0.0,
                                            DerivativeMethod method = DerivativeMethod::automatic);

/// Winding number of arg u along the rectangle of grid nodes [i0, i1] x [j0, j1] (counterclockwise)
int winding_number(const ComplexField& u, int i0, int j0, int i1, int j1);
/// Winding along the outermost grid nodes
int boundary_winding(const ComplexField& u);

/// Integral of f over the disk B(center, radius), midpoint rule on grid nodes
double integrate_disk(const ScalarField& f, Vec2 center, double radius);

/// Smooth cut-off: 1 on [0, 1], 0 on [2, inf), smooth gluing in between
double cutoff(double s);
/// Derivative of cutoff(s)
double cutoff_derivative(double s);

struct ModulatedEnergyReport {
    double E = 0.0;
    double D = 0.0;
    /// Suprema over lattice translates z in R Z^2 inside the box
    double E_star = 0.0;
    double D_star = 0.0;
    double R = 0.0;
    double N = 1.0;
    Vec2 z{};
};

/// E = int (a chi/2)(|grad u - i u N v|^2 + (a / 2 eps^2)(1 - |u|^2)^2) with chi = cutoff(|x - z| / R),
/// D = E - (|log eps| / 2) int a chi mu
ModulatedEnergyReport modulated_energy(const ComplexField& u, const VectorField& v, double N,
                                       const PinningLandscape& land, double R, Vec2 z, double epsilon,
                                       DerivativeMethod method = DerivativeMethod::automatic);

} // namespace pinflow
