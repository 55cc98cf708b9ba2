#pragma once

/// @file poisson.hpp
/// @brief Poisson and variable-coefficient elliptic solvers

#include "pinflow/grid.hpp"

namespace pinflow {

enum class PoissonMode {
    periodic_meanfree, ///< solve on the torus after mean subtraction, zero-mean result
    freespace          ///< convolution with (1/2pi) log|x| on a zero-padded doubled box
};

/// Options for the free-space solver
struct FreespaceOptions {
    /// Width of the boundary band, as a fraction of each box side, where input must vanish
    double margin_fraction = 1.0 / 16.0;
    /// Largest admissible |f| in the band, relative to max |f|
    double margin_tolerance = 1e-6;
};

/// Solves Lap phi = f
ScalarField poisson_solve(const ScalarField& f, PoissonMode mode, const FreespaceOptions& opt = {});

/// Gradient of the free-space solution, grad (G * f), evaluated with derivative kernels
///
/// Avoids differentiating the non-periodic potential on the periodic grid.
VectorField freespace_gradient(const ScalarField& f, const FreespaceOptions& opt = {});

/// Throws ConfigError when f does not vanish on the free-space margin band
void check_freespace_support(const ScalarField& f, const FreespaceOptions& opt = {});

enum class EllipticForm {
    div_a_grad,   ///< div(a grad phi) = rhs
    div_ainv_grad ///< div(a^{-1} grad phi) = rhs
};

/// Convergence controls for the weighted solve
struct EllipticOptions {
    double rel_tolerance = 1e-10;
    /// Iteration cap; 0 means 10 * max(nx, ny)
    int max_iterations = 0;
};

/// Result of a weighted elliptic solve
struct EllipticResult {
    ScalarField phi;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves div(a grad phi) = rhs (or with 1/a) on the torus by preconditioned CG
///
/// The rhs is projected onto the range of the discrete operator (mean and the
/// Nyquist-corner modes removed). Returns a zero-mean phi; throws NumericalError
/// when the iteration cap is reached.
EllipticResult elliptic_solve_weighted(const ScalarField& rhs, const ScalarField& weight, EllipticForm form,
                                       const EllipticOptions& opt = {});

/// Applies the discrete operator div(a grad .) used by elliptic_solve_weighted
ScalarField apply_div_a_grad(const ScalarField& phi, const ScalarField& a);

} // namespace pinflow
