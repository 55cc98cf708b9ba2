#pragma once

/// @file meanfield.hpp
/// @brief Mean-field vorticity equations, velocity reconstruction and time stepping
///
/// Transport of the vorticity is written as dm/dt = -div(u m) with
///   u = -(alpha I - beta J)(grad h - F + 2 lambda v^perp)   (dissipative variants)
///   u = -(F^perp + 2 lambda v)                               (lake variant)
/// and the continuum counterpart of the particle pair sum is obtained with lambda = pi.

#include "pinflow/params.hpp"
#include "pinflow/pinning.hpp"
#include "pinflow/poisson.hpp"

#include <memory>
#include <optional>

namespace pinflow {

enum class MeanFieldVariant { IncompressibleDissipative, CompressibleDissipative, DegenerateParabolic, ConservativeLake };

std::string to_string(MeanFieldVariant v);
MeanFieldVariant parse_variant(const std::string& s);

enum class TransportScheme {
    spectral, ///< pseudo-spectral divergence with 2/3-rule dealiasing
    upwind    ///< first-order finite-volume upwind fluxes
};

enum class TimeScheme { ssprk3, rk4 };

struct MeanFieldOptions {
    PoissonMode poisson = PoissonMode::periodic_meanfree;
    FreespaceOptions freespace;
    TransportScheme transport = TransportScheme::spectral;
    bool dealias = true;
    /// Negativity level that counts as a positivity event
    double tol_pos = 1e-8;
    /// Clip values below -tol_pos to zero (changes mass; off by default)
    bool clip_negative = false;
    /// Advective Courant number bound
    double cfl = 0.4;
    /// Shrink steps to the stability bound instead of failing
    bool adaptive = false;
    /// Multiplier on the alpha^-1 diffusion of d (continuation towards the incompressible limit)
    double divergence_diffusion_scale = 1.0;
};

/// Immutable problem description with the pinning fields sampled on the grid
class MeanFieldModel {
public:
    MeanFieldModel(const Grid2D& grid, MeanFieldVariant variant, Params params,
                   std::shared_ptr<const PinningLandscape> landscape = nullptr, MeanFieldOptions options = {});

    const Grid2D& grid() const { return grid_; }
    MeanFieldVariant variant() const { return variant_; }
    const Params& params() const { return params_; }
    const MeanFieldOptions& options() const { return options_; }
    const PinningLandscape* landscape() const { return landscape_.get(); }
    const ScalarField& h() const { return h_; }
    const VectorField& gradh() const { return gradh_; }
    const ScalarField& a() const { return a_; }
    const VectorField& force() const { return force_; }
    /// True when a == 1 on the whole grid
    bool unit_weight() const { return unit_weight_; }

private:
    Grid2D grid_;
    MeanFieldVariant variant_;
    Params params_;
    std::shared_ptr<const PinningLandscape> landscape_;
    MeanFieldOptions options_;
    ScalarField h_;
    VectorField gradh_;
    ScalarField a_;
    VectorField force_;
    bool unit_weight_;
};

/// Evolved fields of one variant; unused fields stay zero
struct MeanFieldState {
    std::shared_ptr<const MeanFieldModel> model;
    ScalarField m;
    ScalarField d;
    VectorField v;
    double time = 0.0;

    const Grid2D& grid() const { return model->grid(); }
    MeanFieldVariant variant() const { return model->variant(); }
};

/// Builds a state for m-evolving variants (d defaults to zero)
MeanFieldState make_state(std::shared_ptr<const MeanFieldModel> model, ScalarField m,
                          std::optional<ScalarField> d = std::nullopt);
/// Builds a degenerate-variant state from its velocity field
MeanFieldState make_velocity_state(std::shared_ptr<const MeanFieldModel> model, VectorField v);

/// Time derivative of a state, matching its layout
struct MeanFieldRate {
    ScalarField dm;
    ScalarField dd;
    VectorField dv;
};

/// v = a^{-1} grad^perp (div a^{-1} grad)^{-1} m + grad (div a grad)^{-1} d
///
/// Periodic mode subtracts the means of m and d. Free-space mode requires a == 1.
VectorField reconstruct_velocity(const ScalarField& m, const ScalarField& d, const ScalarField& a, PoissonMode mode,
                                 const FreespaceOptions& fs = {});

/// The velocity field of a state (reconstructed, or carried for the degenerate variant)
VectorField velocity_of(const MeanFieldState& s);

/// Pointwise transport field -(alpha I - beta J)(gradh - F + coef v^perp)
Vec2 dissipative_transport(double alpha, double beta, Vec2 gradh, Vec2 force, Vec2 v, double coef);

/// Transport field u of dm/dt = -div(u m) for the m-evolving variants
VectorField transport_velocity(const MeanFieldState& s, const VectorField& v);

/// Right-hand side without viscosity
MeanFieldRate mean_field_rhs(const MeanFieldState& s);

/// Adds T Lap to every evolved field's rate
MeanFieldRate add_viscosity(MeanFieldRate rate, const MeanFieldState& s, double T);

/// Largest step allowed by the advective and diffusive bounds
double max_stable_dt(const MeanFieldState& s);

/// Summary of a time_step call
struct StepReport {
    long steps = 0;
    double min_m = 0.0;
    double mass_initial = 0.0;
    double mass_final = 0.0;
    long positivity_events = 0;
};

/// Advances from s.time to t_end with steps of dt (the last one shortened)
///
/// Viscosity T = params.temperature is included. Throws NumericalError on a
/// stability-bound violation (unless options.adaptive) or on non-finite values.
MeanFieldState time_step(const MeanFieldState& s, double dt, TimeScheme scheme, double t_end,
                         StepReport* report = nullptr);

/// Diagnostic pressure of the constrained variants (incompressible and lake)
ScalarField pressure_of(const MeanFieldState& s);

/// Integral of a |v|^2, conserved by the lake flow without forcing
double lake_energy(const MeanFieldState& s);

/// Integral of m (or of curl v for the degenerate variant)
double total_mass(const MeanFieldState& s);

/// Upwind finite-volume -div(u m) on the periodic grid
ScalarField upwind_divergence(const VectorField& u, const ScalarField& m);

} // namespace pinflow
