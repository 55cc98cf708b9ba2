#pragma once

/// @file homog.hpp
/// @brief Cell problems on the unit torus: invariant measures, homogenized velocities,
/// depinning and Arrhenius scans, velocity tables and the homogenized transport equation

#include "pinflow/grid.hpp"
#include "pinflow/params.hpp"
#include "pinflow/pinning.hpp"
#include "pinflow/vec2.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pinflow {

/// Cell drift Gamma(y) = (alpha I - beta J)(grad h0(y) - F); the lifted flow is y' = -Gamma(y)
Vec2 cell_drift(const PinningLandscape& land, double alpha, double beta, Vec2 force, Vec2 y, Vec2 x_slow = {});

/// Unit-cell grid with nodes at (i/n, j/n)
Grid2D cell_grid(int n);

// ---------------------------------------------------------------------------
// Viscous invariant measure

/// Stationary density of T Lap mu + div(Gamma mu) = 0 on the unit cell
struct InvariantMeasure {
    ScalarField density;
    double temperature = 0.0;
    double alpha = 1.0, beta = 0.0;
    Vec2 force{};
    /// Discrete L2 norm of the stationary operator applied to the density
    double residual = 0.0;
    /// Mean probability current, equal to -int Gamma dmu
    Vec2 current{};
    int iterations = 0;
};

struct InvariantMeasureOptions {
    int resolution = 128;
    double tolerance = 1e-8;
    int max_iterations = 60;
    /// Gauss-Legendre nodes per edge for the exponential-fitting integrals
    int edge_quadrature = 8;
    Vec2 x_slow{};
};

/// Solves for the viscous invariant measure with exponential-fitting finite volumes
/// and inverse power iteration; throws NumericalError on stagnation
InvariantMeasure viscous_invariant_measure(const PinningLandscape& land, double alpha, double beta, Vec2 force,
                                           double temperature, const InvariantMeasureOptions& opt = {});

/// V_T(F) = -int Gamma dmu_T
Vec2 cell_velocity_viscous(const PinningLandscape& land, double alpha, double beta, Vec2 force, double temperature,
                           const InvariantMeasureOptions& opt = {});

// ---------------------------------------------------------------------------
// Zero-temperature velocity

struct DeterministicOptions {
    double dt = 0.01;
    double horizon = 200.0;
    /// Number of horizon doublings before giving up
    int max_doublings = 6;
    double pinned_speed = 1e-10;
    double relative_tolerance = 1e-7;
    /// Start point; defaults to the minimum of h0 on a coarse sample
    std::optional<Vec2> start;
    Vec2 x_slow{};
};

struct DeterministicVelocity {
    Vec2 velocity{};
    bool pinned = false;
    /// Horizon at which the estimate converged
    double horizon = 0.0;
    /// Difference between the last two horizon estimates
    double uncertainty = 0.0;
};

/// Long-horizon mean velocity of the lifted flow y' = -Gamma(y), using a smooth-window
/// weighted average; returns exactly zero when the trajectory settles on a fixed point
DeterministicVelocity cell_velocity_deterministic_report(const PinningLandscape& land, double alpha, double beta,
                                                         Vec2 force, const DeterministicOptions& opt = {});

Vec2 cell_velocity_deterministic(const PinningLandscape& land, double alpha, double beta, Vec2 force,
                                 const DeterministicOptions& opt = {});

/// Classifies the lifted flow as sliding (escaped three cells) or pinned (fixed point reached or
/// bounded over the full horizon)
bool is_pinned(const PinningLandscape& land, double alpha, double beta, Vec2 force, const DeterministicOptions& opt = {});

// ---------------------------------------------------------------------------
// Depinning

struct DepinningOptions {
    double f_max = 4.0;
    double threshold_tolerance = 1e-6;
    int samples = 12;
    /// Fit range in units of F_c: |F| - F_c from delta_min to delta_max times F_c
    double delta_min = 1e-3;
    double delta_max = 0.5;
    DeterministicOptions flow{};
};

struct DepinningReport {
    Vec2 direction{};
    double critical_force = 0.0;
    double exponent = 0.0;
    double fit_min = 0.0, fit_max = 0.0;
    std::vector<double> force_magnitude;
    std::vector<double> velocity_magnitude;
};

/// Threshold by bisection on pinned/sliding, then a log-log fit of |V| versus |F| - F_c
DepinningReport depinning_scan(const PinningLandscape& land, double alpha, double beta, Vec2 direction,
                               const DepinningOptions& opt = {});

/// Threshold only
double critical_force(const PinningLandscape& land, double alpha, double beta, Vec2 direction,
                      const DepinningOptions& opt = {});

// ---------------------------------------------------------------------------
// Arrhenius scan

struct ArrheniusReport {
    std::vector<double> temperatures;
    std::vector<Vec2> velocities;
    /// Least-squares slope of log(|V| T / |F|) versus 1/T
    double slope = 0.0;
    double intercept = 0.0;
    /// Prediction -osc h0
    double predicted_slope = 0.0;
    double relative_gap = 0.0;
    double osc = 0.0;
    std::vector<std::string> warnings;
};

/// Requires |F| <= 0.1 min(T); samples below the numerical floor are excluded with a warning
ArrheniusReport arrhenius_scan(const PinningLandscape& land, double alpha, double beta, Vec2 force,
                               const std::vector<double>& temperatures, const InvariantMeasureOptions& opt = {});

// ---------------------------------------------------------------------------
// Velocity tables

struct VelocityTableOptions {
    int directions = 24;
    int radii = 32;
    double f_max = 4.0;
    /// Zero temperature selects the lifted-flow velocity
    double temperature = 0.0;
    /// Place a radial node on the depinning threshold of each direction (zero temperature only)
    bool threshold_nodes = true;
    InvariantMeasureOptions measure{};
    DeterministicOptions flow{};
    DepinningOptions depinning{};
};

/// Sampled map F -> V(F) on a polar grid, interpolated piecewise linearly on the triangulated grid
class VelocityTable {
public:
    VelocityTable() = default;
    VelocityTable(int directions, std::vector<std::vector<double>> radii, std::vector<std::vector<Vec2>> values,
                  double temperature);

    /// Builds the table by sampling each node independently
    static VelocityTable build(const PinningLandscape& land, double alpha, double beta,
                               const VelocityTableOptions& opt = {});
    /// Exact table of the free flow V = (alpha I - beta J) F
    static VelocityTable free_flow(double alpha, double beta, int directions = 24, int radii = 32, double f_max = 4.0);

    /// Interpolated velocity; throws NumericalError outside the sampled range
    Vec2 operator()(Vec2 force) const;

    int directions() const { return directions_; }
    double temperature() const { return temperature_; }
    /// Largest force magnitude covered in every direction
    double max_force() const;
    Vec2 node_force(int direction, int radius) const;
    Vec2 node_velocity(int direction, int radius) const { return values_[direction][radius]; }
    int radii() const { return static_cast<int>(radii_.front().size()); }

    /// CSV with header Fx,Fy,Vx,Vy,T0
    void write_csv(const std::string& path) const;

private:
    int directions_ = 0;
    std::vector<std::vector<double>> radii_;
    std::vector<std::vector<Vec2>> values_;
    double temperature_ = 0.0;
};

// ---------------------------------------------------------------------------
// Homogenized transport

/// v = grad^perp Lap^-1 m (periodic, mean-free) and W(x) = V(F - 2 v^perp(x))
VectorField homogenized_transport(const ScalarField& m, const VelocityTable& table, Vec2 force);

/// -div(W m) with first-order upwind fluxes
ScalarField homogenized_rhs(const ScalarField& m, const VelocityTable& table, Vec2 force);

struct HomogenizedRun {
    ScalarField m;
    /// Time average of int W dm
    Vec2 mean_velocity{};
    long steps = 0;
};

/// SSP-RK3 integration of the homogenized equation with a CFL-limited step
HomogenizedRun evolve_homogenized(const ScalarField& m0, const VelocityTable& table, Vec2 force, double t_end,
                                  double cfl = 0.4);

// ---------------------------------------------------------------------------
// Initial-layer cell dynamics

/// Frozen slow variables of one cell
struct CellLayerConfig {
    double alpha = 1.0, beta = 0.0;
    double kappa = 0.0;
    Vec2 force{};
    Vec2 v_slow{};
    Vec2 x_slow{};
};

/// Gamma(y) = (alpha I - beta J)(grad^perp h0 - F^perp - 2 kappa v)
Vec2 cell_layer_gamma(const PinningLandscape& land, const CellLayerConfig& cfg, Vec2 y);
/// Transport field Gamma^perp of the cell-layer continuity equation
Vec2 cell_layer_drift(const PinningLandscape& land, const CellLayerConfig& cfg, Vec2 y);
VectorField cell_layer_drift_field(const Grid2D& g, const PinningLandscape& land, const CellLayerConfig& cfg);

/// Largest stable upwind step for the given drift field
double cell_layer_stable_dt(const VectorField& drift, double cfl = 0.4);

struct CellLayerReport {
    long steps = 0;
    double mass_initial = 0.0;
    double mass_final = 0.0;
};

/// Advances d m/dt = -div(Gamma^perp m) on the cell grid with upwind fluxes and SSP-RK3;
/// throws NumericalError when dt exceeds the CFL bound
ScalarField cell_layer_step(const ScalarField& m0, const PinningLandscape& land, const CellLayerConfig& cfg,
                            double dt, double t_end, CellLayerReport* report = nullptr);

/// Local minima of h0 on the grid refined by Newton iteration
std::vector<Vec2> cell_wells(const PinningLandscape& land, int n = 128, Vec2 x_slow = {});

/// Mass of m within distance r of any point of the set (torus distance)
double mass_near(const ScalarField& m, const std::vector<Vec2>& points, double r);

/// Torus distance on the unit cell
double torus_distance(Vec2 a, Vec2 b);

} // namespace pinflow
