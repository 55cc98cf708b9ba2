#pragma once

/// @file experiments.hpp
/// @brief Cross-scale experiments: particle versus mean-field convergence, current-velocity
/// curves, initial-layer runs and modulated-energy sweeps, with CSV, SVG and manifest output

#include "pinflow/glfield.hpp"
#include "pinflow/homog.hpp"
#include "pinflow/meanfield.hpp"
#include "pinflow/params.hpp"
#include "pinflow/particles.hpp"
#include "pinflow/pinning.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace pinflow {

/// Metric values sampled along one sweep axis
struct MetricSeries {
    std::string axis_name;
    std::string metric_name;
    std::vector<double> axis;
    std::vector<double> values;
    /// Target the experiment checks the series against (meaning depends on the experiment)
    double tolerance = 0.0;

    /// Checks equal lengths and finite entries; throws NumericalError
    void validate() const;
};

// ---------------------------------------------------------------------------
// Particle versus mean-field convergence

struct ConvergenceSpec {
    /// IncompressibleDissipative or ConservativeLake
    MeanFieldVariant variant = MeanFieldVariant::IncompressibleDissipative;
    /// Shared flow parameters; the particle pair sum matches the mean-field equation with lambda = pi
    Params params = [] {
        Params p;
        p.lambda = std::numbers::pi;
        return p;
    }();
    std::shared_ptr<const PinningLandscape> landscape;
    std::vector<std::size_t> counts{256, 1024, 4096};
    /// Blob shape; count is replaced by each entry of counts
    BlobSpec blob{{0.0, 0.0}, 0.4, 1, 0, BlobSampler::sunflower, 0.6};
    /// Free-space PDE box [-L/2, L/2]^2 with n^2 nodes
    int grid_n = 384;
    double box = 6.0;
    /// Largest admissible PDE density in the free-space margin, relative to its maximum
    double margin_tolerance = 1e-6;
    /// Recording times; the last one is the final time
    std::vector<double> checkpoints{0.1, 0.2, 0.3, 0.4, 0.5};
    double particle_dt = 0.01;
    /// Deposit bandwidth bw0 (N / counts[0])^(-bandwidth_exponent)
    double bandwidth = 0.2;
    double bandwidth_exponent = 0.5;
    /// Required ratio between consecutive final distances
    double min_ratio = 1.5;

    /// Throws ConfigError on an inconsistent specification
    void validate() const;
    double bandwidth_for(std::size_t n) const;
};

struct ConvergenceRow {
    std::size_t n = 0;
    double t = 0.0;
    /// H^-1 surrogate distance between the deposited particles and the PDE solution
    double distance = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    /// Final-time distance against N
    MetricSeries final_distance;
    /// d(N_k) / d(N_{k+1}) for consecutive counts
    std::vector<double> ratios;
    bool pass = false;
    /// Sub-runs that failed, with their error messages
    std::vector<std::string> failures;
};

/// For each N: sample the blob, deposit, evolve the particles and the matching PDE from the
/// deposit, and record the H^-1 distance at every checkpoint. Failed sub-runs are recorded and
/// the remaining ones still run.
ConvergenceResult run_convergence(const ConvergenceSpec& spec);

/// CSV with header N,t,distance
void write_convergence_csv(std::ostream& os, const ConvergenceResult& r);

/// One particle against a point-like PDE blob under constant force without pinning
struct TrackingResult {
    Vec2 particle{};
    Vec2 centroid{};
    double gap = 0.0;
    double bandwidth = 0.0;
};

/// Single-particle tracking with the grid, bandwidth and flow of the given settings (counts and checkpoints ignored), run to t_end
TrackingResult run_single_tracking(const ConvergenceSpec& spec, double t_end);

// ---------------------------------------------------------------------------
// Current-velocity curves

struct CurveSpec {
    std::shared_ptr<const PinningLandscape> landscape;
    double alpha = 1.0, beta = 0.0;
    Vec2 direction{1.0, 0.0};
    /// Force magnitudes, non-negative and increasing
    std::vector<double> forces;
    /// Zero selects the stick-slip curve, positive values the viscous one
    double temperature = 0.0;
    InvariantMeasureOptions measure{};
    DepinningOptions depinning{};

    void validate() const;
};

struct CurveResult {
    /// |F| against |V|
    MetricSeries curve;
    std::vector<Vec2> velocities;
    /// Threshold of the stick-slip curve (absent for positive temperature)
    std::optional<double> critical_force;
};

/// Samples are independent and run across the worker pool; stick-slip values at or below the
/// reported threshold are exactly zero
CurveResult current_velocity_curve(const CurveSpec& spec);

/// CSV with header F,Fx,Fy,Vx,Vy,V
void write_curve_csv(std::ostream& os, const CurveResult& r, Vec2 direction);

/// Minimal SVG line plot with axes and tick labels
void write_svg_polyline(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title, const std::string& xlabel, const std::string& ylabel);

// ---------------------------------------------------------------------------
// Initial layer

struct LayerSpec {
    std::shared_ptr<const PinningLandscape> landscape;
    CellLayerConfig cell;
    int resolution = 128;
    std::vector<double> checkpoints{5.0, 10.0, 20.0};
    double well_radius = 0.05;
    double cfl = 0.4;

    void validate() const;
};

struct LayerResult {
    std::vector<Vec2> wells;
    /// Time against mass within well_radius of the wells (uniform start, unit mass)
    MetricSeries concentration;
    long steps = 0;
    double mass_drift = 0.0;
};

LayerResult run_layer(const LayerSpec& spec);

// ---------------------------------------------------------------------------
// Modulated-energy sweep

struct GlSweepSpec {
    std::shared_ptr<const PinningLandscape> landscape;
    std::vector<double> epsilons{1e-2, 3e-3, 1e-3};
    /// Vortex degrees and centers; the grid spans [-half_width, half_width]^2 with spacing eps / 4
    std::vector<Vec2> centers{{0.0, 0.0}};
    std::vector<int> degrees{1};
    VortexProfile profile = VortexProfile::tanh;
    double half_width = 0.11;
    double R = 0.05;
    Vec2 z{};

    void validate() const;
};

struct GlSweepResult {
    /// |log eps| against E
    MetricSeries energy;
    std::vector<double> excess;
    std::vector<double> jacobian;
    /// Least-squares slope of E against |log eps|
    double slope = 0.0;
};

GlSweepResult run_glsweep(const GlSweepSpec& spec);

// ---------------------------------------------------------------------------
// Manifests

/// 64-bit FNV-1a hash, hex-encoded
std::string config_hash(const std::string& text);

/// Library, FFTW and Eigen version strings
std::string version_string();

/// Writes manifest.json into dir with the config hash, versions, seeds, worker count and wall-clock
void write_manifest(const std::string& dir, const std::string& kind, const std::string& config_text,
                    const std::vector<std::uint64_t>& seeds, double wall_seconds, const std::string& extra_json = "{}");

/// Least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace pinflow
