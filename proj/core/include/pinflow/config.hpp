#pragma once

/// @file config.hpp
/// @brief JSON run configurations for the command-line entry point and the experiment drivers

#include "pinflow/experiments.hpp"
#include "pinflow/homog.hpp"
#include "pinflow/meanfield.hpp"
#include "pinflow/particles.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pinflow {

enum class ExperimentKind { converge, stickslip, arrhenius, layer, glsweep, single_run };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

/// Reads a file and checks JSON syntax; throws ConfigError with "line L, column C" on malformed input
std::string load_config_text(const std::string& path);

/// Throws ConfigError naming the line and column of the first syntax error
void check_json_syntax(const std::string& text, const std::string& source = "config");

/// Returns text with the top-level "seed" member replaced
std::string override_seed(const std::string& text, std::uint64_t seed);

/// Particle simulation run
struct ParticleRunConfig {
    VortexEnsemble ensemble;
    double t_end = 1.0;
    double dt = 0.01;
    int record_every = 10;
    SimulationOptions options;
};

/// Mean-field run from a Gaussian blob or a deposited particle sample
struct MeanFieldRunConfig {
    std::shared_ptr<const MeanFieldModel> model;
    ScalarField m0{Grid2D(8, 8, 1.0, 1.0)};
    double t_end = 1.0;
    double dt = 0.01;
    TimeScheme scheme = TimeScheme::ssprk3;
    /// Diagnostic rows are written at this many equally spaced times
    int records = 10;
    std::uint64_t seed = 0;
};

enum class HomogMode { measure, velocity, depinning, arrhenius, table };

/// Cell-problem run
struct HomogRunConfig {
    HomogMode mode = HomogMode::velocity;
    std::shared_ptr<const PinningLandscape> landscape;
    double alpha = 1.0, beta = 0.0;
    Vec2 force{};
    double temperature = 0.0;
    Vec2 direction{1.0, 0.0};
    std::vector<double> temperatures;
    InvariantMeasureOptions measure{};
    DeterministicOptions flow{};
    DepinningOptions depinning{};
    VelocityTableOptions table{};
};

/// Experiment description: kind, seeds and the parsed driver specification
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::single_run;
    std::vector<std::uint64_t> seeds;
    std::optional<ConvergenceSpec> convergence;
    std::optional<CurveSpec> curve;
    std::optional<LayerSpec> layer;
    std::optional<GlSweepSpec> glsweep;

    /// Checks that the sub-specification for kind is present and valid
    void validate() const;
};

Params params_from_json_text(const std::string& text);
ParticleRunConfig particle_run_from_json(const std::string& text);
MeanFieldRunConfig meanfield_run_from_json(const std::string& text);
HomogRunConfig homog_run_from_json(const std::string& text);
ConvergenceSpec convergence_from_json(const std::string& text);
CurveSpec curve_from_json(const std::string& text);
LayerSpec layer_from_json(const std::string& text);
GlSweepSpec glsweep_from_json(const std::string& text);

/// Parses any experiment config; the kind comes from the "experiment" member
ExperimentSpec experiment_from_json(const std::string& text);

} // namespace pinflow
