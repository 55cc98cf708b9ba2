#pragma once

/// @file params.hpp
/// @brief Flow parameters and regime bookkeeping

#include "pinflow/vec2.hpp"

#include <functional>
#include <optional>
#include <string>

namespace pinflow {

/// Scaling regimes of the vortex-density limits
enum class Regime { GL1, GL2, GL3, GL1p, GL2p, GP };

std::string to_string(Regime r);
/// Parses "GL1", "GL2", "GL3", "GL1'", "GL2'", "GP" (primes may be written as "p")
Regime parse_regime(const std::string& s);

/// Applied force: a constant vector plus an optional spatially varying part
struct AppliedForce {
    Vec2 constant{};
    std::function<Vec2(Vec2)> field;

    Vec2 operator()(Vec2 x) const { return field ? constant + field(x) : constant; }
    bool is_constant() const { return !field; }
};

/// Mixed-flow parameters shared by particles, mean-field and cell problems
struct Params {
    double alpha = 1.0;
    double beta = 0.0;
    /// Interaction strength multiplying the 2 v^perp self-interaction term
    double lambda = 1.0;
    /// Cell-layer coupling to the slow velocity
    double kappa = 0.0;
    double temperature = 0.0;
    AppliedForce force;
    std::optional<Regime> regime;

    /// alpha = cos(theta), beta = sin(theta) style constructor
    static Params mixed(double alpha, double beta);

    /// Checks alpha >= 0, alpha^2 + beta^2 = 1, T >= 0 and kappa versus regime; throws ConfigError
    void validate() const;
};

/// Regime constant kappa: 1 (GL1), lambda (GL2), 0 (GL1', GL2'); empty when unspecified
std::optional<double> regime_kappa(Regime r, double lambda);

} // namespace pinflow
