#pragma once

/// @file particles.hpp
/// @brief Discrete N-vortex mixed-flow dynamics with optional thermal noise
///
/// Vortex i moves with
///   dx_i/dt = (alpha I - beta J)( (1/N) sum_j (x_i - x_j)/|x_i - x_j|^2 - grad h(x_i) + F(x_i) )
/// plus sqrt(2T) dB_i in the Langevin variant.

#include "pinflow/params.hpp"
#include "pinflow/pinning.hpp"
#include "pinflow/vec2.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace pinflow {

/// Plummer softening radius for the pair kernel
inline constexpr double r_soft = 1e-6;

/// N planar vortices of degree +1 with their flow parameters
struct VortexEnsemble {
    std::vector<Vec2> positions;
    Params params;
    /// Pinning landscape; null means h = 0
    std::shared_ptr<const PinningLandscape> landscape;
    /// Noise key; draws depend only on (seed, particle, step)
    std::uint64_t seed = 0;
    std::uint64_t step_index = 0;
    double time = 0.0;

    std::size_t size() const { return positions.size(); }
    /// Checks finiteness and parameter invariants; throws ConfigError
    void validate() const;
};

/// Closest pair found during a force evaluation
struct CollisionReport {
    bool collided = false;
    std::size_t i = 0, j = 0;
    double distance = 0.0;
};

/// (1/N) sum_{j != i} (x_i - x_j) / (|x_i - x_j|^2 + r_soft^2)
Vec2 interaction_force(const VortexEnsemble& ens, std::size_t i);

/// All interaction forces; per-particle sums run in fixed j order, so results
/// do not depend on the worker count. Fills report when a pair is closer than r_soft.
std::vector<Vec2> interaction_forces(const VortexEnsemble& ens, CollisionReport* report = nullptr);

/// Full right-hand side (alpha I - beta J)(interaction - grad h + F); throws NearCollision
std::vector<Vec2> drift(const VortexEnsemble& ens);

double min_pair_distance(const std::vector<Vec2>& x);

/// Largest admissible deterministic step, 0.1 * N * d_min^2 (infinite for N < 2)
double stability_bound(const VortexEnsemble& ens);

enum class StepScheme { euler, rk4 };

/// One explicit step; throws NumericalError when dt exceeds stability_bound
VortexEnsemble step_deterministic(const VortexEnsemble& ens, double dt, StepScheme scheme);

/// One Euler-Maruyama step with rotated Gaussian increments of covariance 2 T dt I
VortexEnsemble step_langevin(const VortexEnsemble& ens, double dt);

/// The rotated noise increment applied to particle i by step_langevin
Vec2 langevin_increment(const VortexEnsemble& ens, std::size_t i, double dt);

/// -sum_{i != j} log|x_i - x_j| over ordered pairs
double interaction_energy(const std::vector<Vec2>& x);

/// (1/N) W_N + 2 sum_i h(x_i), non-increasing along the parabolic flow
double parabolic_energy(const VortexEnsemble& ens);

/// Recorded samples of a run
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> snapshots;
    /// W_N / N^2 at each sample
    std::vector<double> energy;
    std::vector<Vec2> center_of_mass;
    /// (1/N) sum |x_i(t) - x_i(0)|
    std::vector<double> mean_displacement;
};

struct SimulationOptions {
    StepScheme scheme = StepScheme::rk4;
    /// Use step_langevin instead of deterministic steps
    bool stochastic = false;
    /// Split deterministic steps that exceed the stability bound
    bool auto_substep = true;
};

/// Advances ens to t_end, recording every record_every steps and at the end
///
/// Step errors are rethrown with the failure time attached. When final_state is
/// non-null it receives the ensemble at t_end.
Trajectory simulate(const VortexEnsemble& ens, double t_end, double dt, int record_every,
                    const SimulationOptions& opt = {}, VortexEnsemble* final_state = nullptr);

// ---------------------------------------------------------------- initial conditions and I/O

enum class BlobSampler { gaussian, sunflower };

/// Gaussian blob of standard deviation radius (times aspect along y)
struct BlobSpec {
    Vec2 center{};
    double radius = 0.1;
    std::size_t count = 1;
    std::uint64_t seed = 0;
    BlobSampler sampler = BlobSampler::gaussian;
    double aspect = 1.0;
};

/// Draws the blob positions; the sunflower sampler is a deterministic
/// low-discrepancy spiral through the radial quantiles with a seeded rotation
std::vector<Vec2> sample_blob(const BlobSpec& spec);

/// Parses {"kind":"points","points":[[x,y],...]} or {"kind":"blob",...}
std::vector<Vec2> initial_positions_from_json(const std::string& text);

/// CSV rows t,i,x,y
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// CSV rows t,energy,cx,cy,mean_displacement
void write_diagnostics_csv(std::ostream& os, const Trajectory& traj);

/// Binary snapshot: magic "PSNP1", N (uint64), t (float64), then x,y pairs (float64), little-endian
void write_snapshot_binary(std::ostream& os, double t, const std::vector<Vec2>& x);
std::vector<Vec2> read_snapshot_binary(std::istream& is, double* t = nullptr);

} // namespace pinflow
