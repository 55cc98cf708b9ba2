#include "pinflow/cli.hpp"

#include "pinflow/config.hpp"
#include "pinflow/error.hpp"
#include "pinflow/experiments.hpp"
#include "pinflow/field_io.hpp"
#include "pinflow/homog.hpp"
#include "pinflow/parallel.hpp"
#include "pinflow/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace pinflow {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr std::array<const char*, 7> subcommands{"particles", "meanfield", "homog", "glfield",
                                                  "converge",  "curve",     "layer"};

struct RunContext {
    std::string command;
    std::string text;
    fs::path out;
    bool verbose = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    void log(const std::string& msg) const {
        if (verbose) std::cerr << "[" << command << "] " << msg << '\n';
    }
};

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << std::setprecision(17);
    return f;
}

std::uint64_t seed_of(const std::string& text) {
    const json j = json::parse(text);
    return j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
}

void manifest(const RunContext& ctx, const std::string& kind, const json& results) {
    write_manifest(ctx.out.string(), kind, ctx.text, {seed_of(ctx.text)}, ctx.elapsed(), results.dump());
}

json vec(Vec2 v) { return json::array({v.x, v.y}); }

int run_particles(const RunContext& ctx) {
    const ParticleRunConfig c = particle_run_from_json(ctx.text);
    ctx.log("simulating " + std::to_string(c.ensemble.size()) + " particles to t = " + std::to_string(c.t_end));
    VortexEnsemble final_state;
    const Trajectory tr = simulate(c.ensemble, c.t_end, c.dt, c.record_every, c.options, &final_state);
    {
        auto f = open_out(ctx.out / "trajectory.csv");
        write_trajectory_csv(f, tr);
    }
    {
        auto f = open_out(ctx.out / "diagnostics.csv");
        write_diagnostics_csv(f, tr);
    }
    {
        auto f = open_out(ctx.out / "final.psnp");
        write_snapshot_binary(f, final_state.time, final_state.positions);
    }
    manifest(ctx, "single-run/particles",
             {{"particles", c.ensemble.size()}, {"final_time", final_state.time}, {"samples", tr.times.size()}});
    return exit_ok;
}

int run_meanfield(const RunContext& ctx) {
    const MeanFieldRunConfig c = meanfield_run_from_json(ctx.text);
    const MeanFieldModel& md = *c.model;
    MeanFieldState s = md.variant() == MeanFieldVariant::DegenerateParabolic
                           ? make_velocity_state(c.model, reconstruct_velocity(c.m0, ScalarField(md.grid()), md.a(),
                                                                               md.options().poisson,
                                                                               md.options().freespace))
                           : make_state(c.model, c.m0);
    auto f = open_out(ctx.out / "diagnostics.csv");
    f << "t,mass,min_m,max_m,lake_energy,steps,positivity_events\n";
    auto row = [&](const StepReport& r) {
        const ScalarField m = md.variant() == MeanFieldVariant::DegenerateParabolic ? curl(s.v) : s.m;
        f << s.time << ',' << total_mass(s) << ',' << m.min() << ',' << m.max() << ',' << lake_energy(s) << ','
          << r.steps << ',' << r.positivity_events << '\n';
    };
    row({});
    long steps = 0;
    for (int k = 1; k <= c.records; ++k) {
        StepReport rep;
        s = time_step(s, c.dt, c.scheme, c.t_end * k / c.records, &rep);
        steps += rep.steps;
        row(rep);
        ctx.log("t = " + std::to_string(s.time));
    }
    if (md.variant() == MeanFieldVariant::DegenerateParabolic) save_binary((ctx.out / "final_v.pfld").string(), s.v);
    else save_binary((ctx.out / "final_m.pfld").string(), s.m);
    manifest(ctx, "single-run/meanfield",
             {{"variant", to_string(md.variant())}, {"steps", steps}, {"final_time", s.time}});
    return exit_ok;
}

int run_homog(const RunContext& ctx) {
    const HomogRunConfig c = homog_run_from_json(ctx.text);
    const PinningLandscape& land = *c.landscape;
    json res;
    switch (c.mode) {
    case HomogMode::measure: {
        const InvariantMeasure m = viscous_invariant_measure(land, c.alpha, c.beta, c.force, c.temperature, c.measure);
        save_binary((ctx.out / "measure.pfld").string(), m.density);
        res = {{"velocity", vec(m.current)}, {"residual", m.residual}, {"iterations", m.iterations}};
        break;
    }
    case HomogMode::velocity: {
        const Vec2 v = c.temperature > 0.0
                           ? cell_velocity_viscous(land, c.alpha, c.beta, c.force, c.temperature, c.measure)
                           : cell_velocity_deterministic(land, c.alpha, c.beta, c.force, c.flow);
        auto f = open_out(ctx.out / "velocity.csv");
        f << "Fx,Fy,T0,Vx,Vy\n" << c.force.x << ',' << c.force.y << ',' << c.temperature << ',' << v.x << ',' << v.y << '\n';
        res = {{"velocity", vec(v)}};
        break;
    }
    case HomogMode::depinning: {
        const DepinningReport r = depinning_scan(land, c.alpha, c.beta, c.direction, c.depinning);
        auto f = open_out(ctx.out / "depinning.csv");
        f << "F,V\n";
        for (std::size_t k = 0; k < r.force_magnitude.size(); ++k)
            f << r.force_magnitude[k] << ',' << r.velocity_magnitude[k] << '\n';
        res = {{"critical_force", r.critical_force}, {"exponent", r.exponent}};
        break;
    }
    case HomogMode::arrhenius: {
        const ArrheniusReport r = arrhenius_scan(land, c.alpha, c.beta, c.force, c.temperatures, c.measure);
        auto f = open_out(ctx.out / "arrhenius.csv");
        f << "T0,Vx,Vy\n";
        for (std::size_t k = 0; k < r.temperatures.size(); ++k)
            f << r.temperatures[k] << ',' << r.velocities[k].x << ',' << r.velocities[k].y << '\n';
        res = {{"slope", r.slope},
               {"predicted_slope", r.predicted_slope},
               {"relative_gap", r.relative_gap},
               {"warnings", r.warnings}};
        break;
    }
    case HomogMode::table: {
        const VelocityTable t = VelocityTable::build(land, c.alpha, c.beta, c.table);
        t.write_csv((ctx.out / "table.csv").string());
        res = {{"directions", t.directions()}, {"radii", t.radii()}, {"max_force", t.max_force()}};
        break;
    }
    }
    manifest(ctx, "homog", res);
    return exit_ok;
}

int run_glfield(const RunContext& ctx) {
    const GlSweepSpec s = glsweep_from_json(ctx.text);
    const GlSweepResult r = run_glsweep(s);
    auto f = open_out(ctx.out / "glsweep.csv");
    f << "epsilon,abs_log_epsilon,E,D,vorticity_in_disk\n";
    for (std::size_t k = 0; k < s.epsilons.size(); ++k)
        f << s.epsilons[k] << ',' << r.energy.axis[k] << ',' << r.energy.values[k] << ',' << r.excess[k] << ','
          << r.jacobian[k] << '\n';
    manifest(ctx, "glsweep", {{"energy_slope", r.slope}});
    return exit_ok;
}

int run_converge(const RunContext& ctx) {
    const ConvergenceSpec s = convergence_from_json(ctx.text);
    ctx.log("running " + std::to_string(s.counts.size()) + " particle counts");
    const ConvergenceResult r = run_convergence(s);
    {
        auto f = open_out(ctx.out / "convergence.csv");
        write_convergence_csv(f, r);
    }
    manifest(ctx, "converge",
             {{"metric", "H^-1 surrogate distance (periodic, mean-subtracted)"},
              {"variant", to_string(s.variant)},
              {"ratios", r.ratios},
              {"min_ratio", s.min_ratio},
              {"pass", r.pass},
              {"failures", r.failures}});
    for (const auto& e : r.failures) std::cerr << "sub-run failed: " << e << '\n';
    if (r.final_distance.values.empty()) throw NumericalError("every convergence sub-run failed");
    return exit_ok;
}

int run_curve(const RunContext& ctx) {
    const CurveSpec s = curve_from_json(ctx.text);
    const CurveResult r = current_velocity_curve(s);
    {
        auto f = open_out(ctx.out / "curve.csv");
        write_curve_csv(f, r, s.direction);
    }
    {
        auto f = open_out(ctx.out / "curve.svg");
        write_svg_polyline(f, r.curve.axis, r.curve.values,
                           s.temperature > 0.0 ? "current-velocity curve, T0 = " + std::to_string(s.temperature)
                                               : "current-velocity curve, T0 = 0",
                           "|F|", "|V|");
    }
    json res = {{"temperature", s.temperature}};
    if (r.critical_force) res["critical_force"] = *r.critical_force;
    manifest(ctx, s.temperature > 0.0 ? "arrhenius" : "stickslip", res);
    return exit_ok;
}

int run_layer(const RunContext& ctx) {
    const LayerSpec s = layer_from_json(ctx.text);
    const LayerResult r = pinflow::run_layer(s);
    auto f = open_out(ctx.out / "layer.csv");
    f << "t,mass_near_wells\n";
    for (std::size_t k = 0; k < r.concentration.axis.size(); ++k)
        f << r.concentration.axis[k] << ',' << r.concentration.values[k] << '\n';
    json wells = json::array();
    for (Vec2 w : r.wells) wells.push_back(vec(w));
    manifest(ctx, "layer", {{"wells", wells}, {"steps", r.steps}, {"mass_drift", r.mass_drift}});
    return exit_ok;
}

int dispatch(const RunContext& ctx) {
    if (ctx.command == "particles") return run_particles(ctx);
    if (ctx.command == "meanfield") return run_meanfield(ctx);
    if (ctx.command == "homog") return run_homog(ctx);
    if (ctx.command == "glfield") return run_glfield(ctx);
    if (ctx.command == "converge") return run_converge(ctx);
    if (ctx.command == "curve") return run_curve(ctx);
    return run_layer(ctx);
}

void write_failure(const RunContext& ctx, const std::string& kind, const std::string& message, double time,
                   long step) {
    json j = {{"status", "failed"}, {"kind", kind}, {"subcommand", ctx.command}, {"message", message}};
    if (time >= 0.0) j["time"] = time;
    if (step >= 0) j["step"] = step;
    try {
        fs::create_directories(ctx.out);
        std::ofstream f(ctx.out / "failure.json");
        f << j.dump(2) << '\n';
    } catch (const std::exception&) {
    }
    std::cerr << j.dump() << '\n';
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"pinflow: vortex pinning, mean-field and homogenization experiments", "pinflow"};
    app.require_subcommand(1, 1);
    std::string config, out = "pinflow_out";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool verbose = false;
    for (const char* name : subcommands) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " subcommand");
        sub->add_option("--config", config, "JSON configuration file")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", threads, "worker count (default PINFLOW_THREADS or 1)")->check(CLI::PositiveNumber);
        sub->add_flag("--verbose", verbose, "progress messages on stderr");
    }

    const std::string first = argc > 1 ? argv[1] : "";
    const bool known = std::find(subcommands.begin(), subcommands.end(), first) != subcommands.end();
    if (!known && first != "-h" && first != "--help") {
        if (!first.empty()) std::cerr << "unknown subcommand '" << first << "'\n\n";
        std::cerr << app.help();
        return exit_usage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    RunContext ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.out = out;
    ctx.verbose = verbose;
    if (threads > 0) set_thread_count(threads);
    try {
        ctx.text = load_config_text(config);
        if (seed) ctx.text = override_seed(ctx.text, *seed);
        fs::create_directories(ctx.out);
        return dispatch(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericalError& e) {
        write_failure(ctx, "numerical", e.what(), e.time(), e.step());
        return exit_numerical;
    } catch (const std::exception& e) {
        write_failure(ctx, "runtime", e.what(), -1.0, -1);
        return exit_numerical;
    }
}

} // namespace pinflow
