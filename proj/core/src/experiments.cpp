#include "pinflow/experiments.hpp"

#include "pinflow/error.hpp"
#include "pinflow/metrics.hpp"
#include "pinflow/parallel.hpp"

#include <Eigen/Core>
#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pinflow {

using json = nlohmann::json;

void MetricSeries::validate() const {
    if (axis.size() != values.size())
        throw NumericalError("MetricSeries '" + metric_name + "': axis and values differ in length");
    for (std::size_t k = 0; k < axis.size(); ++k)
        if (!std::isfinite(axis[k]) || !std::isfinite(values[k]))
            throw NumericalError("MetricSeries '" + metric_name + "': non-finite entry");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_slope: need at least two matching samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) sx += x[k], sy += y[k], sxx += x[k] * x[k], sxy += x[k] * y[k];
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Convergence

void ConvergenceSpec::validate() const {
    require(variant == MeanFieldVariant::IncompressibleDissipative || variant == MeanFieldVariant::ConservativeLake,
            "convergence: variant must be incompressible dissipative or conservative lake");
    params.validate();
    require(std::abs(params.lambda - std::numbers::pi) <= 1e-12,
            "convergence: lambda must equal pi to match the particle pair sum");
    require(!counts.empty(), "convergence: the N sweep is empty");
    for (std::size_t n : counts) require(n >= 1, "convergence: particle counts must be positive");
    require(!checkpoints.empty(), "convergence: no checkpoint times");
    for (std::size_t k = 0; k < checkpoints.size(); ++k)
        require(checkpoints[k] > 0.0 && (k == 0 || checkpoints[k] > checkpoints[k - 1]),
                "convergence: checkpoints must be positive and increasing");
    require(grid_n >= 16 && box > 0.0, "convergence: invalid grid");
    require(particle_dt > 0.0, "convergence: particle_dt must be positive");
    require(bandwidth > 0.0 && bandwidth_exponent >= 0.0, "convergence: invalid bandwidth law");
    require(blob.radius > 0.0 && blob.aspect > 0.0, "convergence: invalid blob");
    if (variant == MeanFieldVariant::ConservativeLake)
        require(params.alpha == 0.0, "convergence: the lake equation needs alpha = 0");
}

double ConvergenceSpec::bandwidth_for(std::size_t n) const {
    return bandwidth * std::pow(static_cast<double>(n) / static_cast<double>(counts.front()), -bandwidth_exponent);
}

namespace {

std::shared_ptr<const MeanFieldModel> convergence_model(const ConvergenceSpec& spec, const Grid2D& g) {
    MeanFieldOptions opt;
    opt.poisson = PoissonMode::freespace;
    opt.adaptive = true;
    opt.freespace.margin_tolerance = spec.margin_tolerance;
    return std::make_shared<MeanFieldModel>(g, spec.variant, spec.params, spec.landscape, opt);
}

/// PDE step request; the adaptive stepper shrinks it to the stability bound
constexpr double pde_dt = 0.01;

std::vector<ConvergenceRow> convergence_subrun(const ConvergenceSpec& spec, std::size_t n) {
    BlobSpec b = spec.blob;
    b.count = n;
    VortexEnsemble ens;
    ens.positions = sample_blob(b);
    ens.params = spec.params;
    ens.landscape = spec.landscape;
    ens.seed = b.seed;
    const Grid2D g = Grid2D::centered_box(spec.grid_n, spec.box);
    const double bw = spec.bandwidth_for(n);
    MeanFieldState state = make_state(convergence_model(spec, g), deposit_empirical(ens.positions, g, bw));
    std::vector<ConvergenceRow> rows;
    for (double t : spec.checkpoints) {
        VortexEnsemble next;
        simulate(ens, t - ens.time, spec.particle_dt, 1 << 30, {}, &next);
        ens = std::move(next);
        state = time_step(state, pde_dt, TimeScheme::ssprk3, t);
        rows.push_back({n, t, hminus1_distance(deposit_empirical(ens.positions, g, bw), state.m)});
    }
    return rows;
}

} // namespace

ConvergenceResult run_convergence(const ConvergenceSpec& spec) {
    spec.validate();
    ConvergenceResult out;
    out.final_distance.axis_name = "N";
    out.final_distance.metric_name = "H^-1 surrogate distance";
    out.final_distance.tolerance = spec.min_ratio;
    for (std::size_t n : spec.counts) {
        try {
            const auto rows = convergence_subrun(spec, n);
            out.rows.insert(out.rows.end(), rows.begin(), rows.end());
            out.final_distance.axis.push_back(static_cast<double>(n));
            out.final_distance.values.push_back(rows.back().distance);
        } catch (const Error& e) {
            out.failures.push_back("N = " + std::to_string(n) + ": " + e.what());
        }
    }
    const auto& d = out.final_distance.values;
    for (std::size_t k = 0; k + 1 < d.size(); ++k) out.ratios.push_back(d[k] / d[k + 1]);
    out.pass = out.failures.empty() && d.size() >= 2 &&
               std::all_of(out.ratios.begin(), out.ratios.end(), [&](double r) { return r >= spec.min_ratio; });
    return out;
}

void write_convergence_csv(std::ostream& os, const ConvergenceResult& r) {
    os << "N,t,distance\n" << std::setprecision(17);
    for (const auto& row : r.rows) os << row.n << ',' << row.t << ',' << row.distance << '\n';
}

TrackingResult run_single_tracking(const ConvergenceSpec& spec, double t_end) {
    ConvergenceSpec s = spec;
    s.counts = {1};
    s.checkpoints = {t_end};
    s.validate();
    require(!spec.landscape, "single-particle tracking runs without pinning");
    require(spec.params.force.is_constant(), "single-particle tracking needs a constant force");
    VortexEnsemble ens;
    ens.positions = {spec.blob.center};
    ens.params = spec.params;
    ens.seed = spec.blob.seed;
    const Grid2D g = Grid2D::centered_box(spec.grid_n, spec.box);
    TrackingResult out;
    out.bandwidth = s.bandwidth_for(1);
    MeanFieldState state = make_state(convergence_model(s, g), deposit_empirical(ens.positions, g, out.bandwidth));
    VortexEnsemble next;
    simulate(ens, t_end, spec.particle_dt, 1 << 30, {}, &next);
    state = time_step(state, pde_dt, TimeScheme::ssprk3, t_end);
    out.particle = next.positions.front();
    out.centroid = (1.0 / state.m.integral()) * first_moment(state.m);
    out.gap = norm(out.particle - out.centroid);
    return out;
}

// ---------------------------------------------------------------------------
// Current-velocity curves

void CurveSpec::validate() const {
    require(landscape != nullptr, "curve: a landscape is required");
    require(!forces.empty(), "curve: the force list is empty");
    for (std::size_t k = 0; k < forces.size(); ++k)
        require(std::isfinite(forces[k]) && forces[k] >= 0.0 && (k == 0 || forces[k] > forces[k - 1]),
                "curve: forces must be non-negative and increasing");
    require(norm(direction) > 0.0, "curve: direction must be non-zero");
    require(temperature >= 0.0, "curve: temperature must be non-negative");
    require(alpha >= 0.0 && std::abs(alpha * alpha + beta * beta - 1.0) <= 1e-12, "curve: need alpha^2 + beta^2 = 1");
}

CurveResult current_velocity_curve(const CurveSpec& spec) {
    spec.validate();
    const Vec2 dir = (1.0 / norm(spec.direction)) * spec.direction;
    CurveResult out;
    out.curve.axis_name = "|F|";
    out.curve.metric_name = "|V|";
    out.curve.axis = spec.forces;
    if (spec.temperature == 0.0) {
        DepinningOptions dopt = spec.depinning;
        dopt.f_max = std::max(dopt.f_max, spec.forces.back());
        out.critical_force = critical_force(*spec.landscape, spec.alpha, spec.beta, dir, dopt);
    }
    out.velocities.assign(spec.forces.size(), Vec2{});
    parallel_for(spec.forces.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const Vec2 F = spec.forces[k] * dir;
            if (out.critical_force) {
                if (spec.forces[k] <= *out.critical_force) continue;
                out.velocities[k] =
                    cell_velocity_deterministic(*spec.landscape, spec.alpha, spec.beta, F, spec.depinning.flow);
            } else {
                out.velocities[k] =
                    cell_velocity_viscous(*spec.landscape, spec.alpha, spec.beta, F, spec.temperature, spec.measure);
            }
        }
    });
    for (const Vec2& v : out.velocities) out.curve.values.push_back(norm(v));
    out.curve.validate();
    return out;
}

void write_curve_csv(std::ostream& os, const CurveResult& r, Vec2 direction) {
    const Vec2 dir = (1.0 / norm(direction)) * direction;
    os << "F,Fx,Fy,Vx,Vy,V\n" << std::setprecision(17);
    for (std::size_t k = 0; k < r.curve.axis.size(); ++k) {
        const Vec2 F = r.curve.axis[k] * dir;
        os << r.curve.axis[k] << ',' << F.x << ',' << F.y << ',' << r.velocities[k].x << ',' << r.velocities[k].y
           << ',' << r.curve.values[k] << '\n';
    }
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace

void write_svg_polyline(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    require(x.size() == y.size() && !x.empty(), "write_svg_polyline: need matching non-empty data");
    constexpr double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 50;
    auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
    double x0 = *xmin_it, x1 = *xmax_it, y0 = std::min(0.0, *ymin_it), y1 = *ymax_it;
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (W - left - right); };
    auto py = [&](double v) { return H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom); };
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
       << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double vx = x0 + (x1 - x0) * k / 4.0, vy = y0 + (y1 - y0) * k / 4.0;
        os << "<line x1=\"" << px(vx) << "\" y1=\"" << H - bottom << "\" x2=\"" << px(vx) << "\" y2=\""
           << H - bottom + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(vx) << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\">"
           << tick_label(vx) << "</text>\n";
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << py(vy) << "\" x2=\"" << left << "\" y2=\"" << py(vy)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << py(vy) + 4 << "\" text-anchor=\"end\">" << tick_label(vy)
           << "</text>\n";
    }
    os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
       << xml_escape(xlabel) << "</text>\n";
    os << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (top + H - bottom) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"black\" points=\"";
    for (std::size_t k = 0; k < x.size(); ++k) os << (k ? " " : "") << px(x[k]) << ',' << py(y[k]);
    os << "\"/>\n</svg>\n";
}

// ---------------------------------------------------------------------------
// Initial layer

void LayerSpec::validate() const {
    require(landscape != nullptr, "layer: a landscape is required");
    require(resolution >= 8, "layer: resolution must be at least 8");
    require(!checkpoints.empty(), "layer: no checkpoint times");
    for (std::size_t k = 0; k < checkpoints.size(); ++k)
        require(checkpoints[k] > 0.0 && (k == 0 || checkpoints[k] > checkpoints[k - 1]),
                "layer: checkpoints must be positive and increasing");
    require(well_radius > 0.0 && cfl > 0.0 && cfl <= 1.0, "layer: invalid well radius or CFL number");
}

LayerResult run_layer(const LayerSpec& spec) {
    spec.validate();
    const Grid2D g = cell_grid(spec.resolution);
    LayerResult out;
    out.wells = cell_wells(*spec.landscape, spec.resolution, spec.cell.x_slow);
    out.concentration.axis_name = "t";
    out.concentration.metric_name = "mass near wells";
    out.concentration.tolerance = spec.well_radius;
    const double dt = cell_layer_stable_dt(cell_layer_drift_field(g, *spec.landscape, spec.cell), spec.cfl);
    ScalarField m(g, 1.0);
    const double mass0 = m.integral();
    double t = 0.0;
    for (double tc : spec.checkpoints) {
        CellLayerReport rep;
        m = cell_layer_step(m, *spec.landscape, spec.cell, dt, tc - t, &rep);
        t = tc;
        out.steps += rep.steps;
        out.concentration.axis.push_back(t);
        out.concentration.values.push_back(mass_near(m, out.wells, spec.well_radius) / mass0);
    }
    out.mass_drift = std::abs(m.integral() - mass0);
    out.concentration.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Modulated-energy sweep

void GlSweepSpec::validate() const {
    require(!epsilons.empty(), "glsweep: the epsilon list is empty");
    for (double e : epsilons) require(e > 0.0 && e < 1.0, "glsweep: epsilon must lie in (0, 1)");
    require(centers.size() == degrees.size() && !centers.empty(), "glsweep: need matching vortex centers and degrees");
    require(half_width > 0.0 && R > 0.0, "glsweep: half_width and R must be positive");
}

GlSweepResult run_glsweep(const GlSweepSpec& spec) {
    spec.validate();
    const PinningLandscape flat = PinningLandscape::zero();
    const PinningLandscape& land = spec.landscape ? *spec.landscape : flat;
    GlSweepResult out;
    out.energy.axis_name = "|log eps|";
    out.energy.metric_name = "E";
    for (double eps : spec.epsilons) {
        int n = static_cast<int>(std::ceil(2.0 * spec.half_width / (eps / 4.0)));
        n += n % 2;
        const Grid2D g = Grid2D::centered_box(n, n * eps / 4.0);
        SyntheticVortexConfig cfg;
        cfg.centers = spec.centers;
        cfg.degrees = spec.degrees;
        cfg.epsilon = eps;
        cfg.profile = spec.profile;
        const ComplexField u = synthesize_field(cfg, g);
        const ModulatedEnergyReport r = modulated_energy(u, VectorField(g), 1.0, land, spec.R, spec.z, eps);
        out.energy.axis.push_back(std::abs(std::log(eps)));
        out.energy.values.push_back(r.E);
        out.excess.push_back(r.D);
        out.jacobian.push_back(integrate_disk(supercurrent_and_vorticity(u, eps).mu, spec.z, spec.R));
    }
    out.energy.validate();
    if (out.energy.axis.size() >= 2) out.slope = fit_slope(out.energy.axis, out.energy.values);
    return out;
}

// ---------------------------------------------------------------------------
// Manifests

std::string config_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string version_string() {
    std::ostringstream os;
    os << "pinflow " << PINFLOW_VERSION << "; " << fftw_version << "; eigen " << EIGEN_WORLD_VERSION << '.'
       << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    return os.str();
}

void write_manifest(const std::string& dir, const std::string& kind, const std::string& config_text,
                    const std::vector<std::uint64_t>& seeds, double wall_seconds, const std::string& extra_json) {
    json m;
    m["kind"] = kind;
    m["config_hash"] = config_hash(config_text);
    m["versions"] = {{"pinflow", PINFLOW_VERSION},
                     {"fftw", std::string(fftw_version)},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}};
    m["seeds"] = seeds;
    m["threads"] = thread_count();
    m["wall_clock_seconds"] = wall_seconds;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m["finished_utc"] = stamp;
    m["results"] = json::parse(extra_json);
    std::filesystem::create_directories(dir);
    std::ofstream f(std::filesystem::path(dir) / "manifest.json");
    if (!f) throw Error("cannot write manifest in " + dir);
    f << m.dump(2) << '\n';
}

} // namespace pinflow
