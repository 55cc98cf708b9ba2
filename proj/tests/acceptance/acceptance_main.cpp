/// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any criterion fails

#include "pinflow/cli.hpp"
#include "pinflow/error.hpp"
#include "pinflow/experiments.hpp"
#include "pinflow/glfield.hpp"
#include "pinflow/homog.hpp"
#include "pinflow/meanfield.hpp"
#include "pinflow/parallel.hpp"
#include "pinflow/particles.hpp"
#include "pinflow/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace pinflow;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

const double s2 = 1.0 / std::sqrt(2.0);

struct Outcome {
    bool pass = false;
    std::string detail;
};

/// Accumulates sub-checks into one outcome
class Report {
public:
    void check(bool ok, const std::string& what) {
        pass_ = pass_ && ok;
        if (!os_.str().empty()) os_ << "; ";
        os_ << what << (ok ? "" : " [x]");
    }
    void note(const std::string& what) {
        if (!os_.str().empty()) os_ << "; ";
        os_ << what;
    }
    Outcome outcome() const { return {pass_, os_.str()}; }

private:
    bool pass_ = true;
    std::ostringstream os_;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

/// 1 / int_0^1 dy / (F - sin 2 pi y) by the periodic trapezoid rule
double washboard_trapezoid(double F) {
    const int n = 4096;
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += 1.0 / (F - std::sin(2 * pi * k / n));
    return n / s;
}

/// Stationary density and mean velocity of dX = -U'(X) dt + sqrt(2T) dB with U = alpha (A cos 2 pi y - F y)
struct TiltedOracle {
    double amplitude, alpha, F, T;

    double U(double y) const { return alpha * (amplitude * std::cos(2 * pi * y) - F * y); }

    /// int_x^{x+1} exp((U(y) - U(x)) / T) dy by composite 10-point Gauss-Legendre
    double inner(double x) const {
        static const double gx[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                                     0.9739065285171717};
        static const double gw[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                     0.0666713443086881};
        const int panels = 64;
        double s = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a = x + double(p) / panels, hw = 0.5 / panels;
            for (int q = 0; q < 5; ++q)
                for (double sg : {-1.0, 1.0}) s += hw * gw[q] * std::exp((U(a + hw + sg * hw * gx[q]) - U(x)) / T);
        }
        return s;
    }

    double normalization() const {
        const int n = 512;
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += inner(double(k) / n);
        return s / n;
    }

    double velocity() const { return T * (1.0 - std::exp(-alpha * F / T)) / normalization(); }
};

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) sx += x[k], sy += y[k], sxx += x[k] * x[k], sxy += x[k] * y[k];
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome washboard_law() {
    Report r;
    const auto wb = PinningLandscape::washboard();
    for (double F : {1.5, 2.0, 3.0}) {
        const double exact = std::sqrt(F * F - 1.0);
        const Vec2 v = cell_velocity_deterministic(wb, 1, 0, {F, 0});
        const double rel = std::abs(v.x - exact) / exact;
        r.check(rel <= 1e-3 && std::abs(washboard_trapezoid(F) - exact) <= 1e-10 * exact,
                "F=" + fmt(F) + " rel " + fmt(rel, 2));
    }
    return r.outcome();
}

Outcome depinning() {
    Report r;
    const DepinningReport d = depinning_scan(PinningLandscape::washboard(), 1, 0, {1, 0});
    r.check(std::abs(d.critical_force - 1.0) <= 1e-4, "F_c " + fmt(d.critical_force, 9));
    r.check(std::abs(d.exponent - 0.5) <= 0.05, "exponent " + fmt(d.exponent));
    return r.outcome();
}

Outcome gibbs() {
    Report r;
    const PinningLandscape land(make_tilted_random_fourier_cell(11, 2, 0.3));
    InvariantMeasureOptions o;
    o.resolution = 128;
    const double T = 0.2;
    for (auto [alpha, beta] : {std::pair{1.0, 0.0}, std::pair{s2, s2}}) {
        const InvariantMeasure mu = viscous_invariant_measure(land, alpha, beta, {0, 0}, T, o);
        auto gibbs_gap = [&](double exponent) {
            ScalarField g = ScalarField::sample(mu.density.grid(), [&](Vec2 y) { return std::exp(-exponent * land.cell_value(y) / T); });
            g *= 1.0 / g.integral();
            return (mu.density - g).max_abs();
        };
        const std::string tag = "(" + fmt(alpha, 3) + "," + fmt(beta, 3) + ")";
        const double literal = gibbs_gap(1.0);
        r.check(literal <= 1e-6, tag + " gap to e^{-h/T} " + fmt(literal, 3));
        if (alpha != 1.0) r.note(tag + " gap to e^{-alpha h/T} " + fmt(gibbs_gap(alpha), 3));
        const double v0 = norm(cell_velocity_viscous(land, alpha, beta, {0, 0}, T, o));
        r.check(v0 <= 1e-10, tag + " |V(0)| " + fmt(v0, 3));
    }
    return r.outcome();
}

Outcome arrhenius() {
    Report r;
    const std::vector<double> Ts{0.08, 0.1, 0.125, 0.16, 0.2, 0.25};
    const double A = 0.5;
    const ArrheniusReport a = arrhenius_scan(PinningLandscape(make_cosine1d_cell(A)), 1, 0, {0.005, 0}, Ts);
    const double osc = 2 * A;
    std::vector<double> x, y;
    double worst = 0.0;
    for (std::size_t k = 0; k < Ts.size(); ++k) {
        x.push_back(1.0 / Ts[k]);
        y.push_back(std::log(norm(a.velocities[k]) * Ts[k] / 0.005));
        const double vx = TiltedOracle{A, 1.0, 0.005, Ts[k]}.velocity();
        worst = std::max(worst, std::abs(a.velocities[k].x - vx) / vx);
    }
    const double slope = lsq_slope(x, y);
    r.check(std::abs(slope + osc) <= 0.1 * osc, "slope " + fmt(slope) + " vs " + fmt(-osc));
    r.check(worst <= 1e-4, "quadrature gap " + fmt(worst, 2));
    return r.outcome();
}

Outcome langevin() {
    Report r;
    const double T = 0.2;
    const Vec2 F{0.8, 0.0};
    const auto wb = std::make_shared<const PinningLandscape>(PinningLandscape::washboard());
    const double v_fp = cell_velocity_viscous(*wb, 1, 0, F, T).x;
    const int replicas = 64;
    const long steps = 100000;
    const double dt = 2e-3;
    std::vector<double> v(replicas);
    parallel_for(replicas, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            VortexEnsemble e;
            e.positions = {{0.0, 0.0}};
            e.params.temperature = T;
            e.params.force.constant = F;
            e.landscape = wb;
            e.seed = 1000 + k;
            for (long s = 0; s < steps; ++s) e = step_langevin(e, dt);
            v[k] = e.positions[0].x / (steps * dt);
        }
    });
    double mean = 0.0, var = 0.0;
    for (double x : v) mean += x / replicas;
    for (double x : v) var += (x - mean) * (x - mean) / (replicas - 1);
    const double se = std::sqrt(var / replicas);
    r.check(std::abs(mean - v_fp) <= 3 * se, "Langevin " + fmt(mean) + " +- " + fmt(se, 2) + ", Fokker-Planck " + fmt(v_fp));
    return r.outcome();
}

Outcome convergence() {
    Report r;
    for (MeanFieldVariant variant : {MeanFieldVariant::IncompressibleDissipative, MeanFieldVariant::ConservativeLake}) {
        ConvergenceSpec spec;
        spec.variant = variant;
        const bool lake = variant == MeanFieldVariant::ConservativeLake;
        if (lake) {
            spec.params.alpha = 0.0;
            spec.params.beta = 1.0;
        }
        const ConvergenceResult c = run_convergence(spec);
        std::string d = lake ? "lake d=" : "dissipative d=";
        for (std::size_t k = 0; k < c.final_distance.values.size(); ++k) d += (k ? "," : "") + fmt(c.final_distance.values[k], 3);
        for (double q : c.ratios) d += " ratio " + fmt(q, 3);
        for (const auto& f : c.failures) d += " failure: " + f;
        bool ok = c.failures.empty() && c.ratios.size() == 2;
        for (double q : c.ratios) ok = ok && q >= 1.5;
        r.check(ok, d);
    }
    return r.outcome();
}

Outcome conservation() {
    Report r;
    {
        const Grid2D g = Grid2D::centered_box(128, 2.0);
        Params p;
        p.force.constant = {0.5, 0.2};
        auto md = std::make_shared<const MeanFieldModel>(g, MeanFieldVariant::IncompressibleDissipative, p, nullptr, MeanFieldOptions{});
        ScalarField m = ScalarField::sample(g, [](Vec2 x) { return std::exp(-norm2(x) / (2 * 0.04)); });
        m *= 1.0 / m.integral();
        StepReport rep;
        time_step(make_state(md, m), 2e-3, TimeScheme::ssprk3, 0.2, &rep);
        const double dm = std::abs(rep.mass_final - rep.mass_initial);
        r.check(dm <= 1e-12, "PDE mass drift " + fmt(dm, 2));
        r.check(rep.min_m >= -1e-6, "min m " + fmt(rep.min_m, 2));
    }
    {
        const Grid2D g = Grid2D::unit_torus(64);
        auto land = std::make_shared<const PinningLandscape>(make_eggbox_cell(-0.15), 1.0);
        auto md = std::make_shared<const MeanFieldModel>(g, MeanFieldVariant::ConservativeLake, Params::mixed(0.0, 1.0), land, MeanFieldOptions{});
        const MeanFieldState s = make_state(md, ScalarField::sample(g, [](Vec2 x) {
            return 1.0 + 0.5 * std::exp(-norm2(x - Vec2{0.1, 0}) / 0.02) - 0.3 * std::exp(-norm2(x + Vec2{0.15, 0.1}) / 0.03);
        }));
        const double e0 = lake_energy(s);
        StepReport rep;
        const MeanFieldState e = time_step(s, 2e-3, TimeScheme::rk4, 0.5, &rep);
        const double drift = std::abs(lake_energy(e) - e0) / std::abs(e0) / 0.5;
        r.check(drift <= 1e-5, "lake energy drift " + fmt(drift, 2) + "/t");
        r.check(std::abs(rep.mass_final - rep.mass_initial) <= 1e-12, "lake mass drift " + fmt(std::abs(rep.mass_final - rep.mass_initial), 2));
    }
    {
        VortexEnsemble e;
        for (std::size_t i = 0; i < 10; ++i) e.positions.push_back(0.5 * counter_normal_pair(42, i, 1));
        e.params = Params::mixed(0.0, 1.0);
        const Trajectory tr = simulate(e, 1.0, 1e-3, 100);
        const double drift = std::abs(tr.energy.back() - tr.energy.front()) / std::abs(tr.energy.front());
        r.check(drift <= 1e-6, "W_N drift " + fmt(drift, 2) + "/t");
    }
    {
        const Grid2D g = Grid2D::unit_torus(32);
        Params p = Params::mixed(0.6, 0.8);
        p.force.constant = {0.3, 0.1};
        auto land = std::make_shared<const PinningLandscape>(make_cosine1d_cell(0.05), 1.0);
        auto md = std::make_shared<const MeanFieldModel>(g, MeanFieldVariant::IncompressibleDissipative, p, land, MeanFieldOptions{});
        const MeanFieldState s = make_state(md, ScalarField::sample(g, [](Vec2 x) {
            return 1.0 + 0.4 * std::cos(2 * pi * x.x) * std::sin(2 * pi * x.y) + 0.2 * std::sin(2 * pi * x.x);
        }));
        const double T = 0.4;
        const ScalarField ref = time_step(s, T / 512, TimeScheme::rk4, T).m;
        const double e1 = (time_step(s, T / 32, TimeScheme::ssprk3, T).m - ref).max_abs();
        const double e2 = (time_step(s, T / 64, TimeScheme::ssprk3, T).m - ref).max_abs();
        const double order = std::log2(e1 / e2);
        r.check(order >= 2.9, "SSP-RK3 order " + fmt(order, 3));
    }
    return r.outcome();
}

Outcome jacobian() {
    Report r;
    const Grid2D g = Grid2D::centered_box(512, 0.8);
    SyntheticVortexConfig cfg;
    cfg.epsilon = 0.01;
    cfg.centers = {{0, 0}};
    cfg.degrees = {1};
    const CurrentVorticity cv = supercurrent_and_vorticity(synthesize_field(cfg, g), cfg.epsilon);
    const double flux = integrate_disk(cv.mu, {0, 0}, 0.1);
    r.check(std::abs(flux - 2 * pi) <= 0.02 * 2 * pi, "disk integral / 2pi " + fmt(flux / (2 * pi), 6));
    return r.outcome();
}

Outcome self_interaction() {
    Report r;
    for (double a0 : {1.0, 0.8}) {
        GlSweepSpec spec;
        spec.landscape = std::make_shared<const PinningLandscape>(make_constant_cell(std::log(a0)));
        const GlSweepResult s = run_glsweep(spec);
        const double slope = lsq_slope(s.energy.axis, s.energy.values);
        r.check(std::abs(slope - pi * a0) <= 0.02 * pi * a0, "a0=" + fmt(a0) + " slope/(pi a0) " + fmt(slope / (pi * a0), 5));
    }
    return r.outcome();
}

Outcome initial_layer() {
    Report r;
    LayerSpec spec;
    spec.landscape = std::make_shared<const PinningLandscape>(
        make_fourier_cell({{1, 0, -0.12, 0.03}, {0, 1, -0.1, 0.0}, {1, 1, 0.04, -0.02}, {2, 1, 0.0, 0.03}}));
    spec.checkpoints = {20.0};
    const LayerResult layer = run_layer(spec);
    const double frac = layer.concentration.values.back();
    r.check(frac >= 0.99, "mass near wells " + fmt(frac, 6));
    r.check(std::abs(layer.mass_drift) <= 1e-12, "mass drift " + fmt(layer.mass_drift, 2));

    // tracer push-forward of a uniform grid of cell points by RK4
    const int ntr = 10000;
    std::vector<char> near(ntr, 0);
    parallel_for(ntr, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            Vec2 y{counter_uniform(77, 0, k, 0), counter_uniform(77, 0, k, 1)};
            const double h = 0.025;
            auto f = [&](Vec2 p) { return cell_layer_drift(*spec.landscape, spec.cell, p); };
            for (int s = 0; s < 800; ++s) {
                const Vec2 k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2), k4 = f(y + h * k3);
                y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            near[k] = std::any_of(layer.wells.begin(), layer.wells.end(), [&](Vec2 w) { return torus_distance(w, y) < spec.well_radius; });
        }
    });
    const double tracer = static_cast<double>(std::count(near.begin(), near.end(), 1)) / ntr;
    r.check(std::abs(frac - tracer) <= 0.01, "tracer fraction " + fmt(tracer, 6));
    return r.outcome();
}

Outcome identities() {
    Report r;
    double rot = 0.0, drift = 0.0;
    const PinningLandscape land(make_tilted_random_fourier_cell(21, 3, 0.4));
    for (int k = 0; k < 1000; ++k) {
        auto u = [&](int lane) { return 2 * counter_uniform(123, 0, k, lane) - 1; };
        const double th = pi * u(0);
        const double alpha = std::abs(std::cos(th)), beta = std::sin(th);
        const Vec2 G{u(1), u(2)};
        rot = std::max(rot, norm(mixedflow_apply(alpha, -beta, mixedflow_apply(alpha, beta, G)) - G));
        const CellLayerConfig c{alpha, beta, u(3), {u(4), u(5)}, {u(6), u(7)}};
        const Vec2 y{u(8), u(9)};
        const Vec2 a = cell_layer_drift(land, c, y);
        const Vec2 b = dissipative_transport(c.alpha, c.beta, land.cell_gradient(y), c.force, c.v_slow, 2 * c.kappa);
        drift = std::max(drift, norm(a - b));
    }
    r.check(rot <= 1e-14, "rotation pair " + fmt(rot, 2));
    r.check(drift <= 1e-12, "cell drift vs transport " + fmt(drift, 2));
    return r.outcome();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pinflow");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    Report r;
    const fs::path dir = fs::temp_directory_path() /
                         ("pinflow_acceptance_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(dir);
    struct Case {
        std::string command, config;
        std::vector<std::string> outputs;
    };
    const std::vector<Case> cases{
        {"particles",
         R"({"params": {"temperature": 0.05, "force": [0.3, 0.1]}, "landscape": {"kind": "eggbox", "eta": 0.2},
             "initial": {"kind": "blob", "N": 64, "radius": 0.3}, "t_end": 0.1, "dt": 0.001, "record_every": 10,
             "stochastic": true})",
         {"trajectory.csv", "diagnostics.csv"}},
        {"curve",
         R"({"experiment": "stickslip", "landscape": {"kind": "washboard"}, "force_range": {"min": 0, "max": 2, "count": 9},
             "temperature": 0.2})",
         {"curve.csv"}},
        {"meanfield",
         R"({"grid": {"n": 64, "L": 2}, "params": {"lambda": 3.141592653589793, "force": [0.2, 0.1]},
             "initial": {"kind": "gaussian", "radius": 0.2}, "t_end": 0.05, "dt": 0.002, "records": 5})",
         {"diagnostics.csv"}},
    };
    for (const Case& c : cases) {
        const fs::path cfg = dir / (c.command + ".json");
        std::ofstream(cfg) << c.config;
        std::vector<std::string> outputs;
        bool ok = true;
        for (const char* threads : {"1", "1", "4", "8"}) {
            const fs::path out = dir / (c.command + "_" + threads + "_" + std::to_string(outputs.size()));
            ok = ok && run_cli({c.command, "--config", cfg.string(), "--out", out.string(), "--seed", "7", "--threads", threads}) == exit_ok;
            std::string all;
            for (const auto& f : c.outputs) all += slurp(out / f);
            outputs.push_back(all);
        }
        ok = ok && !outputs[0].empty();
        for (const auto& o : outputs) ok = ok && o == outputs[0];
        r.check(ok, c.command + " " + std::to_string(outputs[0].size()) + " bytes");
    }
    set_thread_count(1);
    fs::remove_all(dir);
    return r.outcome();
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"washboard exact law", washboard_law},
        {"depinning threshold and exponent", depinning},
        {"Gibbs stationarity", gibbs},
        {"Arrhenius slope", arrhenius},
        {"Langevin versus Fokker-Planck", langevin},
        {"mean-field limit", convergence},
        {"conservation suite", conservation},
        {"Jacobian estimate", jacobian},
        {"self-interaction slope", self_interaction},
        {"initial layer", initial_layer},
        {"algebraic identities", identities},
        {"determinism across workers", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << k + 1 << " " << criteria[k].first << ": " << o.detail << " ("
                  << fmt(secs, 3) << " s)" << std::endl;
    }
    std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
