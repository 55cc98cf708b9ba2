#include <doctest.h>

#include "pinflow/cli.hpp"
#include "pinflow/config.hpp"
#include "pinflow/error.hpp"
#include "pinflow/experiments.hpp"
#include "pinflow/metrics.hpp"
#include "pinflow/parallel.hpp"
#include "pinflow/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace pinflow;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pinflow_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pinflow");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::vector<Vec2> random_points(std::size_t n, double spread, std::uint64_t seed) {
    BlobSpec b;
    b.count = n;
    b.radius = spread;
    b.seed = seed;
    return sample_blob(b);
}

} // namespace

TEST_CASE("deposit of an empirical measure") {
    const Grid2D g = Grid2D::centered_box(128, 4.0);
    const double bw = 0.1;

    const ScalarField one = deposit_empirical(std::vector<Vec2>{{0.3, -0.2}}, g, bw);
    CHECK(std::abs(one.integral() - 1.0) <= 1e-10);
    CHECK(one.min() >= 0.0);
    const Vec2 c1 = first_moment(one);
    CHECK(norm(c1 - Vec2{0.3, -0.2}) <= 1e-8);
    // peak of the continuous kernel: 1 / (2 pi bw^2)
    CHECK(one.max() <= 1.0 / (2 * pi * bw * bw) * 1.05);

    const auto x = random_points(200, 0.4, 3);
    const ScalarField m = deposit_empirical(x, g, bw);
    CHECK(std::abs(m.integral() - 1.0) <= 1e-10);
    CHECK(m.min() >= 0.0);
    Vec2 centroid{};
    for (Vec2 p : x) centroid += (1.0 / x.size()) * p;
    CHECK(norm(first_moment(m) - centroid) <= 1e-8);

    const auto y = random_points(200, 0.3, 9);
    std::vector<Vec2> both = x;
    both.insert(both.end(), y.begin(), y.end());
    ScalarField avg = deposit_empirical(y, g, bw);
    avg += m;
    avg *= 0.5;
    CHECK((deposit_empirical(both, g, bw) - avg).max_abs() <= 1e-12 * avg.max_abs());

    CHECK_THROWS_AS(deposit_empirical(x, g, 1.5 * g.hx()), ConfigError);
    CHECK_THROWS_AS(deposit_empirical(std::vector<Vec2>{}, g, bw), ConfigError);

    // periodic wrapping keeps the full mass for a particle on the box edge
    const Grid2D t = Grid2D::unit_torus(64);
    const ScalarField w = deposit_empirical(std::vector<Vec2>{{0.49, -0.495}}, t, 0.05, true);
    CHECK(std::abs(w.integral() - 1.0) <= 1e-10);
    CHECK(w(0, 0) > 0.1 * w.max());
}

TEST_CASE("H^-1 distance") {
    const Grid2D g = Grid2D::unit_torus(64);
    const ScalarField m = ScalarField::sample(g, [](Vec2 x) { return 1.0 + 0.3 * std::cos(2 * pi * (x.x + 2 * x.y)); });
    CHECK(hminus1_distance(m, m) == 0.0);

    for (double A : {0.1, 0.7}) {
        const ScalarField p = m + ScalarField::sample(g, [&](Vec2 x) { return A * std::sin(2 * pi * x.x); });
        CHECK(std::abs(hminus1_distance(m, p) - A / (2 * pi * std::sqrt(2.0))) <= 1e-12);
    }
    // constants are invisible
    CHECK(hminus1_distance(m, m + ScalarField(g, 2.5)) <= 1e-14);

    std::vector<ScalarField> fields;
    for (std::uint64_t k = 0; k < 4; ++k) {
        ScalarField f(g);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = counter_uniform(11, k, i);
        fields.push_back(f);
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            CHECK(hminus1_distance(fields[a], fields[b]) == doctest::Approx(hminus1_distance(fields[b], fields[a])).epsilon(1e-14));
            for (int c = 0; c < 4; ++c)
                CHECK(hminus1_distance(fields[a], fields[c]) <=
                      hminus1_distance(fields[a], fields[b]) + hminus1_distance(fields[b], fields[c]) + 1e-12);
        }
    CHECK_THROWS_AS(hminus1_distance(m, ScalarField(Grid2D::unit_torus(32))), ConfigError);
}

TEST_CASE("exact 1-Wasserstein oracle") {
    const Grid2D g = Grid2D::unit_torus(12);
    const double h = g.hx(), area = g.cell_area();

    // unit point masses two columns apart
    ScalarField a(g), b(g);
    a(2, 3) = 1.0 / area;
    b(4, 3) = 1.0 / area;
    CHECK(std::abs(wasserstein1_exact(a, b) - 2 * h) <= 1e-12);
    CHECK(wasserstein1_exact(a, a) == 0.0);

    // splitting mass between two targets
    ScalarField c(g);
    c(2, 6) = 0.5 / area;
    c(9, 3) = 0.5 / area;
    CHECK(std::abs(wasserstein1_exact(a, c) - 0.5 * (3 * h + 7 * h)) <= 1e-12);
    // the periodic cost wraps the far target around: 7 columns become 5
    CHECK(std::abs(wasserstein1_exact(a, c, true) - 0.5 * (3 * h + 5 * h)) <= 1e-12);

    // translating a compactly supported bump of unit mass by s costs exactly |s|
    auto bump = [&](double cx) {
        ScalarField m = ScalarField::sample(g, [&](Vec2 x) { return std::max(0.0, 0.09 - norm2(x - Vec2{cx, 0.05})); });
        m *= 1.0 / m.integral();
        return m;
    };
    const ScalarField m0 = bump(-0.15);
    std::vector<double> hm;
    for (int s = 1; s <= 3; ++s) {
        const ScalarField shifted = bump(-0.15 + s * h);
        CHECK(std::abs(wasserstein1_exact(m0, shifted) - s * h) <= 1e-9);
        hm.push_back(hminus1_distance(m0, shifted));
    }
    // the periodic cost never exceeds the Euclidean one
    CHECK(wasserstein1_exact(m0, bump(0.05), true) <= wasserstein1_exact(m0, bump(0.05)) + 1e-12);
    // both metrics grow with the shift
    CHECK(hm[0] < hm[1]);
    CHECK(hm[1] < hm[2]);

    CHECK_THROWS_AS(wasserstein1_exact(a, ScalarField(g)), ConfigError);
    CHECK_THROWS_AS(wasserstein1_exact(ScalarField(Grid2D::unit_torus(64)), ScalarField(Grid2D::unit_torus(64))),
                    ConfigError);
}

TEST_CASE("metric series validation") {
    MetricSeries s;
    s.axis = {1, 2};
    s.values = {0.5};
    CHECK_THROWS_AS(s.validate(), NumericalError);
    s.values = {0.5, NAN};
    CHECK_THROWS_AS(s.validate(), NumericalError);
    s.values = {0.5, 0.25};
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("single particle tracks the blob centroid") {
    ConvergenceSpec spec;
    spec.grid_n = 256;
    spec.box = 6.0;
    spec.bandwidth = 0.2;
    spec.params.force.constant = {1.0, 0.5};
    const TrackingResult r = run_single_tracking(spec, 0.3);
    CHECK(norm(r.particle - Vec2{0.3, 0.15}) <= 1e-12);
    CHECK(r.gap <= 2 * r.bandwidth);
    MESSAGE("tracking gap " << r.gap);

    ConvergenceSpec mixed = spec;
    mixed.params.alpha = 1 / std::sqrt(2.0);
    mixed.params.beta = 1 / std::sqrt(2.0);
    CHECK(run_single_tracking(mixed, 0.3).gap <= 2 * r.bandwidth);
}

TEST_CASE("convergence driver bookkeeping") {
    ConvergenceSpec spec;
    spec.counts = {16, 64};
    spec.checkpoints = {0.02, 0.04};
    spec.grid_n = 96;
    spec.box = 6.0;
    spec.bandwidth = 0.3;
    const ConvergenceResult r = run_convergence(spec);
    CHECK(r.failures.empty());
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows[0].n == 16);
    CHECK(r.rows[3].t == 0.04);
    for (const auto& row : r.rows) CHECK((std::isfinite(row.distance) && row.distance > 0.0));
    CHECK(r.ratios.size() == 1);
    std::ostringstream os;
    write_convergence_csv(os, r);
    CHECK(os.str().rfind("N,t,distance\n16,", 0) == 0);

    // a box too small for the free-space solver fails every sub-run without throwing
    ConvergenceSpec tight = spec;
    tight.box = 1.0;
    tight.grid_n = 32;
    tight.bandwidth = 0.1;
    const ConvergenceResult f = run_convergence(tight);
    CHECK(f.failures.size() == 2);
    CHECK(!f.pass);

    ConvergenceSpec bad = spec;
    bad.params.lambda = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = spec;
    bad.counts.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("current-velocity curves") {
    CurveSpec wash;
    wash.landscape = std::make_shared<const PinningLandscape>(PinningLandscape(make_cosine1d_cell(-1 / (2 * pi))));
    for (int k = 0; k <= 12; ++k) wash.forces.push_back(0.25 * k);
    const CurveResult r = current_velocity_curve(wash);
    REQUIRE(r.critical_force.has_value());
    CHECK(std::abs(*r.critical_force - 1.0) <= 1e-4);
    for (std::size_t k = 0; k < wash.forces.size(); ++k) {
        const double F = wash.forces[k];
        if (F <= *r.critical_force) {
            CHECK(r.curve.values[k] == 0.0);
            CHECK(r.velocities[k] == Vec2{});
        } else {
            const double exact = std::sqrt(F * F - 1.0);
            CHECK(std::abs(r.curve.values[k] - exact) <= 1e-3 * exact);
        }
    }

    CurveSpec flat = wash;
    flat.landscape = std::make_shared<const PinningLandscape>(PinningLandscape::zero());
    flat.alpha = 0.6;
    flat.beta = 0.8;
    flat.direction = {1.0, 1.0};
    flat.forces = {0.0, 0.5, 1.0, 2.0};
    const CurveResult f = current_velocity_curve(flat);
    for (std::size_t k = 0; k < flat.forces.size(); ++k) CHECK(std::abs(f.curve.values[k] - flat.forces[k]) <= 1e-9);

    CurveSpec warm = wash;
    warm.temperature = 0.2;
    warm.measure.resolution = 64;
    warm.forces = {0.05, 0.5, 1.0, 2.0};
    const CurveResult w = current_velocity_curve(warm);
    CHECK(!w.critical_force.has_value());
    for (double v : w.curve.values) CHECK(v > 0.0);

    std::ostringstream csv, svg;
    write_curve_csv(csv, r, wash.direction);
    CHECK(csv.str().rfind("F,Fx,Fy,Vx,Vy,V\n", 0) == 0);
    write_svg_polyline(svg, r.curve.axis, r.curve.values, "washboard <T0 = 0>", "|F|", "|V|");
    const std::string s = svg.str();
    CHECK(s.find("<polyline") != std::string::npos);
    CHECK(s.find("&lt;T0 = 0&gt;") != std::string::npos);
    CHECK(s.find("</svg>") != std::string::npos);

    CurveSpec bad = wash;
    bad.forces = {1.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("configuration parsing") {
    try {
        check_json_syntax("{\n  \"a\": 1,\n  \"b\": ]\n}", "cfg.json");
        FAIL("malformed JSON accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cfg.json: line 3, column 8") != std::string::npos);
    }
    CHECK_THROWS_AS(curve_from_json(R"({"landscape": {"kind": "washboard"}, "forces": [0, 1], "colour": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(curve_from_json(R"({"forces": [0, 1]})"), ConfigError);

    const Params p = params_from_json_text(R"({"alpha": 0, "beta": 1, "lambda": 2, "regime": "GL2"})");
    CHECK(p.kappa == 2.0);
    CHECK_THROWS_AS(params_from_json_text(R"({"alpha": 1, "beta": 1})"), ConfigError);

    const std::string seeded = override_seed(R"({"experiment": "glsweep"})", 42);
    CHECK(seeded.find("\"seed\": 42") != std::string::npos);

    const ExperimentSpec e = experiment_from_json(
        R"({"experiment": "stickslip", "seed": 5, "landscape": {"kind": "washboard"}, "force_range": {"min": 0, "max": 2, "count": 5}})");
    CHECK(e.kind == ExperimentKind::stickslip);
    CHECK(e.seeds == std::vector<std::uint64_t>{5});
    REQUIRE(e.curve.has_value());
    CHECK(e.curve->forces.size() == 5);
    CHECK_THROWS_AS(experiment_from_json(R"({"experiment": "arrhenius", "landscape": {"kind": "washboard"}, "forces": [0, 1]})"),
                    ConfigError);
    CHECK_THROWS_AS(experiment_from_json(R"({"experiment": "bogus"})"), ConfigError);

    const ConvergenceSpec lake = convergence_from_json(R"({"variant": "lake", "counts": [16]})");
    CHECK(lake.variant == MeanFieldVariant::ConservativeLake);
    CHECK(lake.params.alpha == 0.0);
    CHECK(lake.params.beta == 1.0);

    const ParticleRunConfig pr = particle_run_from_json(
        R"({"seed": 3, "initial": {"kind": "blob", "N": 10, "radius": 0.2}, "t_end": 0.1})");
    CHECK(pr.ensemble.size() == 10);
    CHECK(pr.ensemble.seed == 3);

    const MeanFieldRunConfig mf = meanfield_run_from_json(
        R"({"grid": {"n": 32, "L": 2}, "initial": {"kind": "gaussian", "radius": 0.2, "mass": 2}, "t_end": 0.1})");
    CHECK(std::abs(mf.m0.integral() - 2.0) <= 1e-12);
}

TEST_CASE("command-line entry point") {
    const fs::path dir = scratch_dir("cli");
    CHECK(run_cli({}) == exit_usage);
    CHECK(run_cli({"frobnicate"}) == exit_usage);

    write_file(dir / "broken.json", "{\n  \"landscape\": {\"kind\": \"washboard\"},\n  \"forces\": [0, 1,\n}\n");
    CHECK(run_cli({"curve", "--config", (dir / "broken.json").string(), "--out", (dir / "broken").string()}) ==
          exit_config);
    CHECK(run_cli({"curve", "--config", (dir / "missing.json").string()}) == exit_config);
    CHECK(run_cli({"curve", "--out", (dir / "x").string()}) == exit_config);

    write_file(dir / "washboard.json",
               R"({"landscape": {"kind": "washboard"}, "force_range": {"min": 0, "max": 2, "count": 5}})");
    const fs::path run1 = dir / "run1";
    CHECK(run_cli({"curve", "--config", (dir / "washboard.json").string(), "--out", run1.string()}) == exit_ok);
    CHECK(fs::exists(run1 / "curve.csv"));
    CHECK(fs::exists(run1 / "curve.svg"));
    const std::string manifest = slurp(run1 / "manifest.json");
    for (const char* key : {"config_hash", "versions", "seeds", "wall_clock_seconds", "critical_force"})
        CHECK(manifest.find(key) != std::string::npos);

    // numerical failure: a time step far beyond the stability bound
    write_file(dir / "unstable.json",
               R"({"grid": {"n": 64, "L": 2}, "params": {"lambda": 3.14}, "initial": {"kind": "gaussian", "radius": 0.1},
                   "t_end": 0.5, "dt": 0.5, "records": 1})");
    const fs::path bad = dir / "unstable";
    CHECK(run_cli({"meanfield", "--config", (dir / "unstable.json").string(), "--out", bad.string()}) ==
          exit_numerical);
    const std::string failure = slurp(bad / "failure.json");
    CHECK(failure.find("\"kind\": \"numerical\"") != std::string::npos);
    CHECK(failure.find("stability bound") != std::string::npos);

    // determinism: same seed twice, and across worker counts
    write_file(dir / "noisy.json",
               R"({"params": {"temperature": 0.05, "force": [0.3, 0.1]}, "landscape": {"kind": "eggbox", "eta": 0.2},
                   "initial": {"kind": "blob", "N": 24, "radius": 0.3}, "t_end": 0.05, "dt": 0.001, "record_every": 10})");
    std::vector<std::string> traj;
    for (const char* threads : {"1", "1", "4", "8"}) {
        const fs::path out = dir / (std::string("noisy_") + threads + "_" + std::to_string(traj.size()));
        CHECK(run_cli({"particles", "--config", (dir / "noisy.json").string(), "--out", out.string(), "--seed", "7",
                       "--threads", threads}) == exit_ok);
        traj.push_back(slurp(out / "trajectory.csv") + slurp(out / "diagnostics.csv"));
    }
    set_thread_count(1);
    CHECK(traj[0].size() > 100);
    for (const auto& t : traj) CHECK(t == traj[0]);
    const fs::path other = dir / "noisy_seed8";
    CHECK(run_cli({"particles", "--config", (dir / "noisy.json").string(), "--out", other.string(), "--seed", "8"}) ==
          exit_ok);
    CHECK(slurp(other / "trajectory.csv") != traj[0].substr(0, slurp(other / "trajectory.csv").size()));
    fs::remove_all(dir);
}
