#include "pinflow/config.hpp"

#include "json_detail.hpp"
#include "pinflow/error.hpp"
#include "pinflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

namespace pinflow {

using detail::get_or;
using detail::get_req;
using detail::get_vec2;
using detail::json;

std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::converge: return "converge";
    case ExperimentKind::stickslip: return "stickslip";
    case ExperimentKind::arrhenius: return "arrhenius";
    case ExperimentKind::layer: return "layer";
    case ExperimentKind::glsweep: return "glsweep";
    case ExperimentKind::single_run: return "single-run";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::converge, ExperimentKind::stickslip, ExperimentKind::arrhenius,
                   ExperimentKind::layer, ExperimentKind::glsweep, ExperimentKind::single_run})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

namespace {

json parse(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k < end; ++k) {
            if (text[k] == '\n') ++line, col = 1;
            else ++col;
        }
        std::string msg = e.what();
        if (const auto p = msg.find("column"); p != std::string::npos)
            if (const auto q = msg.find(": ", p); q != std::string::npos) msg = msg.substr(q + 2);
        throw ConfigError(source + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    }
}

json parse_object(const std::string& text, const std::string& source) {
    json j = parse(text, source);
    if (!j.is_object()) throw ConfigError(source + ": top level must be a JSON object");
    return j;
}

/// Rejects members outside the allowed set (plus "$schema", "description", "experiment", "seed")
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "$schema" || key == "description" || key == "experiment" || key == "seed") continue;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError("unknown field '" + key + "' in " + where);
    }
}

std::vector<double> get_list(const json& j, const char* key, std::vector<double> fallback) {
    auto v = get_or<std::vector<double>>(j, key, std::move(fallback));
    for (double x : v)
        if (!std::isfinite(x)) throw ConfigError(std::string("field '") + key + "' has a non-finite entry");
    return v;
}

std::shared_ptr<const PinningLandscape> optional_landscape(const json& j) {
    if (!j.contains("landscape") || j.at("landscape").is_null()) return nullptr;
    return std::make_shared<const PinningLandscape>(detail::landscape_from_json(j.at("landscape")));
}

std::shared_ptr<const PinningLandscape> required_landscape(const json& j) {
    if (!j.contains("landscape")) throw ConfigError("missing required field 'landscape'");
    return optional_landscape(j);
}

Params params_with_base(const json& j, Params p) {
    check_keys(j, {"alpha", "beta", "lambda", "kappa", "temperature", "force", "regime"}, "params");
    p.alpha = get_or(j, "alpha", p.alpha);
    p.beta = get_or(j, "beta", p.beta);
    p.lambda = get_or(j, "lambda", p.lambda);
    p.temperature = get_or(j, "temperature", p.temperature);
    p.force.constant = get_vec2(j, "force", p.force.constant);
    if (j.contains("regime")) {
        p.regime = parse_regime(get_req<std::string>(j, "regime"));
        if (!j.contains("kappa"))
            if (auto k = regime_kappa(*p.regime, p.lambda)) p.kappa = *k;
    }
    p.kappa = get_or(j, "kappa", p.kappa);
    p.validate();
    return p;
}

Params member_params(const json& j, Params base = {}) {
    if (!j.contains("params")) {
        base.validate();
        return base;
    }
    return params_with_base(j.at("params"), base);
}

std::uint64_t seed_of(const json& j) { return get_or<std::uint64_t>(j, "seed", 0); }

int positive_int(const json& j, const char* key, int fallback) {
    const int v = get_or(j, key, fallback);
    if (v < 1) throw ConfigError(std::string("field '") + key + "' must be positive");
    return v;
}

double positive(const json& j, const char* key, double fallback) {
    const double v = get_or(j, key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("field '") + key + "' must be positive");
    return v;
}

std::vector<double> force_list(const json& j) {
    if (j.contains("forces")) return get_list(j, "forces", {});
    if (j.contains("force_range")) {
        const json& r = j.at("force_range");
        check_keys(r, {"min", "max", "count"}, "force_range");
        const double lo = get_req<double>(r, "min"), hi = get_req<double>(r, "max");
        const int n = get_req<int>(r, "count");
        if (n < 2 || !(hi > lo)) throw ConfigError("force_range needs count >= 2 and max > min");
        std::vector<double> f(n);
        for (int k = 0; k < n; ++k) f[k] = lo + (hi - lo) * k / (n - 1);
        return f;
    }
    throw ConfigError("curve config needs 'forces' or 'force_range'");
}

} // namespace

void check_json_syntax(const std::string& text, const std::string& source) { parse(text, source); }

std::string load_config_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string text = ss.str();
    check_json_syntax(text, path);
    return text;
}

std::string override_seed(const std::string& text, std::uint64_t seed) {
    json j = parse_object(text, "config");
    j["seed"] = seed;
    return j.dump(2);
}

namespace detail {

Params params_from_json(const json& j) { return params_with_base(j, Params{}); }

} // namespace detail

Params params_from_json_text(const std::string& text) { return detail::params_from_json(parse(text, "params")); }

ParticleRunConfig particle_run_from_json(const std::string& text) {
    const json j = parse_object(text, "particles config");
    check_keys(j, {"params", "landscape", "initial", "t_end", "dt", "record_every", "scheme", "stochastic"},
               "particles config");
    ParticleRunConfig c;
    c.ensemble.params = member_params(j);
    c.ensemble.landscape = optional_landscape(j);
    c.ensemble.seed = seed_of(j);
    json init = get_req<json>(j, "initial");
    if (init.is_object() && get_or<std::string>(init, "kind", "blob") == "blob" && !init.contains("seed"))
        init["seed"] = c.ensemble.seed;
    c.ensemble.positions = detail::initial_positions_from_json(init);
    c.t_end = get_req<double>(j, "t_end");
    c.dt = positive(j, "dt", c.dt);
    c.record_every = positive_int(j, "record_every", c.record_every);
    const std::string scheme = get_or<std::string>(j, "scheme", "rk4");
    if (scheme == "rk4") c.options.scheme = StepScheme::rk4;
    else if (scheme == "euler") c.options.scheme = StepScheme::euler;
    else throw ConfigError("unknown particle scheme '" + scheme + "'");
    c.options.stochastic = get_or(j, "stochastic", c.ensemble.params.temperature > 0.0);
    if (c.t_end < 0.0 || !std::isfinite(c.t_end)) throw ConfigError("t_end must be non-negative");
    c.ensemble.validate();
    return c;
}

MeanFieldRunConfig meanfield_run_from_json(const std::string& text) {
    const json j = parse_object(text, "meanfield config");
    check_keys(j, {"variant", "grid", "params", "landscape", "initial", "t_end", "dt", "scheme", "transport",
                   "adaptive", "dealias", "records"},
               "meanfield config");
    MeanFieldRunConfig c;
    c.seed = seed_of(j);
    const MeanFieldVariant variant = parse_variant(get_or<std::string>(j, "variant", "incompressible_dissipative"));
    const json grid = get_req<json>(j, "grid");
    check_keys(grid, {"n", "L", "boundary"}, "grid");
    const int n = positive_int(grid, "n", 128);
    const double L = positive(grid, "L", 1.0);
    const std::string boundary = get_or<std::string>(grid, "boundary", "periodic");
    MeanFieldOptions opt;
    if (boundary == "freespace") opt.poisson = PoissonMode::freespace;
    else if (boundary != "periodic") throw ConfigError("grid boundary must be 'periodic' or 'freespace'");
    const std::string transport = get_or<std::string>(j, "transport", "spectral");
    if (transport == "upwind") opt.transport = TransportScheme::upwind;
    else if (transport != "spectral") throw ConfigError("unknown transport scheme '" + transport + "'");
    opt.adaptive = get_or(j, "adaptive", false);
    opt.dealias = get_or(j, "dealias", true);
    const Grid2D g = Grid2D::centered_box(n, L);
    c.model = std::make_shared<const MeanFieldModel>(g, variant, member_params(j), optional_landscape(j), opt);

    const json init = get_req<json>(j, "initial");
    const std::string kind = get_or<std::string>(init, "kind", "gaussian");
    if (kind == "gaussian") {
        check_keys(init, {"kind", "center", "radius", "aspect", "mass"}, "initial");
        const Vec2 c0 = get_vec2(init, "center", {0.0, 0.0});
        const double r = positive(init, "radius", 0.1), asp = positive(init, "aspect", 1.0);
        const double mass = positive(init, "mass", 1.0);
        ScalarField m = ScalarField::sample(g, [&](Vec2 x) {
            const Vec2 d = x - c0;
            return std::exp(-0.5 * (d.x * d.x + d.y * d.y / (asp * asp)) / (r * r));
        });
        m *= mass / m.integral();
        c.m0 = std::move(m);
    } else if (kind == "particles") {
        json blob = init;
        blob.erase("kind");
        const double bw = get_req<double>(init, "bandwidth");
        blob.erase("bandwidth");
        if (!blob.contains("seed")) blob["seed"] = c.seed;
        c.m0 = deposit_empirical(sample_blob(detail::blob_from_json(blob)), g, bw, opt.poisson == PoissonMode::periodic_meanfree);
    } else {
        throw ConfigError("unknown mean-field initial condition '" + kind + "'");
    }
    c.t_end = get_req<double>(j, "t_end");
    if (c.t_end < 0.0 || !std::isfinite(c.t_end)) throw ConfigError("t_end must be non-negative");
    c.dt = positive(j, "dt", c.dt);
    const std::string scheme = get_or<std::string>(j, "scheme", "ssprk3");
    if (scheme == "ssprk3") c.scheme = TimeScheme::ssprk3;
    else if (scheme == "rk4") c.scheme = TimeScheme::rk4;
    else throw ConfigError("unknown time scheme '" + scheme + "'");
    c.records = positive_int(j, "records", c.records);
    return c;
}

HomogRunConfig homog_run_from_json(const std::string& text) {
    const json j = parse_object(text, "homog config");
    check_keys(j, {"mode", "landscape", "alpha", "beta", "force", "temperature", "direction", "temperatures",
                   "resolution", "horizon", "f_max", "directions", "radii"},
               "homog config");
    HomogRunConfig c;
    const std::string mode = get_or<std::string>(j, "mode", "velocity");
    if (mode == "measure") c.mode = HomogMode::measure;
    else if (mode == "velocity") c.mode = HomogMode::velocity;
    else if (mode == "depinning") c.mode = HomogMode::depinning;
    else if (mode == "arrhenius") c.mode = HomogMode::arrhenius;
    else if (mode == "table") c.mode = HomogMode::table;
    else throw ConfigError("unknown homog mode '" + mode + "'");
    c.landscape = required_landscape(j);
    c.alpha = get_or(j, "alpha", 1.0);
    c.beta = get_or(j, "beta", 0.0);
    if (c.alpha < 0.0 || std::abs(c.alpha * c.alpha + c.beta * c.beta - 1.0) > 1e-12)
        throw ConfigError("alpha^2 + beta^2 must equal 1 with alpha >= 0");
    c.force = get_vec2(j, "force", {0.0, 0.0});
    c.temperature = get_or(j, "temperature", 0.0);
    if (c.temperature < 0.0) throw ConfigError("temperature must be non-negative");
    c.direction = get_vec2(j, "direction", {1.0, 0.0});
    if (norm(c.direction) == 0.0) throw ConfigError("direction must be non-zero");
    c.temperatures = get_list(j, "temperatures", {});
    c.measure.resolution = positive_int(j, "resolution", c.measure.resolution);
    c.flow.horizon = positive(j, "horizon", c.flow.horizon);
    c.depinning.flow = c.flow;
    c.depinning.f_max = positive(j, "f_max", c.depinning.f_max);
    c.table.directions = positive_int(j, "directions", c.table.directions);
    c.table.radii = positive_int(j, "radii", c.table.radii);
    c.table.f_max = c.depinning.f_max;
    c.table.temperature = c.temperature;
    c.table.measure = c.measure;
    c.table.flow = c.flow;
    c.table.depinning = c.depinning;
    if (c.mode == HomogMode::measure && c.temperature <= 0.0)
        throw ConfigError("the measure mode needs a positive temperature");
    if (c.mode == HomogMode::arrhenius && c.temperatures.empty())
        throw ConfigError("the arrhenius mode needs a 'temperatures' list");
    return c;
}

ConvergenceSpec convergence_from_json(const std::string& text) {
    const json j = parse_object(text, "converge config");
    check_keys(j, {"variant", "params", "landscape", "counts", "blob", "grid", "checkpoints", "particle_dt",
                   "bandwidth", "bandwidth_exponent", "min_ratio", "margin_tolerance"},
               "converge config");
    ConvergenceSpec s;
    const std::string v = get_or<std::string>(j, "variant", "dissipative");
    Params base = s.params;
    if (v == "dissipative" || v == to_string(MeanFieldVariant::IncompressibleDissipative)) {
        s.variant = MeanFieldVariant::IncompressibleDissipative;
    } else if (v == "lake" || v == to_string(MeanFieldVariant::ConservativeLake)) {
        s.variant = MeanFieldVariant::ConservativeLake;
        base.alpha = 0.0;
        base.beta = 1.0;
    } else {
        throw ConfigError("converge variant must be 'dissipative' or 'lake'");
    }
    s.params = member_params(j, base);
    s.landscape = optional_landscape(j);
    if (j.contains("counts")) s.counts = get_req<std::vector<std::size_t>>(j, "counts");
    if (j.contains("blob")) {
        const json& b = j.at("blob");
        check_keys(b, {"center", "radius", "aspect", "sampler"}, "blob");
        s.blob.center = get_vec2(b, "center", s.blob.center);
        s.blob.radius = positive(b, "radius", s.blob.radius);
        s.blob.aspect = positive(b, "aspect", s.blob.aspect);
        const std::string sampler = get_or<std::string>(b, "sampler", "sunflower");
        if (sampler == "sunflower") s.blob.sampler = BlobSampler::sunflower;
        else if (sampler == "gaussian") s.blob.sampler = BlobSampler::gaussian;
        else throw ConfigError("unknown blob sampler '" + sampler + "'");
    }
    s.blob.seed = seed_of(j);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"n", "L"}, "grid");
        s.grid_n = positive_int(g, "n", s.grid_n);
        s.box = positive(g, "L", s.box);
    }
    s.checkpoints = get_list(j, "checkpoints", s.checkpoints);
    s.particle_dt = positive(j, "particle_dt", s.particle_dt);
    s.bandwidth = positive(j, "bandwidth", s.bandwidth);
    s.bandwidth_exponent = get_or(j, "bandwidth_exponent", s.bandwidth_exponent);
    s.min_ratio = positive(j, "min_ratio", s.min_ratio);
    s.margin_tolerance = positive(j, "margin_tolerance", s.margin_tolerance);
    s.validate();
    return s;
}

CurveSpec curve_from_json(const std::string& text) {
    const json j = parse_object(text, "curve config");
    check_keys(j, {"landscape", "alpha", "beta", "direction", "forces", "force_range", "temperature", "resolution",
                   "horizon"},
               "curve config");
    CurveSpec s;
    s.landscape = required_landscape(j);
    s.alpha = get_or(j, "alpha", 1.0);
    s.beta = get_or(j, "beta", 0.0);
    s.direction = get_vec2(j, "direction", {1.0, 0.0});
    s.forces = force_list(j);
    s.temperature = get_or(j, "temperature", 0.0);
    s.measure.resolution = positive_int(j, "resolution", s.measure.resolution);
    s.depinning.flow.horizon = positive(j, "horizon", s.depinning.flow.horizon);
    s.validate();
    return s;
}

LayerSpec layer_from_json(const std::string& text) {
    const json j = parse_object(text, "layer config");
    check_keys(j, {"landscape", "alpha", "beta", "kappa", "force", "v_slow", "x_slow", "resolution", "checkpoints",
                   "well_radius", "cfl"},
               "layer config");
    LayerSpec s;
    s.landscape = required_landscape(j);
    s.cell.alpha = get_or(j, "alpha", 1.0);
    s.cell.beta = get_or(j, "beta", 0.0);
    s.cell.kappa = get_or(j, "kappa", 0.0);
    s.cell.force = get_vec2(j, "force", {0.0, 0.0});
    s.cell.v_slow = get_vec2(j, "v_slow", {0.0, 0.0});
    s.cell.x_slow = get_vec2(j, "x_slow", {0.0, 0.0});
    if (s.cell.alpha < 0.0 || std::abs(s.cell.alpha * s.cell.alpha + s.cell.beta * s.cell.beta - 1.0) > 1e-12)
        throw ConfigError("alpha^2 + beta^2 must equal 1 with alpha >= 0");
    s.resolution = positive_int(j, "resolution", s.resolution);
    s.checkpoints = get_list(j, "checkpoints", s.checkpoints);
    s.well_radius = positive(j, "well_radius", s.well_radius);
    s.cfl = positive(j, "cfl", s.cfl);
    s.validate();
    return s;
}

GlSweepSpec glsweep_from_json(const std::string& text) {
    const json j = parse_object(text, "glfield config");
    check_keys(j, {"landscape", "epsilons", "vortices", "profile", "half_width", "R", "z"}, "glfield config");
    GlSweepSpec s;
    s.landscape = optional_landscape(j);
    s.epsilons = get_list(j, "epsilons", s.epsilons);
    if (j.contains("vortices")) {
        const json& list = j.at("vortices");
        if (!list.is_array() || list.empty()) throw ConfigError("'vortices' must be a non-empty array");
        s.centers.clear();
        s.degrees.clear();
        for (const json& v : list) {
            check_keys(v, {"center", "degree"}, "vortex");
            s.centers.push_back(get_vec2(v, "center", {0.0, 0.0}));
            s.degrees.push_back(get_or(v, "degree", 1));
        }
    }
    const std::string profile = get_or<std::string>(j, "profile", "tanh");
    if (profile == "tanh") s.profile = VortexProfile::tanh;
    else if (profile == "polynomial") s.profile = VortexProfile::polynomial;
    else throw ConfigError("unknown vortex profile '" + profile + "'");
    s.half_width = positive(j, "half_width", s.half_width);
    s.R = positive(j, "R", s.R);
    s.z = get_vec2(j, "z", s.z);
    s.validate();
    return s;
}

void ExperimentSpec::validate() const {
    switch (kind) {
    case ExperimentKind::converge: require(convergence.has_value(), "converge experiment without settings"); convergence->validate(); break;
    case ExperimentKind::stickslip:
    case ExperimentKind::arrhenius: require(curve.has_value(), "curve experiment without settings"); curve->validate(); break;
    case ExperimentKind::layer: require(layer.has_value(), "layer experiment without settings"); layer->validate(); break;
    case ExperimentKind::glsweep: require(glsweep.has_value(), "glsweep experiment without settings"); glsweep->validate(); break;
    case ExperimentKind::single_run: break;
    }
    require(!seeds.empty(), "experiment seed list is empty");
}

ExperimentSpec experiment_from_json(const std::string& text) {
    const json j = parse_object(text, "experiment config");
    ExperimentSpec s;
    s.kind = parse_experiment_kind(get_req<std::string>(j, "experiment"));
    s.seeds = {seed_of(j)};
    switch (s.kind) {
    case ExperimentKind::converge: s.convergence = convergence_from_json(text); break;
    case ExperimentKind::stickslip:
    case ExperimentKind::arrhenius:
        s.curve = curve_from_json(text);
        if ((s.kind == ExperimentKind::stickslip) != (s.curve->temperature == 0.0))
            throw ConfigError("stickslip curves need temperature 0, arrhenius curves a positive temperature");
        break;
    case ExperimentKind::layer: s.layer = layer_from_json(text); break;
    case ExperimentKind::glsweep: s.glsweep = glsweep_from_json(text); break;
    case ExperimentKind::single_run: break;
    }
    s.validate();
    return s;
}

} // namespace pinflow
