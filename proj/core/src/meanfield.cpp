#include "pinflow/meanfield.hpp"
#include "pinflow/error.hpp"
#include "pinflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pinflow {

std::string to_string(MeanFieldVariant v) {
    switch (v) {
    case MeanFieldVariant::IncompressibleDissipative: return "incompressible_dissipative";
    case MeanFieldVariant::CompressibleDissipative: return "compressible_dissipative";
    case MeanFieldVariant::DegenerateParabolic: return "degenerate_parabolic";
    case MeanFieldVariant::ConservativeLake: return "conservative_lake";
    }
    return "?";
}

MeanFieldVariant parse_variant(const std::string& s) {
    for (auto v : {MeanFieldVariant::IncompressibleDissipative, MeanFieldVariant::CompressibleDissipative,
                   MeanFieldVariant::DegenerateParabolic, MeanFieldVariant::ConservativeLake})
        if (s == to_string(v)) return v;
    throw ConfigError("unknown mean-field variant '" + s + "'");
}

MeanFieldModel::MeanFieldModel(const Grid2D& grid, MeanFieldVariant variant, Params params,
                               std::shared_ptr<const PinningLandscape> landscape, MeanFieldOptions options)
    : grid_(grid), variant_(variant), params_(std::move(params)), landscape_(std::move(landscape)),
      options_(options), h_(grid), gradh_(grid), a_(grid, 1.0), force_(grid) {
    params_.validate();
    require(options_.cfl > 0.0 && options_.cfl <= 1.0, "CFL number must lie in (0, 1]");
    require(options_.divergence_diffusion_scale > 0.0, "divergence diffusion scale must be positive");
    if (variant_ == MeanFieldVariant::CompressibleDissipative)
        require(params_.alpha > 0.0, "the compressible variant needs alpha > 0");
    if (landscape_) {
        h_ = landscape_->sample_h(grid);
        gradh_ = landscape_->sample_gradh(grid);
        a_ = landscape_->sample_a(grid);
    }
    force_ = VectorField::sample(grid, [this](Vec2 x) { return params_.force(x); });
    unit_weight_ = std::all_of(a_.values().begin(), a_.values().end(), [](double v) { return v == 1.0; });
    if (options_.poisson == PoissonMode::freespace)
        require(unit_weight_, "free-space reconstruction needs a unit pinning weight");
}

MeanFieldState make_state(std::shared_ptr<const MeanFieldModel> model, ScalarField m, std::optional<ScalarField> d) {
    require(model != nullptr, "state needs a model");
    require(model->variant() != MeanFieldVariant::DegenerateParabolic,
            "the degenerate variant is built from its velocity field");
    require(m.grid() == model->grid(), "vorticity grid does not match the model");
    require(m.all_finite(), "vorticity must be finite");
    ScalarField dd = d ? *d : ScalarField(model->grid());
    require(dd.grid() == model->grid() && dd.all_finite(), "divergence field must be finite on the model grid");
    const Grid2D g = model->grid();
    return MeanFieldState{std::move(model), std::move(m), std::move(dd), VectorField(g), 0.0};
}

MeanFieldState make_velocity_state(std::shared_ptr<const MeanFieldModel> model, VectorField v) {
    require(model != nullptr, "state needs a model");
    require(model->variant() == MeanFieldVariant::DegenerateParabolic, "only the degenerate variant carries v");
    require(v.grid() == model->grid() && v.all_finite(), "velocity must be finite on the model grid");
    const Grid2D g = model->grid();
    ScalarField m = curl(v);
    return MeanFieldState{std::move(model), std::move(m), ScalarField(g), std::move(v), 0.0};
}

VectorField reconstruct_velocity(const ScalarField& m, const ScalarField& d, const ScalarField& a, PoissonMode mode,
                                 const FreespaceOptions& fs) {
    const Grid2D& g = m.grid();
    require(d.grid() == g && a.grid() == g, "reconstruction fields live on different grids");
    const bool unit = std::all_of(a.values().begin(), a.values().end(), [](double v) { return v == 1.0; });
    if (mode == PoissonMode::freespace) {
        require(unit, "free-space reconstruction needs a unit pinning weight");
        VectorField v = perp(freespace_gradient(m, fs));
        if (d.max_abs() > 0.0) v += freespace_gradient(d, fs);
        return v;
    }
    VectorField v(g);
    if (m.max_abs() > 0.0) {
        if (unit) {
            v = perp_gradient(poisson_solve(m, PoissonMode::periodic_meanfree));
        } else {
            const ScalarField psi = elliptic_solve_weighted(m, a, EllipticForm::div_ainv_grad).phi;
            const VectorField gp = perp_gradient(psi);
            for (std::size_t k = 0; k < v.size(); ++k) v.set(k, (1.0 / a[k]) * gp[k]);
        }
    }
    if (d.max_abs() > 0.0) {
        const ScalarField phi = unit ? poisson_solve(d, PoissonMode::periodic_meanfree)
                                     : elliptic_solve_weighted(d, a, EllipticForm::div_a_grad).phi;
        v += gradient(phi);
    }
    return v;
}

VectorField velocity_of(const MeanFieldState& s) {
    const MeanFieldModel& md = *s.model;
    switch (md.variant()) {
    case MeanFieldVariant::DegenerateParabolic: return s.v;
    case MeanFieldVariant::IncompressibleDissipative:
        return reconstruct_velocity(s.m, ScalarField(md.grid()), ScalarField(md.grid(), 1.0), md.options().poisson,
                                    md.options().freespace);
    case MeanFieldVariant::CompressibleDissipative:
        return reconstruct_velocity(s.m, s.d, md.a(), md.options().poisson, md.options().freespace);
    case MeanFieldVariant::ConservativeLake:
        return reconstruct_velocity(s.m, ScalarField(md.grid()), md.a(), md.options().poisson, md.options().freespace);
    }
    return VectorField(md.grid());
}

Vec2 dissipative_transport(double alpha, double beta, Vec2 gradh, Vec2 force, Vec2 v, double coef) {
    return -mixedflow_apply(alpha, beta, gradh - force + coef * perp(v));
}

VectorField transport_velocity(const MeanFieldState& s, const VectorField& v) {
    const MeanFieldModel& md = *s.model;
    const Params& p = md.params();
    VectorField u(md.grid());
    const double coef = 2.0 * p.lambda;
    if (md.variant() == MeanFieldVariant::ConservativeLake) {
        for (std::size_t k = 0; k < u.size(); ++k) u.set(k, -(perp(md.force()[k]) + coef * v[k]));
    } else if (md.variant() == MeanFieldVariant::DegenerateParabolic) {
        for (std::size_t k = 0; k < u.size(); ++k) u.set(k, perp(md.force()[k]) + 2.0 * v[k]);
    } else {
        for (std::size_t k = 0; k < u.size(); ++k)
            u.set(k, dissipative_transport(p.alpha, p.beta, md.gradh()[k], md.force()[k], v[k], coef));
    }
    return u;
}

ScalarField upwind_divergence(const VectorField& u, const ScalarField& m) {
    const Grid2D& g = m.grid();
    const int nx = g.nx(), ny = g.ny();
    ScalarField out(g);
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = g.index(i, j), e = g.wrap_index(i + 1, j), n = g.wrap_index(i, j + 1);
            const double ux = 0.5 * (u.x()[c] + u.x()[e]);
            const double fx = ux > 0.0 ? ux * m[c] : ux * m[e];
            out[c] -= fx * ihx;
            out[e] += fx * ihx;
            const double uy = 0.5 * (u.y()[c] + u.y()[n]);
            const double fy = uy > 0.0 ? uy * m[c] : uy * m[n];
            out[c] -= fy * ihy;
            out[n] += fy * ihy;
        }
    return out;
}

namespace {

ScalarField maybe_dealias(const ScalarField& f, bool on) { return on ? dealias(f) : f; }

/// Dealiased pointwise product of a vector and a scalar field; filter_u = false keeps a
/// non-periodic velocity (free-space runs) out of the spectral filter
VectorField product(const VectorField& u, const ScalarField& m, bool on, bool filter_u = true) {
    const ScalarField mm = maybe_dealias(m, on);
    const ScalarField ux = maybe_dealias(u.x(), on && filter_u), uy = maybe_dealias(u.y(), on && filter_u);
    return VectorField(maybe_dealias(hadamard(ux, mm), on), maybe_dealias(hadamard(uy, mm), on));
}

/// -div(u m) by the configured transport scheme
ScalarField transport(const VectorField& u, const ScalarField& m, const MeanFieldOptions& o) {
    if (o.transport == TransportScheme::upwind) return upwind_divergence(u, m);
    return -1.0 * divergence(product(u, m, o.dealias, o.poisson != PoissonMode::freespace));
}

} // namespace

MeanFieldRate mean_field_rhs(const MeanFieldState& s) {
    const MeanFieldModel& md = *s.model;
    const Grid2D& g = md.grid();
    const Params& p = md.params();
    const MeanFieldOptions& o = md.options();
    MeanFieldRate r{ScalarField(g), ScalarField(g), VectorField(g)};
    const VectorField v = velocity_of(s);

    if (md.variant() == MeanFieldVariant::DegenerateParabolic) {
        // dv/dt = -(F^perp + 2v) curl v
        const ScalarField w = curl(v);
        r.dv = transport_velocity(s, v);
        r.dv = product(r.dv, w, o.dealias);
        r.dv *= -1.0;
        return r;
    }

    const VectorField u = transport_velocity(s, v);
    r.dm = transport(u, s.m, o);

    if (md.variant() == MeanFieldVariant::CompressibleDissipative) {
        // dd/dt = alpha^-1 Lap d - alpha^-1 div(d grad h) + div((alpha I - beta J)(grad^perp h - F^perp - 2 lambda v) a m)
        const double ia = 1.0 / p.alpha;
        const double diff = ia * o.divergence_diffusion_scale;
        VectorField q(g);
        for (std::size_t k = 0; k < q.size(); ++k) {
            const Vec2 w = perp(md.gradh()[k]) - perp(md.force()[k]) - (2.0 * p.lambda) * v[k];
            q.set(k, md.a()[k] * mixedflow_apply(p.alpha, p.beta, w));
        }
        r.dd = diff * laplacian(s.d);
        r.dd.axpy(-ia, divergence(product(md.gradh(), s.d, o.dealias)));
        r.dd += divergence(product(q, s.m, o.dealias));
    }
    return r;
}

MeanFieldRate add_viscosity(MeanFieldRate rate, const MeanFieldState& s, double T) {
    require(T >= 0.0, "viscosity must be non-negative");
    if (T == 0.0) return rate;
    if (s.variant() == MeanFieldVariant::DegenerateParabolic) {
        VectorField lv = laplacian(s.v);
        lv *= T;
        rate.dv += lv;
        return rate;
    }
    rate.dm.axpy(T, laplacian(s.m));
    if (s.variant() == MeanFieldVariant::CompressibleDissipative) rate.dd.axpy(T, laplacian(s.d));
    return rate;
}

double max_stable_dt(const MeanFieldState& s) {
    const MeanFieldModel& md = *s.model;
    const Grid2D& g = md.grid();
    const double hmin = std::min(g.hx(), g.hy());
    const VectorField u = transport_velocity(s, velocity_of(s));
    double umax = u.max_norm();
    if (md.variant() == MeanFieldVariant::CompressibleDissipative)
        umax = std::max(umax, md.gradh().max_norm() / md.params().alpha);
    double bound = umax > 0.0 ? md.options().cfl * hmin / umax : std::numeric_limits<double>::infinity();
    const double T = md.params().temperature;
    if (T > 0.0) bound = std::min(bound, 0.2 * hmin * hmin / T);
    if (md.variant() == MeanFieldVariant::CompressibleDissipative)
        bound = std::min(bound, 0.2 * hmin * hmin * md.params().alpha / md.options().divergence_diffusion_scale);
    return bound;
}

namespace {

MeanFieldRate full_rate(const MeanFieldState& s) {
    return add_viscosity(mean_field_rhs(s), s, s.model->params().temperature);
}

/// out = a*x + b*(y + dt*r), fieldwise
MeanFieldState blend(double a, const MeanFieldState& x, double b, const MeanFieldState& y, double dt,
                     const MeanFieldRate& r) {
    MeanFieldState out = y;
    const bool deg = x.variant() == MeanFieldVariant::DegenerateParabolic;
    if (deg) {
        out.v.x().axpy(dt, r.dv.x());
        out.v.y().axpy(dt, r.dv.y());
        out.v *= b;
        VectorField xa = x.v;
        xa *= a;
        out.v += xa;
    } else {
        out.m.axpy(dt, r.dm);
        out.m *= b;
        out.m.axpy(a, x.m);
        if (x.variant() == MeanFieldVariant::CompressibleDissipative) {
            out.d.axpy(dt, r.dd);
            out.d *= b;
            out.d.axpy(a, x.d);
        }
    }
    return out;
}

MeanFieldState single_step(const MeanFieldState& s, double dt, TimeScheme scheme) {
    if (scheme == TimeScheme::ssprk3) {
        const MeanFieldState u1 = blend(0.0, s, 1.0, s, dt, full_rate(s));
        const MeanFieldState u2 = blend(0.75, s, 0.25, u1, dt, full_rate(u1));
        return blend(1.0 / 3.0, s, 2.0 / 3.0, u2, dt, full_rate(u2));
    }
    const MeanFieldRate k1 = full_rate(s);
    const MeanFieldRate k2 = full_rate(blend(0.0, s, 1.0, s, 0.5 * dt, k1));
    MeanFieldState y2 = blend(0.0, s, 1.0, s, 0.5 * dt, k2);
    const MeanFieldRate k3 = full_rate(y2);
    const MeanFieldRate k4 = full_rate(blend(0.0, s, 1.0, s, dt, k3));
    MeanFieldRate sum = k1;
    auto acc = [](MeanFieldRate& a, const MeanFieldRate& b, double w) {
        a.dm.axpy(w, b.dm);
        a.dd.axpy(w, b.dd);
        a.dv.x().axpy(w, b.dv.x());
        a.dv.y().axpy(w, b.dv.y());
    };
    acc(sum, k2, 2.0);
    acc(sum, k3, 2.0);
    acc(sum, k4, 1.0);
    return blend(0.0, s, 1.0, s, dt / 6.0, sum);
}

} // namespace

double total_mass(const MeanFieldState& s) {
    if (s.variant() == MeanFieldVariant::DegenerateParabolic) return curl(s.v).integral();
    return s.m.integral();
}

MeanFieldState time_step(const MeanFieldState& s, double dt, TimeScheme scheme, double t_end, StepReport* report) {
    require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    require(t_end >= s.time, "t_end lies before the state time");
    const MeanFieldOptions& o = s.model->options();
    const bool deg = s.variant() == MeanFieldVariant::DegenerateParabolic;
    StepReport rep;
    rep.mass_initial = total_mass(s);
    rep.min_m = deg ? 0.0 : s.m.min();
    MeanFieldState cur = s;
    const double eps_t = 1e-12 * std::max(1.0, std::abs(t_end));
    while (t_end - cur.time > eps_t) {
        double h = std::min(dt, t_end - cur.time);
        const double bound = max_stable_dt(cur);
        if (h > bound * (1.0 + 1e-12)) {
            if (!o.adaptive)
                throw NumericalError("time step " + std::to_string(h) + " violates the stability bound " +
                                         std::to_string(bound),
                                     cur.time, rep.steps);
            h = bound;
        }
        const double t_next = (h == t_end - cur.time) ? t_end : cur.time + h;
        cur = single_step(cur, h, scheme);
        cur.time = t_next;
        ++rep.steps;
        const bool finite = deg ? cur.v.all_finite() : (cur.m.all_finite() && cur.d.all_finite());
        if (!finite) throw NumericalError("non-finite values in the mean-field state", cur.time, rep.steps);
        if (!deg) {
            const double mn = cur.m.min();
            rep.min_m = std::min(rep.min_m, mn);
            if (mn < -o.tol_pos) {
                ++rep.positivity_events;
                if (o.clip_negative)
                    for (double& x : cur.m.values()) x = std::max(x, 0.0);
            }
        }
    }
    if (deg) cur.m = curl(cur.v);
    rep.mass_final = total_mass(cur);
    if (report) *report = rep;
    return cur;
}

ScalarField pressure_of(const MeanFieldState& s) {
    const MeanFieldModel& md = *s.model;
    const Grid2D& g = md.grid();
    const Params& p = md.params();
    const VectorField v = velocity_of(s);
    VectorField q(g);
    if (md.variant() == MeanFieldVariant::IncompressibleDissipative) {
        // dv/dt = grad p + q with q = (alpha I - beta J) J (grad h - F + 2 lambda v^perp) m and div v = 0
        for (std::size_t k = 0; k < q.size(); ++k) {
            const Vec2 w = md.gradh()[k] - md.force()[k] + (2.0 * p.lambda) * perp(v[k]);
            q.set(k, s.m[k] * mixedflow_apply(p.alpha, p.beta, perp(w)));
        }
        return -1.0 * poisson_solve(divergence(q), PoissonMode::periodic_meanfree);
    }
    if (md.variant() == MeanFieldVariant::ConservativeLake) {
        // dv/dt = grad p + (-F + 2 lambda v^perp) m with div(a v) = 0
        for (std::size_t k = 0; k < q.size(); ++k)
            q.set(k, s.m[k] * (-md.force()[k] + (2.0 * p.lambda) * perp(v[k])));
        const ScalarField rhs = -1.0 * divergence(scale(md.a(), q));
        return elliptic_solve_weighted(rhs, md.a(), EllipticForm::div_a_grad).phi;
    }
    throw ConfigError("pressure is defined only for the incompressible and lake variants");
}

double lake_energy(const MeanFieldState& s) {
    const VectorField v = velocity_of(s);
    const ScalarField& a = s.model->a();
    double e = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) e += a[k] * norm2(v[k]);
    return e * s.grid().cell_area();
}

} // namespace pinflow
