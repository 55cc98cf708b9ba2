#include "pinflow/error.hpp"
#include "pinflow/homog.hpp"
#include "pinflow/meanfield.hpp"

#include <algorithm>
#include <cmath>

namespace pinflow {

Vec2 cell_layer_gamma(const PinningLandscape& land, const CellLayerConfig& cfg, Vec2 y) {
    const Vec2 w = perp(land.cell_gradient(y, cfg.x_slow)) - perp(cfg.force) - (2.0 * cfg.kappa) * cfg.v_slow;
    return mixedflow_apply(cfg.alpha, cfg.beta, w);
}

Vec2 cell_layer_drift(const PinningLandscape& land, const CellLayerConfig& cfg, Vec2 y) {
    return perp(cell_layer_gamma(land, cfg, y));
}

VectorField cell_layer_drift_field(const Grid2D& g, const PinningLandscape& land, const CellLayerConfig& cfg) {
    return VectorField::sample(g, [&](Vec2 y) { return cell_layer_drift(land, cfg, y); });
}

double cell_layer_stable_dt(const VectorField& drift, double cfl) {
    const double umax = drift.max_norm();
    const Grid2D& g = drift.grid();
    return umax > 0.0 ? cfl * std::min(g.hx(), g.hy()) / umax : INFINITY;
}

ScalarField cell_layer_step(const ScalarField& m0, const PinningLandscape& land, const CellLayerConfig& cfg,
                            double dt, double t_end, CellLayerReport* report) {
    require(dt > 0.0 && t_end >= 0.0, "cell_layer_step: dt must be positive and t_end non-negative");
    const VectorField u = cell_layer_drift_field(m0.grid(), land, cfg);
    const double bound = cell_layer_stable_dt(u);
    if (dt > bound)
        throw NumericalError("cell_layer_step: time step " + std::to_string(dt) + " violates the CFL bound " +
                             std::to_string(bound));
    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
    const double h = steps > 0 ? t_end / steps : 0.0;
    ScalarField m = m0;
    for (long s = 0; s < steps; ++s) {
        ScalarField u1 = m;
        u1.axpy(h, upwind_divergence(u, m));
        ScalarField u2 = u1;
        u2.axpy(h, upwind_divergence(u, u1));
        u2 *= 0.25;
        u2.axpy(0.75, m);
        ScalarField u3 = u2;
        u3.axpy(h, upwind_divergence(u, u2));
        m *= 1.0 / 3.0;
        m.axpy(2.0 / 3.0, u3);
        if (!m.all_finite()) throw NumericalError("cell_layer_step: non-finite density", s * h, s);
    }
    if (report) {
        report->steps = steps;
        report->mass_initial = m0.integral();
        report->mass_final = m.integral();
    }
    return m;
}

double torus_distance(Vec2 a, Vec2 b) {
    Vec2 d = a - b;
    d.x -= std::round(d.x);
    d.y -= std::round(d.y);
    return norm(d);
}

std::vector<Vec2> cell_wells(const PinningLandscape& land, int n, Vec2 x_slow) {
    require(n >= 8, "cell_wells: resolution must be at least 8");
    auto val = [&](int i, int j) {
        i = ((i % n) + n) % n;
        j = ((j % n) + n) % n;
        return land.cell_value({double(i) / n, double(j) / n}, x_slow);
    };
    std::vector<Vec2> wells;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double c = val(i, j);
            bool minimum = true;
            for (int dj = -1; dj <= 1 && minimum; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if ((di || dj) && val(i + di, j + dj) < c) {
                        minimum = false;
                        break;
                    }
            if (!minimum) continue;
            Vec2 y{double(i) / n, double(j) / n};
            bool ok = true;
            for (int it = 0; it < 50; ++it) {
                const Vec2 gr = land.cell_gradient(y, x_slow);
                const Sym2 H = land.cell_hessian(y, x_slow);
                const double det = H.xx * H.yy - H.xy * H.xy;
                if (!(det > 0.0 && H.xx > 0.0)) {
                    ok = false;
                    break;
                }
                const Vec2 step{(H.yy * gr.x - H.xy * gr.y) / det, (-H.xy * gr.x + H.xx * gr.y) / det};
                y -= step;
                if (norm(step) < 1e-14) break;
            }
            if (!ok) continue;
            y.x -= std::floor(y.x);
            y.y -= std::floor(y.y);
            const bool dup = std::any_of(wells.begin(), wells.end(), [&](Vec2 w) { return torus_distance(w, y) < 1e-6; });
            if (!dup) wells.push_back(y);
        }
    return wells;
}

double mass_near(const ScalarField& m, const std::vector<Vec2>& points, double r) {
    const Grid2D& g = m.grid();
    double acc = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const Vec2 y = g.point(i, j);
            if (std::any_of(points.begin(), points.end(), [&](Vec2 p) { return torus_distance(p, y) < r; }))
                acc += m(i, j);
        }
    return acc * g.cell_area();
}

} // namespace pinflow
