#include "pinflow/error.hpp"
#include "pinflow/homog.hpp"
#include "pinflow/meanfield.hpp"
#include "pinflow/parallel.hpp"
#include "pinflow/poisson.hpp"
#include "pinflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

namespace pinflow {

namespace {

double direction_angle(int l, int directions) { return 2.0 * std::numbers::pi * l / directions; }

Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Barycentric coordinates of p in triangle (a, b, c)
std::array<double, 3> barycentric(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double lb = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    const double lc = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    return {1.0 - lb - lc, lb, lc};
}

std::vector<double> uniform_radii(int radii, double f_max) {
    std::vector<double> r(radii);
    for (int k = 0; k < radii; ++k) r[k] = f_max * k / (radii - 1);
    return r;
}

} // namespace

VelocityTable::VelocityTable(int directions, std::vector<std::vector<double>> radii,
                             std::vector<std::vector<Vec2>> values, double temperature)
    : directions_(directions), radii_(std::move(radii)), values_(std::move(values)), temperature_(temperature) {
    require(directions_ >= 3, "VelocityTable: at least 3 directions are required");
    require(static_cast<int>(radii_.size()) == directions_ && static_cast<int>(values_.size()) == directions_,
            "VelocityTable: per-direction arrays must match the direction count");
    const std::size_t nr = radii_.front().size();
    require(nr >= 2, "VelocityTable: at least 2 radii are required");
    for (int l = 0; l < directions_; ++l) {
        require(radii_[l].size() == nr && values_[l].size() == nr, "VelocityTable: ragged radius arrays");
        require(radii_[l][0] == 0.0, "VelocityTable: radii must start at 0");
        for (std::size_t k = 1; k < nr; ++k)
            require(radii_[l][k] > radii_[l][k - 1], "VelocityTable: radii must increase strictly");
    }
}

VelocityTable VelocityTable::build(const PinningLandscape& land, double alpha, double beta,
                                   const VelocityTableOptions& opt) {
    require(opt.directions >= 3 && opt.radii >= 3 && opt.f_max > 0.0, "VelocityTable::build: invalid sampling");
    require(opt.temperature >= 0.0, "VelocityTable::build: temperature must be non-negative");
    const int D = opt.directions, R = opt.radii;
    std::vector<std::vector<double>> radii(D, uniform_radii(R, opt.f_max));
    // nodes whose value is known to vanish: the origin and threshold nodes
    std::vector<std::vector<char>> fixed_zero(D, std::vector<char>(R, 0));
    for (int l = 0; l < D; ++l) fixed_zero[l][0] = 1;

    if (opt.temperature == 0.0 && opt.threshold_nodes) {
        std::vector<double> fc(D, -1.0);
        parallel_for(D, [&](std::size_t b, std::size_t e) {
            for (std::size_t l = b; l < e; ++l) {
                try {
                    DepinningOptions d = opt.depinning;
                    d.f_max = opt.f_max;
                    d.flow = opt.flow;
                    fc[l] = critical_force(land, alpha, beta, unit(direction_angle(int(l), D)), d);
                } catch (const NumericalError&) {
                    fc[l] = -1.0;
                }
            }
        });
        const double dr = opt.f_max / (R - 1);
        for (int l = 0; l < D; ++l) {
            if (!(fc[l] > 0.5 * dr && fc[l] < opt.f_max - 0.5 * dr)) continue;
            const int k = std::clamp(static_cast<int>(std::lround(fc[l] / dr)), 1, R - 2);
            radii[l][k] = fc[l];
            fixed_zero[l][k] = 1;
        }
    }

    std::vector<std::vector<Vec2>> values(D, std::vector<Vec2>(R));
    parallel_for(static_cast<std::size_t>(D) * R, [&](std::size_t b, std::size_t e) {
        for (std::size_t idx = b; idx < e; ++idx) {
            const int l = static_cast<int>(idx / R), k = static_cast<int>(idx % R);
            if (fixed_zero[l][k]) continue;
            const Vec2 F = radii[l][k] * unit(direction_angle(l, D));
            values[l][k] = opt.temperature > 0.0
                               ? cell_velocity_viscous(land, alpha, beta, F, opt.temperature, opt.measure)
                               : cell_velocity_deterministic(land, alpha, beta, F, opt.flow);
        }
    });
    return VelocityTable(D, std::move(radii), std::move(values), opt.temperature);
}

VelocityTable VelocityTable::free_flow(double alpha, double beta, int directions, int radii, double f_max) {
    std::vector<std::vector<double>> r(directions, uniform_radii(radii, f_max));
    std::vector<std::vector<Vec2>> v(directions, std::vector<Vec2>(radii));
    for (int l = 0; l < directions; ++l)
        for (int k = 0; k < radii; ++k)
            v[l][k] = mixedflow_apply(alpha, beta, r[l][k] * unit(direction_angle(l, directions)));
    return VelocityTable(directions, std::move(r), std::move(v), 0.0);
}

double VelocityTable::max_force() const {
    double m = INFINITY;
    for (const auto& r : radii_) m = std::min(m, r.back());
    return m;
}

Vec2 VelocityTable::node_force(int direction, int radius) const {
    return radii_[direction][radius] * unit(direction_angle(direction, directions_));
}

Vec2 VelocityTable::operator()(Vec2 F) const {
    const double r = norm(F);
    if (!(r <= max_force()))
        throw NumericalError("VelocityTable: |F| = " + std::to_string(r) + " exceeds the table range " +
                             std::to_string(max_force()));
    if (r == 0.0) return values_[0][0];
    const double dth = 2.0 * std::numbers::pi / directions_;
    double theta = std::atan2(F.y, F.x);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    int l = std::min(static_cast<int>(theta / dth), directions_ - 1);
    const double s = theta / dth - l;
    const int l2 = (l + 1) % directions_;
    const int nr = radii();
    int k = 0;
    while (k < nr - 2 && (1.0 - s) * radii_[l][k + 1] + s * radii_[l2][k + 1] <= r) ++k;

    const Vec2 p00 = node_force(l, k), p10 = node_force(l, k + 1), p11 = node_force(l2, k + 1), p01 = node_force(l2, k);
    const Vec2 v00 = values_[l][k], v10 = values_[l][k + 1], v11 = values_[l2][k + 1], v01 = values_[l2][k];
    auto mix = [](const std::array<double, 3>& w, Vec2 a, Vec2 b, Vec2 c) { return w[0] * a + w[1] * b + w[2] * c; };
    const auto wa = barycentric(F, p00, p10, p11);
    if (k == 0) return mix(wa, v00, v10, v11);
    const auto wb = barycentric(F, p00, p11, p01);
    const double ma = std::min({wa[0], wa[1], wa[2]}), mb = std::min({wb[0], wb[1], wb[2]});
    return ma >= mb ? mix(wa, v00, v10, v11) : mix(wb, v00, v11, v01);
}

void VelocityTable::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << "Fx,Fy,Vx,Vy,T0\n" << std::setprecision(17);
    for (int l = 0; l < directions_; ++l)
        for (int k = 0; k < radii(); ++k) {
            const Vec2 F = node_force(l, k), V = values_[l][k];
            os << F.x << ',' << F.y << ',' << V.x << ',' << V.y << ',' << temperature_ << '\n';
        }
}

VectorField homogenized_transport(const ScalarField& m, const VelocityTable& table, Vec2 force) {
    const VectorField v = perp_gradient(poisson_solve(m, PoissonMode::periodic_meanfree));
    VectorField W(m.grid());
    for (std::size_t k = 0; k < W.size(); ++k) W.set(k, table(force - 2.0 * perp(v[k])));
    return W;
}

ScalarField homogenized_rhs(const ScalarField& m, const VelocityTable& table, Vec2 force) {
    return upwind_divergence(homogenized_transport(m, table, force), m);
}

HomogenizedRun evolve_homogenized(const ScalarField& m0, const VelocityTable& table, Vec2 force, double t_end,
                                  double cfl) {
    require(t_end >= 0.0 && cfl > 0.0, "evolve_homogenized: invalid horizon or CFL number");
    const Grid2D& g = m0.grid();
    const double hmin = std::min(g.hx(), g.hy());
    HomogenizedRun run{m0};
    double t = 0.0;
    Vec2 acc{};
    while (t < t_end) {
        const VectorField W = homogenized_transport(run.m, table, force);
        const double wmax = W.max_norm();
        const double dt = std::min(t_end - t, wmax > 0.0 ? cfl * hmin / wmax : t_end - t);
        Vec2 moment{};
        for (std::size_t k = 0; k < W.size(); ++k) moment += run.m[k] * W[k];
        acc += (dt * g.cell_area()) * moment;

        ScalarField k1 = upwind_divergence(W, run.m);
        ScalarField u1 = run.m;
        u1.axpy(dt, k1);
        ScalarField u2 = u1;
        u2.axpy(dt, homogenized_rhs(u1, table, force));
        u2 *= 0.25;
        u2.axpy(0.75, run.m);
        ScalarField u3 = u2;
        u3.axpy(dt, homogenized_rhs(u2, table, force));
        run.m *= 1.0 / 3.0;
        run.m.axpy(2.0 / 3.0, u3);
        if (!run.m.all_finite()) throw NumericalError("evolve_homogenized: non-finite density", t, run.steps);
        t += dt;
        ++run.steps;
    }
    run.mean_velocity = t_end > 0.0 ? (1.0 / t_end) * acc : Vec2{};
    return run;
}

} // namespace pinflow
