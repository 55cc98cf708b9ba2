#include "pinflow/homog.hpp"

#include "pinflow/error.hpp"
#include "pinflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pinflow {

Vec2 cell_drift(const PinningLandscape& land, double alpha, double beta, Vec2 force, Vec2 y, Vec2 x_slow) {
    return mixedflow_apply(alpha, beta, land.cell_gradient(y, x_slow) - force);
}

Grid2D cell_grid(int n) { return Grid2D(n, n, 1.0, 1.0, {0.0, 0.0}); }

namespace {

struct LiftedFlow {
    const PinningLandscape& land;
    double alpha, beta;
    Vec2 force;
    Vec2 x_slow;

    Vec2 operator()(Vec2 y) const { return -cell_drift(land, alpha, beta, force, y, x_slow); }

    /// Classical RK4 step; k1 = f(y) is passed in
    Vec2 step(Vec2 y, Vec2 k1, double dt) const {
        const Vec2 k2 = (*this)(y + (0.5 * dt) * k1);
        const Vec2 k3 = (*this)(y + (0.5 * dt) * k2);
        const Vec2 k4 = (*this)(y + dt * k3);
        return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

Vec2 default_start(const PinningLandscape& land, Vec2 x_slow) {
    const int n = 64;
    Vec2 best{};
    double hb = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 y{double(i) / n, double(j) / n};
            const double v = land.cell_value(y, x_slow);
            if (v < hb) hb = v, best = y;
        }
    return best;
}

/// Smooth bump window on (0, 1); all derivatives vanish at the endpoints
double bump(double s) { return s <= 0.0 || s >= 1.0 ? 0.0 : std::exp(-1.0 / (s * (1.0 - s))); }

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept = nullptr) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (intercept) *intercept = (sy - slope * sx) / n;
    return slope;
}

} // namespace

DeterministicVelocity cell_velocity_deterministic_report(const PinningLandscape& land, double alpha, double beta,
                                                         Vec2 force, const DeterministicOptions& opt) {
    require(opt.dt > 0.0 && opt.horizon > 0.0, "cell_velocity_deterministic: dt and horizon must be positive");
    const LiftedFlow f{land, alpha, beta, force, opt.x_slow};
    Vec2 y = opt.start ? *opt.start : default_start(land, opt.x_slow);

    // transient [0, H/2], then consecutive windows of doubling length
    auto advance = [&](double len, bool average, Vec2& mean) {
        const long m = std::max(1L, static_cast<long>(std::ceil(len / opt.dt)));
        const double h = len / m;
        Vec2 acc{};
        double wsum = 0.0;
        for (long k = 0; k < m; ++k) {
            const Vec2 k1 = f(y);
            if (average) {
                const double w = bump(double(k) / m);
                acc += w * k1;
                wsum += w;
            }
            y = f.step(y, k1, h);
        }
        if (average) mean = (1.0 / wsum) * acc;
        return norm(f(y));
    };

    DeterministicVelocity out;
    Vec2 dummy;
    double speed = advance(0.5 * opt.horizon, false, dummy);
    const Vec2 y_mid = y;
    double len = 0.5 * opt.horizon, t = len;
    Vec2 prev{NAN, NAN};
    for (int d = 0; d <= opt.max_doublings + 1; ++d) {
        if (speed < opt.pinned_speed) {
            out.pinned = true;
            out.horizon = t;
            return out;
        }
        Vec2 v;
        speed = advance(len, true, v);
        t += len;
        if (speed < opt.pinned_speed) continue;
        if (std::isfinite(prev.x)) {
            const double gap = norm(v - prev);
            if (gap <= opt.relative_tolerance * std::max(norm(v), 1e-12)) {
                out.velocity = v;
                out.horizon = t;
                out.uncertainty = gap;
                return out;
            }
        }
        prev = v;
        len *= 2.0;
    }
    if (norm(y - y_mid) <= 3.0) {
        // bounded lifted trajectory with algebraic relaxation
        out.pinned = true;
        out.horizon = t;
        return out;
    }
    throw NumericalError("cell_velocity_deterministic: horizon extrapolation did not converge for F = (" +
                         std::to_string(force.x) + ", " + std::to_string(force.y) + ")");
}

Vec2 cell_velocity_deterministic(const PinningLandscape& land, double alpha, double beta, Vec2 force,
                                 const DeterministicOptions& opt) {
    return cell_velocity_deterministic_report(land, alpha, beta, force, opt).velocity;
}

bool is_pinned(const PinningLandscape& land, double alpha, double beta, Vec2 force, const DeterministicOptions& opt) {
    const LiftedFlow f{land, alpha, beta, force, opt.x_slow};
    const Vec2 y0 = opt.start ? *opt.start : default_start(land, opt.x_slow);
    Vec2 y = y0;
    const double t_max = opt.horizon * std::ldexp(1.0, opt.max_doublings);
    const long steps = static_cast<long>(std::ceil(t_max / opt.dt));
    for (long k = 0; k < steps; ++k) {
        const Vec2 k1 = f(y);
        if (norm(k1) < opt.pinned_speed) return true;
        if (norm(y - y0) > 3.0) return false;
        y = f.step(y, k1, opt.dt);
    }
    // never escaped: the trajectory is bounded and carries no mean velocity (this includes the degenerate
    // saddle-node exactly at threshold, where the approach is algebraic)
    return true;
}

double critical_force(const PinningLandscape& land, double alpha, double beta, Vec2 direction,
                      const DepinningOptions& opt) {
    require(std::abs(norm(direction) - 1.0) < 1e-12, "depinning_scan: direction must be a unit vector");
    require(opt.f_max > 0.0 && opt.threshold_tolerance > 0.0, "depinning_scan: invalid range or tolerance");
    double lo = 0.0, hi = opt.f_max;
    if (is_pinned(land, alpha, beta, hi * direction, opt.flow))
        throw NumericalError("depinning_scan: no depinning below |F| = " + std::to_string(opt.f_max));
    while (hi - lo > opt.threshold_tolerance) {
        const double mid = 0.5 * (lo + hi);
        (is_pinned(land, alpha, beta, mid * direction, opt.flow) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DepinningReport depinning_scan(const PinningLandscape& land, double alpha, double beta, Vec2 direction,
                               const DepinningOptions& opt) {
    require(opt.samples >= 8, "depinning_scan: at least 8 fit samples are required");
    require(opt.delta_min > 0.0 && opt.delta_max > opt.delta_min, "depinning_scan: invalid fit range");
    DepinningReport rep;
    rep.direction = direction;
    rep.critical_force = critical_force(land, alpha, beta, direction, opt);
    const double fc = rep.critical_force;
    const double base = fc > opt.threshold_tolerance ? fc : 1.0;
    const int n = opt.samples;
    rep.force_magnitude.resize(n);
    rep.velocity_magnitude.resize(n);
    std::vector<double> lx(n), ly(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const double s = double(k) / (n - 1);
            const double delta = base * opt.delta_min * std::pow(opt.delta_max / opt.delta_min, s);
            const double F = fc + delta;
            const Vec2 v = cell_velocity_deterministic(land, alpha, beta, F * direction, opt.flow);
            rep.force_magnitude[k] = F;
            rep.velocity_magnitude[k] = norm(v);
        }
    });
    for (int k = 0; k < n; ++k) {
        if (!(rep.velocity_magnitude[k] > 0.0))
            throw NumericalError("depinning_scan: zero velocity above the threshold at |F| = " +
                                 std::to_string(rep.force_magnitude[k]));
        lx[k] = std::log(rep.force_magnitude[k] - fc);
        ly[k] = std::log(rep.velocity_magnitude[k]);
    }
    rep.exponent = least_squares_slope(lx, ly);
    rep.fit_min = rep.force_magnitude.front();
    rep.fit_max = rep.force_magnitude.back();
    return rep;
}

ArrheniusReport arrhenius_scan(const PinningLandscape& land, double alpha, double beta, Vec2 force,
                               const std::vector<double>& temperatures, const InvariantMeasureOptions& opt) {
    require(temperatures.size() >= 2, "arrhenius_scan: at least two temperatures are required");
    const double tmin = *std::min_element(temperatures.begin(), temperatures.end());
    require(tmin > 0.0, "arrhenius_scan: temperatures must be positive");
    require(norm(force) > 0.0 && norm(force) <= 0.1 * tmin, "arrhenius_scan: need 0 < |F| <= 0.1 min(T)");

    ArrheniusReport rep;
    rep.temperatures = temperatures;
    rep.velocities.resize(temperatures.size());
    parallel_for(temperatures.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k)
            rep.velocities[k] = cell_velocity_viscous(land, alpha, beta, force, temperatures[k], opt);
    });
    rep.osc = land.osc(opt.x_slow);
    rep.predicted_slope = -rep.osc;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < temperatures.size(); ++k) {
        const double v = norm(rep.velocities[k]);
        if (!(v > 1e-13 * norm(force))) {
            rep.warnings.push_back("velocity below numerical floor at T = " + std::to_string(temperatures[k]));
            continue;
        }
        x.push_back(1.0 / temperatures[k]);
        y.push_back(std::log(v * temperatures[k] / norm(force)));
    }
    if (x.size() < 2) throw NumericalError("arrhenius_scan: fewer than two usable temperatures");
    rep.slope = least_squares_slope(x, y, &rep.intercept);
    rep.relative_gap = rep.predicted_slope != 0.0 ? std::abs(rep.slope - rep.predicted_slope) / std::abs(rep.predicted_slope)
                                                  : std::abs(rep.slope);
    return rep;
}

} // namespace pinflow
