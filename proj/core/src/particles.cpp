#include "pinflow/particles.hpp"
#include "pinflow/error.hpp"
#include "pinflow/parallel.hpp"
#include "pinflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pinflow {

void VortexEnsemble::validate() const {
    params.validate();
    for (const Vec2& p : positions)
        require(std::isfinite(p.x) && std::isfinite(p.y), "vortex positions must be finite");
}

Vec2 interaction_force(const VortexEnsemble& ens, std::size_t i) {
    const auto& x = ens.positions;
    const std::size_t n = x.size();
    if (n < 2) return {};
    const Vec2 xi = x[i];
    double fx = 0.0, fy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dx = xi.x - x[j].x, dy = xi.y - x[j].y;
        const double inv = 1.0 / (dx * dx + dy * dy + r_soft * r_soft);
        fx += dx * inv;
        fy += dy * inv;
    }
    const double s = 1.0 / static_cast<double>(n);
    return {s * fx, s * fy};
}

std::vector<Vec2> interaction_forces(const VortexEnsemble& ens, CollisionReport* report) {
    const auto& x = ens.positions;
    const std::size_t n = x.size();
    std::vector<Vec2> f(n);
    std::vector<double> closest(report ? n : 0, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> partner(report ? n : 0, 0);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            f[i] = interaction_force(ens, i);
            if (!report) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d2 = norm2(x[i] - x[j]);
                if (d2 < closest[i]) closest[i] = d2, partner[i] = j;
            }
        }
    });
    if (report) {
        *report = {};
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            if (closest[i] < best) best = closest[i], report->i = i, report->j = partner[i];
        report->distance = std::sqrt(best);
        report->collided = report->distance < r_soft;
    }
    return f;
}

namespace {

/// Interaction forces with a cheap in-loop collision scan (the near pair is rare)
std::vector<Vec2> checked_forces(const VortexEnsemble& ens) {
    const auto& x = ens.positions;
    const std::size_t n = x.size();
    std::vector<Vec2> f(n);
    std::vector<char> hit(n, 0);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Vec2 xi = x[i];
            double fx = 0.0, fy = 0.0, dmin2 = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double dx = xi.x - x[j].x, dy = xi.y - x[j].y;
                const double r2 = dx * dx + dy * dy;
                dmin2 = std::min(dmin2, r2);
                const double inv = 1.0 / (r2 + r_soft * r_soft);
                fx += dx * inv;
                fy += dy * inv;
            }
            const double s = 1.0 / static_cast<double>(n);
            f[i] = {s * fx, s * fy};
            hit[i] = dmin2 < r_soft * r_soft;
        }
    });
    if (std::find(hit.begin(), hit.end(), 1) != hit.end()) {
        CollisionReport r;
        interaction_forces(ens, &r);
        throw NearCollision(r.i, r.j, r.distance, ens.time, static_cast<long>(ens.step_index));
    }
    return f;
}

VortexEnsemble with_positions(const VortexEnsemble& base, std::vector<Vec2> x) {
    VortexEnsemble e = base;
    e.positions = std::move(x);
    return e;
}

} // namespace

std::vector<Vec2> drift(const VortexEnsemble& ens) {
    std::vector<Vec2> f = checked_forces(ens);
    const Params& p = ens.params;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Vec2 xi = ens.positions[i];
        Vec2 g = f[i] + p.force(xi);
        if (ens.landscape) g -= ens.landscape->eval(xi).gradh;
        f[i] = mixedflow_apply(p.alpha, p.beta, g);
    }
    return f;
}

double min_pair_distance(const std::vector<Vec2>& x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) best = std::min(best, norm2(x[i] - x[j]));
    return std::sqrt(best);
}

double stability_bound(const VortexEnsemble& ens) {
    const std::size_t n = ens.size();
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double d = min_pair_distance(ens.positions);
    return 0.1 * static_cast<double>(n) * d * d;
}

VortexEnsemble step_deterministic(const VortexEnsemble& ens, double dt, StepScheme scheme) {
    require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    const double bound = stability_bound(ens);
    if (dt > bound)
        throw NumericalError("time step " + std::to_string(dt) + " exceeds the stability bound " + std::to_string(bound),
                             ens.time, static_cast<long>(ens.step_index));
    const std::size_t n = ens.size();
    std::vector<Vec2> x = ens.positions;
    if (scheme == StepScheme::euler) {
        const auto k1 = drift(ens);
        for (std::size_t i = 0; i < n; ++i) x[i] += dt * k1[i];
    } else {
        auto stage = [&](const std::vector<Vec2>& k, double c) {
            std::vector<Vec2> y(n);
            for (std::size_t i = 0; i < n; ++i) y[i] = ens.positions[i] + (c * dt) * k[i];
            return y;
        };
        const auto k1 = drift(ens);
        const auto k2 = drift(with_positions(ens, stage(k1, 0.5)));
        const auto k3 = drift(with_positions(ens, stage(k2, 0.5)));
        const auto k4 = drift(with_positions(ens, stage(k3, 1.0)));
        for (std::size_t i = 0; i < n; ++i) x[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    VortexEnsemble out = with_positions(ens, std::move(x));
    out.time = ens.time + dt;
    out.step_index = ens.step_index + 1;
    return out;
}

Vec2 langevin_increment(const VortexEnsemble& ens, std::size_t i, double dt) {
    const double T = ens.params.temperature;
    if (T == 0.0) return {};
    const Vec2 xi = counter_normal_pair(ens.seed, i, ens.step_index);
    return std::sqrt(2.0 * T * dt) * mixedflow_apply(ens.params.alpha, ens.params.beta, xi);
}

VortexEnsemble step_langevin(const VortexEnsemble& ens, double dt) {
    require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    require(ens.params.temperature >= 0.0, "temperature must be non-negative");
    const auto k1 = drift(ens);
    std::vector<Vec2> x = ens.positions;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += dt * k1[i];
        if (ens.params.temperature > 0.0) x[i] += langevin_increment(ens, i, dt);
    }
    VortexEnsemble out = with_positions(ens, std::move(x));
    out.time = ens.time + dt;
    out.step_index = ens.step_index + 1;
    return out;
}

double interaction_energy(const std::vector<Vec2>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) s -= std::log(norm(x[i] - x[j]));
    return 2.0 * s;
}

double parabolic_energy(const VortexEnsemble& ens) {
    const double n = static_cast<double>(ens.size());
    double e = interaction_energy(ens.positions) / n;
    if (ens.landscape)
        for (const Vec2& p : ens.positions) e += 2.0 * ens.landscape->eval(p).h;
    return e;
}

namespace {

void record(Trajectory& tr, const VortexEnsemble& e, const std::vector<Vec2>& x0) {
    const double n = static_cast<double>(e.size());
    tr.times.push_back(e.time);
    tr.snapshots.push_back(e.positions);
    tr.energy.push_back(e.size() >= 2 ? interaction_energy(e.positions) / (n * n) : 0.0);
    Vec2 c{};
    double disp = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        c += e.positions[i];
        disp += norm(e.positions[i] - x0[i]);
    }
    tr.center_of_mass.push_back(e.size() ? (1.0 / n) * c : Vec2{});
    tr.mean_displacement.push_back(e.size() ? disp / n : 0.0);
}

} // namespace

Trajectory simulate(const VortexEnsemble& ens, double t_end, double dt, int record_every,
                    const SimulationOptions& opt, VortexEnsemble* final_state) {
    ens.validate();
    require(t_end >= 0.0 && std::isfinite(t_end), "t_end must be non-negative");
    require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    require(record_every >= 1, "record_every must be at least 1");
    Trajectory tr;
    VortexEnsemble cur = ens;
    const std::vector<Vec2> x0 = ens.positions;
    const double t0 = ens.time;
    record(tr, cur, x0);
    long steps = std::lround(t_end / dt);
    if (std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end)) steps = static_cast<long>(std::ceil(t_end / dt));
    for (long s = 1; s <= steps; ++s) {
        const double h = (s == steps) ? (t0 + t_end) - cur.time : dt;
        if (h <= 0.0) break;
        try {
            if (opt.stochastic) {
                cur = step_langevin(cur, h);
            } else {
                const std::uint64_t idx = cur.step_index;
                const double t_target = cur.time + h;
                double remaining = h;
                while (remaining > 1e-14 * h) {
                    double hs = remaining;
                    if (opt.auto_substep) {
                        const double bound = stability_bound(cur);
                        if (hs > bound) hs = remaining / std::ceil(remaining / (0.999999 * bound));
                    }
                    cur = step_deterministic(cur, hs, opt.scheme);
                    remaining -= hs;
                }
                cur.time = t_target;
                cur.step_index = idx + 1;
            }
        } catch (const NearCollision& e) {
            throw NearCollision(e.first(), e.second(), e.distance(), cur.time, s);
        } catch (const NumericalError& e) {
            throw NumericalError(e.what(), cur.time, s);
        }
        if (s % record_every == 0 || s == steps) record(tr, cur, x0);
    }
    if (final_state) *final_state = cur;
    return tr;
}

} // namespace pinflow
