#include "pinflow/error.hpp"
#include "pinflow/homog.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace pinflow {

namespace {

/// Gauss-Legendre nodes and weights on [0, 1]
struct Quadrature {
    std::vector<double> x, w;
};

Quadrature gauss_legendre(int n) {
    Quadrature q;
    q.x.resize(n);
    q.w.resize(n);
    for (int k = 0; k < n; ++k) {
        double z = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        q.x[k] = 0.5 * (1.0 - z);
        q.w[k] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return q;
}

/// Face flux f = c_lo * mu_lo + c_hi * mu_hi in the direction lo -> hi
struct FaceCoef {
    double lo = 0.0, hi = 0.0;
};

} // namespace

InvariantMeasure viscous_invariant_measure(const PinningLandscape& land, double alpha, double beta, Vec2 force,
                                           double temperature, const InvariantMeasureOptions& opt) {
    require(temperature > 0.0, "viscous_invariant_measure: temperature must be positive");
    require(alpha >= 0.0, "viscous_invariant_measure: alpha must be non-negative");
    require(opt.resolution >= 8 && opt.resolution % 2 == 0, "viscous_invariant_measure: resolution must be even and >= 8");
    require(opt.edge_quadrature >= 1, "viscous_invariant_measure: edge_quadrature must be positive");

    const int n = opt.resolution;
    const double h = 1.0 / n;
    const double T = temperature;
    const Grid2D g = cell_grid(n);
    const Quadrature gl = gauss_legendre(opt.edge_quadrature);
    const std::size_t N = g.size();

    auto hv = [&](Vec2 y) { return land.cell_value(y, opt.x_slow); };
    // tilted potential of the gradient part; the linear tilt uses unwrapped coordinates
    auto U = [&](Vec2 y) { return alpha * (hv(y) - dot(force, y)); };

    std::vector<double> hnode(N);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) hnode[g.index(i, j)] = hv(g.point(i, j));
    const double href = *std::min_element(hnode.begin(), hnode.end());

    // J grad h mu = J grad phi * (E mu); with alpha > 0, phi = -(T/alpha) e^{-alpha h/T} and E = e^{alpha h/T}
    const bool rotating = beta != 0.0;
    const bool fold = alpha > 0.0;
    auto phi = [&](Vec2 y) {
        return fold ? -(T / alpha) * std::exp(-alpha * (hv(y) - href) / T) : hv(y);
    };
    std::vector<double> E(N, 1.0), corner;
    if (rotating) {
        if (fold)
            for (std::size_t k = 0; k < N; ++k) E[k] = std::exp(alpha * (hnode[k] - href) / T);
        corner.resize(N);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) corner[g.index(i, j)] = phi({(i + 0.5) * h, (j + 0.5) * h});
    }
    auto corner_at = [&](int i, int j) { return corner[g.wrap_index(i, j)]; };

    auto gradient_part = [&](Vec2 y0, Vec2 dir) {
        const double u0 = U(y0), u1 = U(y0 + h * dir);
        const double us = std::max(u0, u1);
        double integral = 0.0;
        for (std::size_t q = 0; q < gl.x.size(); ++q) integral += gl.w[q] * std::exp((U(y0 + (gl.x[q] * h) * dir) - us) / T);
        integral *= h;
        return FaceCoef{T * std::exp((u0 - us) / T) / integral, -T * std::exp((u1 - us) / T) / integral};
    };

    std::vector<FaceCoef> fx(N), fy(N);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const std::size_t c = g.index(i, j), e = g.wrap_index(i + 1, j), nn = g.wrap_index(i, j + 1);
            const Vec2 y0 = g.point(i, j);
            FaceCoef ax = gradient_part(y0, {1.0, 0.0});
            FaceCoef ay = gradient_part(y0, {0.0, 1.0});
            if (rotating) {
                // face-normal components of J grad phi from corner differences
                const double jx = -(corner_at(i, j) - corner_at(i, j - 1)) / h;
                const double jy = (corner_at(i, j) - corner_at(i - 1, j)) / h;
                ax.lo += 0.5 * beta * (jx * E[c] + force.y);
                ax.hi += 0.5 * beta * (jx * E[e] + force.y);
                ay.lo += 0.5 * beta * (jy * E[c] - force.x);
                ay.hi += 0.5 * beta * (jy * E[nn] - force.x);
            }
            fx[c] = ax;
            fy[c] = ay;
        }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(8 * N);
    const double ih = 1.0 / h;
    auto add_face = [&](std::size_t lo, std::size_t hi, FaceCoef f) {
        trip.emplace_back(lo, lo, -f.lo * ih);
        trip.emplace_back(lo, hi, -f.hi * ih);
        trip.emplace_back(hi, lo, f.lo * ih);
        trip.emplace_back(hi, hi, f.hi * ih);
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const std::size_t c = g.index(i, j);
            add_face(c, g.wrap_index(i + 1, j), fx[c]);
            add_face(c, g.wrap_index(i, j + 1), fy[c]);
        }
    Eigen::SparseMatrix<double> L(N, N);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();

    double diag_max = 0.0;
    for (std::size_t k = 0; k < N; ++k) diag_max = std::max(diag_max, std::abs(L.coeff(k, k)));
    Eigen::SparseMatrix<double> A = L;
    const double shift = 1e-12 * diag_max;
    for (std::size_t k = 0; k < N; ++k) A.coeffRef(k, k) -= shift;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NumericalError("viscous_invariant_measure: factorization failed");

    Eigen::VectorXd x(N);
    for (std::size_t k = 0; k < N; ++k) x[k] = fold ? std::exp(-alpha * (hnode[k] - href) / T) : 1.0;
    const double cell = h * h;
    auto residual_of = [&](const Eigen::VectorXd& v) { return std::sqrt(cell * (L * v).squaredNorm()); };

    InvariantMeasure out{ScalarField(g)};
    double res = INFINITY, best = INFINITY;
    int it = 0, stalled = 0;
    for (; it < opt.max_iterations; ++it) {
        x = lu.solve(x).eval();
        const double mass = cell * x.sum();
        if (!std::isfinite(mass) || mass == 0.0) throw NumericalError("viscous_invariant_measure: iteration broke down");
        x /= mass;
        res = residual_of(x);
        if (res <= opt.tolerance) break;
        if (res < 0.5 * best) {
            best = res;
            stalled = 0;
        } else if (++stalled >= 4) {
            break;
        }
    }
    if (!(res <= opt.tolerance))
        throw NumericalError("viscous_invariant_measure: power iteration stagnated at residual " + std::to_string(res));

    for (std::size_t k = 0; k < N; ++k) out.density[k] = x[k];
    out.temperature = temperature;
    out.alpha = alpha;
    out.beta = beta;
    out.force = force;
    out.residual = res;
    out.iterations = it + 1;
    Vec2 cur{};
    for (std::size_t c = 0; c < N; ++c) {
        const int i = static_cast<int>(c % n), j = static_cast<int>(c / n);
        cur.x += fx[c].lo * x[c] + fx[c].hi * x[g.wrap_index(i + 1, j)];
        cur.y += fy[c].lo * x[c] + fy[c].hi * x[g.wrap_index(i, j + 1)];
    }
    out.current = cell * cur;
    return out;
}

Vec2 cell_velocity_viscous(const PinningLandscape& land, double alpha, double beta, Vec2 force, double temperature,
                           const InvariantMeasureOptions& opt) {
    return viscous_invariant_measure(land, alpha, beta, force, temperature, opt).current;
}

} // namespace pinflow
