#include "pinflow/metrics.hpp"

#include "pinflow/error.hpp"
#include "pinflow/parallel.hpp"
#include "pinflow/poisson.hpp"
#include "pinflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pinflow {

namespace {

/// Kernel truncation radius in bandwidths
constexpr double kernel_reach = 8.0;

/// Samples of a 1D Gaussian on a window of grid nodes along one axis
struct Kernel1D {
    int start = 0;
    std::vector<double> w;
    double sum = 0.0;

    double at(int k, int n, bool periodic) const {
        int off = k - start;
        if (periodic) off = ((off % n) + n) % n;
        return off >= 0 && off < static_cast<int>(w.size()) ? w[off] : 0.0;
    }
};

Kernel1D kernel_1d(double x, double origin, double h, int n, double bw, bool periodic) {
    const double L = h * n;
    const double c = (x - origin) / h;
    const int reach = static_cast<int>(std::ceil(kernel_reach * bw / h));
    int lo = static_cast<int>(std::floor(c)) - reach, hi = static_cast<int>(std::ceil(c)) + reach;
    if (periodic) {
        if (hi - lo + 1 > n) hi = lo + n - 1;
    } else {
        lo = std::max(lo, 0);
        hi = std::min(hi, n - 1);
    }
    Kernel1D k;
    k.start = lo;
    for (int i = lo; i <= hi; ++i) {
        double d = origin + i * h - x;
        if (periodic) d -= L * std::round(d / L);
        const double v = std::exp(-0.5 * d * d / (bw * bw));
        k.w.push_back(v);
        k.sum += v;
    }
    return k;
}

} // namespace

ScalarField deposit_empirical(const std::vector<Vec2>& positions, const Grid2D& g, double bandwidth, bool periodic) {
    require(!positions.empty(), "deposit_empirical: empty ensemble");
    require(std::isfinite(bandwidth) && bandwidth >= 2.0 * std::max(g.hx(), g.hy()),
            "deposit_empirical: bandwidth must be at least twice the grid spacing");
    const std::size_t n = positions.size();
    std::vector<Kernel1D> kx(n), ky(n);
    std::vector<double> scale(n);
    for (std::size_t p = 0; p < n; ++p) {
        kx[p] = kernel_1d(positions[p].x, g.origin().x, g.hx(), g.nx(), bandwidth, periodic);
        ky[p] = kernel_1d(positions[p].y, g.origin().y, g.hy(), g.ny(), bandwidth, periodic);
        const double total = kx[p].sum * ky[p].sum;
        if (!(total > 0.0)) throw NumericalError("deposit_empirical: a particle lies outside the grid");
        scale[p] = 1.0 / (static_cast<double>(n) * total * g.cell_area());
    }
    ScalarField out(g);
    const int nx = g.nx(), ny = g.ny();
    parallel_for(static_cast<std::size_t>(ny), [&](std::size_t b, std::size_t e) {
        for (std::size_t jj = b; jj < e; ++jj) {
            const int j = static_cast<int>(jj);
            for (std::size_t p = 0; p < n; ++p) {
                const double wy = ky[p].at(j, ny, periodic);
                if (wy == 0.0) continue;
                const double s = wy * scale[p];
                const Kernel1D& k = kx[p];
                for (std::size_t q = 0; q < k.w.size(); ++q) {
                    int i = k.start + static_cast<int>(q);
                    if (periodic) i = ((i % nx) + nx) % nx;
                    out[g.index(i, j)] += s * k.w[q];
                }
            }
        }
    });
    return out;
}

ScalarField deposit_empirical(const VortexEnsemble& ens, const Grid2D& g, double bandwidth, bool periodic) {
    return deposit_empirical(ens.positions, g, bandwidth, periodic);
}

double hminus1_distance(const ScalarField& m1, const ScalarField& m2) {
    require(m1.grid() == m2.grid(), "hminus1_distance: densities live on different grids");
    ScalarField diff = m1;
    diff -= m2;
    if (diff.max_abs() == 0.0) return 0.0;
    return gradient(poisson_solve(diff, PoissonMode::periodic_meanfree)).l2_norm();
}

Vec2 first_moment(const ScalarField& m) {
    const Grid2D& g = m.grid();
    Vec2 acc{};
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) acc += m(i, j) * g.point(i, j);
    return g.cell_area() * acc;
}

double wasserstein1_exact(const ScalarField& m1, const ScalarField& m2, bool periodic) {
    const Grid2D& g = m1.grid();
    require(m2.grid() == g, "wasserstein1_exact: densities live on different grids");
    require(g.size() <= 1024, "wasserstein1_exact: grid too large for the exact solver");
    const double mass1 = m1.integral(), mass2 = m2.integral();
    require(std::abs(mass1 - mass2) <= 1e-12 * std::max({1.0, std::abs(mass1), std::abs(mass2)}),
            "wasserstein1_exact: densities must carry equal mass");

    // Only the signed difference matters: supplies where m1 > m2, demands where m2 > m1.
    std::vector<Vec2> src, dst;
    std::vector<double> supply, demand;
    double scale = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double d = (m1(i, j) - m2(i, j)) * g.cell_area();
            scale += std::abs(d);
            if (d > 0.0) src.push_back(g.point(i, j)), supply.push_back(d);
            else if (d < 0.0) dst.push_back(g.point(i, j)), demand.push_back(-d);
        }
    if (src.empty() || dst.empty()) return 0.0;
    const double tol = 1e-14 * scale;

    const std::size_t S = src.size(), D = dst.size();
    auto cost = [&](std::size_t i, std::size_t j) {
        Vec2 d = src[i] - dst[j];
        if (periodic) {
            d.x -= g.lx() * std::round(d.x / g.lx());
            d.y -= g.ly() * std::round(d.y / g.ly());
        }
        return norm(d);
    };
    std::vector<double> flow(S * D, 0.0);

    // Successive shortest paths with node potentials; node layout: 0 = super source,
    // 1..S sources, S+1..S+D sinks, S+D+1 = super sink.
    const std::size_t V = S + D + 2, sink = V - 1;
    std::vector<double> pot(V, 0.0), dist(V);
    std::vector<long> prev(V);
    std::vector<char> done(V);
    constexpr double inf = std::numeric_limits<double>::infinity();
    while (true) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(prev.begin(), prev.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        dist[0] = 0.0;
        while (true) {
            std::size_t u = V;
            for (std::size_t k = 0; k < V; ++k)
                if (!done[k] && dist[k] < inf && (u == V || dist[k] < dist[u])) u = k;
            if (u == V) break;
            done[u] = 1;
            auto relax = [&](std::size_t v, double c) {
                const double nd = dist[u] + std::max(0.0, c + pot[u] - pot[v]);
                if (nd < dist[v]) dist[v] = nd, prev[v] = static_cast<long>(u);
            };
            if (u == 0) {
                for (std::size_t i = 0; i < S; ++i)
                    if (supply[i] > tol) relax(1 + i, 0.0);
            } else if (u <= S) {
                const std::size_t i = u - 1;
                for (std::size_t j = 0; j < D; ++j) relax(1 + S + j, cost(i, j));
            } else if (u < sink) {
                const std::size_t j = u - 1 - S;
                for (std::size_t i = 0; i < S; ++i)
                    if (flow[i * D + j] > tol) relax(1 + i, -cost(i, j));
                if (demand[j] > tol) relax(sink, 0.0);
            }
        }
        if (!(dist[sink] < inf)) break;
        for (std::size_t k = 0; k < V; ++k)
            if (dist[k] < inf) pot[k] += dist[k];

        // bottleneck along the path
        std::vector<std::size_t> path;
        for (long v = static_cast<long>(sink); v != -1; v = prev[v]) path.push_back(static_cast<std::size_t>(v));
        std::reverse(path.begin(), path.end());
        double push = std::min(supply[path[1] - 1], demand[path[path.size() - 2] - 1 - S]);
        for (std::size_t k = 1; k + 2 < path.size(); ++k) {
            const std::size_t a = path[k], b = path[k + 1];
            if (a > S) push = std::min(push, flow[(b - 1) * D + (a - 1 - S)]);
        }
        supply[path[1] - 1] -= push;
        demand[path[path.size() - 2] - 1 - S] -= push;
        for (std::size_t k = 1; k + 2 < path.size(); ++k) {
            const std::size_t a = path[k], b = path[k + 1];
            if (a <= S) flow[(a - 1) * D + (b - 1 - S)] += push;
            else flow[(b - 1) * D + (a - 1 - S)] -= push;
        }
    }
    for (double s : supply)
        if (s > 1e-9 * scale) throw NumericalError("wasserstein1_exact: transport problem left unmet supply");
    double total = 0.0;
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < D; ++j) total += flow[i * D + j] * cost(i, j);
    return total;
}

} // namespace pinflow
