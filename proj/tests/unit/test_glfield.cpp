#include <doctest.h>

#include "pinflow/error.hpp"
#include "pinflow/glfield.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace pinflow;
using std::numbers::pi;

namespace {

/// Grid with spacing eps / 4 whose central node sits at the origin
Grid2D vortex_grid(double eps, double half_width) {
    int n = static_cast<int>(std::ceil(2 * half_width / (eps / 4)));
    n += n % 2;
    return Grid2D::centered_box(n, n * eps / 4);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) sx += x[k], sy += y[k], sxx += x[k] * x[k], sxy += x[k] * y[k];
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("synthetic fields") {
    const Grid2D g = Grid2D::centered_box(256, 1.0);
    SyntheticVortexConfig none;
    const ComplexField one = synthesize_field(none, g);
    for (std::size_t k = 0; k < one.size(); ++k) CHECK(one[k] == std::complex<double>(1.0, 0.0));

    SyntheticVortexConfig single;
    single.centers = {{0, 0}};
    single.degrees = {1};
    single.epsilon = 0.01;
    const ComplexField u = synthesize_field(single, g);
    CHECK(std::abs(u(128, 128)) == 0.0);
    int ring = 0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double r = norm(g.point(i, j));
            if (std::abs(r - 20 * single.epsilon) > 0.005) continue;
            ++ring;
            CHECK((std::abs(u(i, j)) >= 0.99 && std::abs(u(i, j)) <= 1.0));
        }
    CHECK(ring > 50);

    SyntheticVortexConfig edge = single;
    edge.centers = {{0.495, 0}};
    CHECK_THROWS_AS(synthesize_field(edge, g), ConfigError);
    SyntheticVortexConfig close;
    close.centers = {{0, 0}, {0.05, 0}};
    close.degrees = {1, 1};
    close.epsilon = 0.01;
    CHECK_THROWS_AS(synthesize_field(close, g), ConfigError);
}

TEST_CASE("winding numbers by phase unwinding") {
    const Grid2D g = Grid2D::centered_box(128, 1.0);
    SyntheticVortexConfig cfg;
    cfg.epsilon = 0.01;
    cfg.centers = {{-0.2, -0.1}, {0.15, 0.2}, {0.1, -0.25}};
    cfg.degrees = {1, 1, 1};
    for (auto profile : {VortexProfile::tanh, VortexProfile::polynomial}) {
        cfg.profile = profile;
        const ComplexField u = synthesize_field(cfg, g);
        CHECK(boundary_winding(u) == 3);
        // left half encloses only the first vortex
        CHECK(winding_number(u, 2, 2, 60, 125) == 1);
        CHECK(winding_number(u, 70, 2, 125, 125) == 2);
    }
    cfg.degrees = {1, 1, -1};
    CHECK(boundary_winding(synthesize_field(cfg, g)) == 1);
}

TEST_CASE("supercurrent examples") {
    const Grid2D g = Grid2D::unit_torus(64);
    const ComplexField real = ComplexField::sample(g, [](Vec2 x) { return std::complex<double>(1.0 + 0.3 * std::sin(2 * pi * x.x), 0.0); });
    const CurrentVorticity r = supercurrent_and_vorticity(real);
    CHECK(r.j.max_norm() == 0.0);
    CHECK(r.mu.max_abs() == 0.0);

    const Vec2 k{2 * pi * 3, -2 * pi * 2};
    const ComplexField wave = ComplexField::sample(g, [&](Vec2 x) { return std::polar(1.0, dot(k, x)); });
    const CurrentVorticity w = supercurrent_and_vorticity(wave);
    CHECK(w.method == DerivativeMethod::spectral);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(norm(w.j[i] - k) < 1e-10);
    CHECK(w.mu.max_abs() < 1e-8);
}

TEST_CASE("gauge covariance") {
    const Grid2D g = Grid2D::unit_torus(64);
    const ComplexField u = ComplexField::sample(g, [](Vec2 x) {
        return std::complex<double>(1.0 + 0.2 * std::cos(2 * pi * x.x), 0.3 * std::sin(2 * pi * (x.x + x.y)));
    });
    auto phi = [](Vec2 x) { return 0.3 * std::sin(2 * pi * x.y) + 0.2 * std::cos(2 * pi * (x.x - x.y)); };
    auto grad_phi = [](Vec2 x) {
        const double s = 0.4 * pi * std::sin(2 * pi * (x.x - x.y));
        return Vec2{-s, 0.6 * pi * std::cos(2 * pi * x.y) + s};
    };
    ComplexField ug = u;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) ug[g.index(i, j)] *= std::polar(1.0, phi(g.point(i, j)));
    const VectorField j0 = supercurrent_and_vorticity(u, 0.0, DerivativeMethod::spectral).j;
    const VectorField j1 = supercurrent_and_vorticity(ug, 0.0, DerivativeMethod::spectral).j;
    double gap = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            gap = std::max(gap, norm(j1[k] - j0[k] - std::norm(u[k]) * grad_phi(g.point(i, j))));
        }
    CHECK(gap <= 1e-10);
}

TEST_CASE("Jacobian estimate") {
    const Grid2D g = Grid2D::centered_box(512, 0.8);
    SyntheticVortexConfig cfg;
    cfg.epsilon = 0.01;
    cfg.centers = {{0, 0}};
    cfg.degrees = {1};
    const CurrentVorticity cv = supercurrent_and_vorticity(synthesize_field(cfg, g), cfg.epsilon);
    CHECK(cv.method == DerivativeMethod::finite_difference);
    CHECK(cv.warnings.empty());
    CHECK(std::abs(integrate_disk(cv.mu, {0, 0}, 0.1) - 2 * pi) <= 0.02 * 2 * pi);

    cfg.centers = {{-0.15, 0.05}, {0.2, -0.1}};
    cfg.degrees = {1, 1};
    const CurrentVorticity two = supercurrent_and_vorticity(synthesize_field(cfg, g), cfg.epsilon);
    CHECK(std::abs(two.mu.integral() - 4 * pi) <= 0.01 * 4 * pi);

    const CurrentVorticity coarse = supercurrent_and_vorticity(synthesize_field(cfg, Grid2D::centered_box(64, 0.8)), cfg.epsilon);
    CHECK(!coarse.warnings.empty());
}

TEST_CASE("cut-off function") {
    double worst = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        const double s = 0.5 + 2.0 * k / 4000;
        const double c = cutoff(s);
        if (s <= 1.0) CHECK(c == 1.0);
        if (s >= 2.0) CHECK(c == 0.0);
        if (c > 0.0 && c < 1.0) worst = std::max(worst, std::abs(cutoff_derivative(s)) / std::sqrt(c * (1 - c)));
        if (s > 1.01 && s < 1.99) {
            const double fd = (cutoff(s + 1e-6) - cutoff(s - 1e-6)) / 2e-6;
            CHECK(std::abs(fd - cutoff_derivative(s)) < 1e-6);
        }
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
}

TEST_CASE("modulated energy") {
    const Grid2D g = Grid2D::centered_box(64, 1.0);
    const ModulatedEnergyReport flat =
        modulated_energy(ComplexField(g, 1.0), VectorField(g), 1.0, PinningLandscape::zero(), 0.2, {0, 0}, 0.01);
    CHECK(flat.E == 0.0);
    CHECK(flat.D == 0.0);
    CHECK(flat.E_star == 0.0);

    const double R = 0.05;
    for (double a0 : {1.0, 0.8}) {
        const PinningLandscape land(make_constant_cell(std::log(a0)));
        std::vector<double> lx, E, D, Ds;
        for (double eps : {1e-2, 3e-3, 1e-3}) {
            const Grid2D gv = vortex_grid(eps, 2.2 * R);
            SyntheticVortexConfig cfg;
            cfg.epsilon = eps;
            cfg.centers = {{0, 0}};
            cfg.degrees = {1};
            const ComplexField u = synthesize_field(cfg, gv);
            const ModulatedEnergyReport r = modulated_energy(u, VectorField(gv), 1.0, land, R, {0, 0}, eps);
            // far-field current of the vortex, smoothed on a fixed scale
            const double N = 10.0, delta = R;
            const VectorField v = VectorField::sample(gv, [&](Vec2 x) { return (1.0 / N) / (norm2(x) + delta * delta) * Vec2{-x.y, x.x}; });
            const ModulatedEnergyReport rs = modulated_energy(u, v, N, land, R, {0, 0}, eps);
            lx.push_back(std::abs(std::log(eps)));
            E.push_back(r.E);
            D.push_back(rs.D);
            Ds.push_back(rs.E);
            CHECK(r.E_star >= r.E);
        }
        CHECK(std::abs(slope(lx, E) - pi * a0) <= 0.02 * pi * a0);
        CHECK(std::abs(slope(lx, Ds) - pi * a0) <= 0.05 * pi * a0);
        const double dmax = *std::max_element(D.begin(), D.end()), dmin = *std::min_element(D.begin(), D.end());
        MESSAGE("a0 = " << a0 << ": D over the sweep in [" << dmin << ", " << dmax << "]");
        CHECK(dmax - dmin <= 0.1 * std::max(std::abs(dmax), std::abs(dmin)));
    }
}
