#include "pinflow/glfield.hpp"

#include "pinflow/error.hpp"
#include "pinflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace pinflow {

using cplx = std::complex<double>;

void SyntheticVortexConfig::validate() const {
    require(epsilon > 0.0 && std::isfinite(epsilon), "SyntheticVortexConfig: epsilon must be positive");
    require(centers.size() == degrees.size(), "SyntheticVortexConfig: centers and degrees differ in length");
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t k = i + 1; k < centers.size(); ++k)
            require(norm(centers[i] - centers[k]) >= 10.0 * epsilon,
                    "SyntheticVortexConfig: vortex separation below 10 epsilon");
}

double vortex_profile(VortexProfile p, double r) {
    switch (p) {
    case VortexProfile::tanh: return std::tanh(r / std::numbers::sqrt2);
    case VortexProfile::polynomial: return r / std::sqrt(r * r + 2.0);
    }
    return 1.0;
}

ComplexField synthesize_field(const SyntheticVortexConfig& cfg, const Grid2D& g) {
    cfg.validate();
    const double margin = 10.0 * cfg.epsilon;
    for (const Vec2& a : cfg.centers)
        require(a.x - g.origin().x >= margin && g.origin().x + g.lx() - a.x >= margin && a.y - g.origin().y >= margin &&
                    g.origin().y + g.ly() - a.y >= margin,
                "synthesize_field: vortex center within 10 epsilon of the box edge");
    return ComplexField::sample(g, [&](Vec2 x) {
        cplx u = std::polar(1.0, cfg.phase);
        for (std::size_t i = 0; i < cfg.centers.size(); ++i) {
            const Vec2 d = x - cfg.centers[i];
            const double r = norm(d);
            if (r == 0.0) return cplx{0.0, 0.0};
            u *= vortex_profile(cfg.profile, r / cfg.epsilon) * std::polar(1.0, cfg.degrees[i] * std::atan2(d.y, d.x));
        }
        return u;
    });
}

namespace {

/// Fourth-order differences along one axis; stride selects x (1) or y (nx)
template <class T>
std::vector<T> fd_derivative(const std::vector<T>& f, const Grid2D& g, int axis) {
    const int nx = g.nx(), ny = g.ny();
    const int n = axis == 0 ? nx : ny;
    const double h = axis == 0 ? g.hx() : g.hy();
    std::vector<T> out(f.size());
    auto at = [&](int line, int k) -> const T& { return axis == 0 ? f[g.index(k, line)] : f[g.index(line, k)]; };
    auto set = [&](int line, int k, T v) { (axis == 0 ? out[g.index(k, line)] : out[g.index(line, k)]) = v; };
    const int lines = axis == 0 ? ny : nx;
    for (int l = 0; l < lines; ++l) {
        set(l, 0, (-3.0 * at(l, 0) + 4.0 * at(l, 1) - at(l, 2)) / (2.0 * h));
        set(l, 1, (at(l, 2) - at(l, 0)) / (2.0 * h));
        for (int k = 2; k < n - 2; ++k)
            set(l, k, (-at(l, k + 2) + 8.0 * at(l, k + 1) - 8.0 * at(l, k - 1) + at(l, k - 2)) / (12.0 * h));
        set(l, n - 2, (at(l, n - 1) - at(l, n - 3)) / (2.0 * h));
        set(l, n - 1, (3.0 * at(l, n - 1) - 4.0 * at(l, n - 2) + at(l, n - 3)) / (2.0 * h));
    }
    return out;
}

DerivativeMethod resolve(const ComplexField& u, DerivativeMethod m) {
    if (m != DerivativeMethod::automatic) return m;
    return boundary_winding(u) == 0 ? DerivativeMethod::spectral : DerivativeMethod::finite_difference;
}

ScalarField curl_with(const VectorField& j, DerivativeMethod m) {
    if (m == DerivativeMethod::spectral) return curl(j);
    const Grid2D& g = j.grid();
    const auto dvy = fd_derivative(j.y().values(), g, 0);
    const auto dvx = fd_derivative(j.x().values(), g, 1);
    ScalarField out(g);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = dvy[k] - dvx[k];
    return out;
}

} // namespace

std::pair<ComplexField, ComplexField> field_gradient(const ComplexField& u, DerivativeMethod method) {
    const DerivativeMethod m = resolve(u, method);
    if (m == DerivativeMethod::spectral) return gradient(u);
    const Grid2D& g = u.grid();
    return {ComplexField(g, fd_derivative(u.values(), g, 0)), ComplexField(g, fd_derivative(u.values(), g, 1))};
}

CurrentVorticity supercurrent_and_vorticity(const ComplexField& u, double epsilon, DerivativeMethod method) {
    const Grid2D& g = u.grid();
    CurrentVorticity out{VectorField(g), ScalarField(g), DerivativeMethod::spectral, {}};
    out.method = resolve(u, method);
    if (epsilon > 0.0 && std::max(g.hx(), g.hy()) > epsilon / 4.0)
        out.warnings.push_back("grid spacing exceeds epsilon/4; vortex cores are under-resolved");
    const auto [ux, uy] = field_gradient(u, out.method);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const cplx c = std::conj(u[k]);
        out.j.set(k, {std::imag(c * ux[k]), std::imag(c * uy[k])});
    }
    out.mu = curl_with(out.j, out.method);
    return out;
}

int winding_number(const ComplexField& u, int i0, int j0, int i1, int j1) {
    const Grid2D& g = u.grid();
    require(0 <= i0 && i0 < i1 && i1 < g.nx() && 0 <= j0 && j0 < j1 && j1 < g.ny(),
            "winding_number: invalid rectangle");
    std::vector<cplx> path;
    for (int i = i0; i < i1; ++i) path.push_back(u(i, j0));
    for (int j = j0; j < j1; ++j) path.push_back(u(i1, j));
    for (int i = i1; i > i0; --i) path.push_back(u(i, j1));
    for (int j = j1; j > j0; --j) path.push_back(u(i0, j));
    double total = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const cplx a = path[k], b = path[(k + 1) % path.size()];
        if (a == 0.0 || b == 0.0) throw NumericalError("winding_number: order parameter vanishes on the loop");
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

int boundary_winding(const ComplexField& u) {
    return winding_number(u, 0, 0, u.grid().nx() - 1, u.grid().ny() - 1);
}

double integrate_disk(const ScalarField& f, Vec2 center, double radius) {
    const Grid2D& g = f.grid();
    double acc = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (norm(g.point(i, j) - center) < radius) acc += f(i, j);
    return acc * g.cell_area();
}

namespace {

double glue(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double glue_derivative(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

} // namespace

double cutoff(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double t = s - 1.0;
    return glue(1.0 - t) / (glue(1.0 - t) + glue(t));
}

double cutoff_derivative(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double t = s - 1.0;
    const double a = glue(1.0 - t), b = glue(t);
    const double da = -glue_derivative(1.0 - t), db = glue_derivative(t);
    return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

ModulatedEnergyReport modulated_energy(const ComplexField& u, const VectorField& v, double N,
                                       const PinningLandscape& land, double R, Vec2 z, double epsilon,
                                       DerivativeMethod method) {
    const Grid2D& g = u.grid();
    require(v.grid() == g, "modulated_energy: u and v live on different grids");
    require(R > 0.0 && epsilon > 0.0 && N > 0.0, "modulated_energy: R, epsilon and N must be positive");

    const auto [ux, uy] = field_gradient(u, method);
    const CurrentVorticity cv = supercurrent_and_vorticity(u, 0.0, resolve(u, method));
    const cplx I{0.0, 1.0};
    std::vector<double> dens(g.size()), vort(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const int i = static_cast<int>(k % g.nx()), j = static_cast<int>(k / g.nx());
        const double a = land.eval(g.point(i, j)).a;
        const Vec2 vk = v[k];
        const cplx ex = ux[k] - I * u[k] * (N * vk.x), ey = uy[k] - I * u[k] * (N * vk.y);
        const double pot = 1.0 - std::norm(u[k]);
        dens[k] = 0.5 * a * (std::norm(ex) + std::norm(ey) + a / (2.0 * epsilon * epsilon) * pot * pot);
        vort[k] = a * cv.mu[k];
    }
    const double lg = std::abs(std::log(epsilon));
    auto evaluate = [&](Vec2 zz, double& E, double& D) {
        double e = 0.0, m = 0.0;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const double chi = cutoff(norm(g.point(i, j) - zz) / R);
                if (chi == 0.0) continue;
                e += chi * dens[g.index(i, j)];
                m += chi * vort[g.index(i, j)];
            }
        E = e * g.cell_area();
        D = E - 0.5 * lg * m * g.cell_area();
    };

    ModulatedEnergyReport rep;
    rep.R = R;
    rep.N = N;
    rep.z = z;
    evaluate(z, rep.E, rep.D);
    rep.E_star = -INFINITY;
    rep.D_star = -INFINITY;
    const Vec2 lo = g.origin(), hi = g.origin() + Vec2{g.lx(), g.ly()};
    for (long m = static_cast<long>(std::ceil(lo.x / R)); m * R <= hi.x; ++m)
        for (long n = static_cast<long>(std::ceil(lo.y / R)); n * R <= hi.y; ++n) {
            double E, D;
            evaluate({m * R, n * R}, E, D);
            rep.E_star = std::max(rep.E_star, E);
            rep.D_star = std::max(rep.D_star, D);
        }
    if (!std::isfinite(rep.E_star)) rep.E_star = rep.E, rep.D_star = rep.D;
    return rep;
}

} // namespace pinflow
