#include "pinflow/error.hpp"
#include "pinflow/poisson.hpp"
#include "pinflow/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace pinflow {

namespace {

double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

/// Removes the constant and Nyquist-corner modes, the kernel of div(a grad)
ScalarField project_range(const ScalarField& f) {
    Spectrum s = forward_fft(f);
    const int ci = s.cols() - 1, rj = s.rows() / 2;
    s(0, 0) = 0.0;
    s(ci, 0) = 0.0;
    s(0, rj) = 0.0;
    s(ci, rj) = 0.0;
    return inverse_fft(s);
}

/// Inverse of abar * |k~|^2 with Nyquist-free wavenumbers, the spectral preconditioner
ScalarField precondition(const ScalarField& r, double abar) {
    Spectrum s = forward_fft(r);
    for (int j = 0; j < s.rows(); ++j)
        for (int i = 0; i < s.cols(); ++i) {
            const double kx = s.kx_d1(i), ky = s.ky_d1(j), k2 = kx * kx + ky * ky;
            s(i, j) = k2 == 0.0 ? 0.0 : s(i, j) / (abar * k2);
        }
    return inverse_fft(s);
}

} // namespace

ScalarField apply_div_a_grad(const ScalarField& phi, const ScalarField& a) {
    return divergence(scale(a, gradient(phi)));
}

EllipticResult elliptic_solve_weighted(const ScalarField& rhs, const ScalarField& weight, EllipticForm form,
                                       const EllipticOptions& opt) {
    const Grid2D& g = rhs.grid();
    require(weight.grid() == g, "weight and rhs grids differ");
    ScalarField a(g);
    for (std::size_t k = 0; k < a.size(); ++k) {
        require(weight[k] > 0.0 && std::isfinite(weight[k]), "elliptic weight must be positive and finite");
        a[k] = form == EllipticForm::div_a_grad ? weight[k] : 1.0 / weight[k];
    }
    const double abar = a.mean();
    const int cap = opt.max_iterations > 0 ? opt.max_iterations : 10 * std::max(g.nx(), g.ny());

    // CG on the positive semidefinite operator -div(a grad)
    ScalarField b = -1.0 * project_range(rhs);
    EllipticResult res{ScalarField(g), 0, 0.0};
    const double bnorm = std::sqrt(inner(b, b));
    if (bnorm == 0.0) return res;

    ScalarField& x = res.phi;
    ScalarField r = b;
    ScalarField z = precondition(r, abar);
    ScalarField p = z;
    double rz = inner(r, z);
    for (int it = 1; it <= cap; ++it) {
        ScalarField Ap = -1.0 * apply_div_a_grad(p, a);
        const double pAp = inner(p, Ap);
        if (!(pAp > 0.0)) throw NumericalError("elliptic solve broke down (non-positive curvature)");
        const double step = rz / pAp;
        x.axpy(step, p);
        r.axpy(-step, Ap);
        res.iterations = it;
        if (std::sqrt(inner(r, r)) <= opt.rel_tolerance * bnorm) {
            ScalarField true_r = apply_div_a_grad(x, a) + b;
            res.relative_residual = std::sqrt(inner(true_r, true_r)) / bnorm;
            return res;
        }
        z = precondition(r, abar);
        const double rz_new = inner(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
    }
    throw NumericalError("elliptic solve did not converge within " + std::to_string(cap) + " iterations");
}

} // namespace pinflow
