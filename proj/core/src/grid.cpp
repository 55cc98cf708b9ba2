#include "pinflow/grid.hpp"
#include "pinflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pinflow {

Grid2D::Grid2D(int nx, int ny, double lx, double ly, Vec2 origin)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), origin_(origin) {
    require(nx >= 8 && ny >= 8, "grid needs at least 8 cells per direction");
    require(nx % 2 == 0 && ny % 2 == 0, "grid cell counts must be even");
    require(lx > 0.0 && ly > 0.0 && std::isfinite(lx) && std::isfinite(ly), "grid box sides must be positive");
    require(std::isfinite(origin.x) && std::isfinite(origin.y), "grid origin must be finite");
}

Grid2D Grid2D::unit_torus(int n) { return Grid2D(n, n, 1.0, 1.0, {-0.5, -0.5}); }

Grid2D Grid2D::centered_box(int n, double L) { return Grid2D(n, n, L, L, {-0.5 * L, -0.5 * L}); }

std::size_t Grid2D::wrap_index(int i, int j) const {
    i %= nx_;
    if (i < 0) i += nx_;
    j %= ny_;
    if (j < 0) j += ny_;
    return index(i, j);
}

bool Grid2D::operator==(const Grid2D& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_ && origin_ == o.origin_;
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const Grid2D& g, double value) : grid_(g), data_(g.size(), value) {}

ScalarField::ScalarField(const Grid2D& g, std::vector<double> values) : grid_(g), data_(std::move(values)) {
    require(data_.size() == g.size(), "scalar field size does not match grid");
}

ScalarField ScalarField::sample(const Grid2D& g, const std::function<double(Vec2)>& f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out(i, j) = f(g.point(i, j));
    return out;
}

double ScalarField::integral() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s * grid_.cell_area();
}

double ScalarField::mean() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s / static_cast<double>(data_.size());
}

double ScalarField::min() const { return *std::min_element(data_.begin(), data_.end()); }
double ScalarField::max() const { return *std::max_element(data_.begin(), data_.end()); }

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::l2_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s * grid_.cell_area());
}

bool ScalarField::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return axpy(1.0, o); }
ScalarField& ScalarField::operator-=(const ScalarField& o) { return axpy(-1.0, o); }

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
    require(grid_ == o.grid_, "field grids differ");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
    require(a.grid() == b.grid(), "field grids differ");
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(const Grid2D& g, Vec2 value) : x_(g, value.x), y_(g, value.y) {}

VectorField::VectorField(ScalarField x, ScalarField y) : x_(std::move(x)), y_(std::move(y)) {
    require(x_.grid() == y_.grid(), "vector components live on different grids");
}

VectorField VectorField::sample(const Grid2D& g, const std::function<Vec2(Vec2)>& f) {
    VectorField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out.set(g.index(i, j), f(g.point(i, j)));
    return out;
}

double VectorField::max_norm() const {
    double m = 0.0;
    for (std::size_t k = 0; k < size(); ++k) m = std::max(m, std::hypot(x_[k], y_[k]));
    return m;
}

double VectorField::l2_norm() const { return std::hypot(x_.l2_norm(), y_.l2_norm()); }

bool VectorField::all_finite() const { return x_.all_finite() && y_.all_finite(); }

VectorField& VectorField::operator+=(const VectorField& o) {
    x_ += o.x_;
    y_ += o.y_;
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    x_ -= o.x_;
    y_ -= o.y_;
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    x_ *= s;
    y_ *= s;
    return *this;
}

VectorField perp(const VectorField& v) {
    VectorField out(v.grid());
    for (std::size_t k = 0; k < v.size(); ++k) out.set(k, perp(v[k]));
    return out;
}

VectorField mixedflow_apply(double alpha, double beta, const VectorField& g) {
    VectorField out(g.grid());
    for (std::size_t k = 0; k < g.size(); ++k) out.set(k, mixedflow_apply(alpha, beta, g[k]));
    return out;
}

VectorField scale(const ScalarField& s, const VectorField& v) {
    require(s.grid() == v.grid(), "field grids differ");
    VectorField out(v.grid());
    for (std::size_t k = 0; k < v.size(); ++k) out.set(k, s[k] * v[k]);
    return out;
}

// ---------------------------------------------------------------- ComplexField

ComplexField::ComplexField(const Grid2D& g, std::complex<double> value) : grid_(g), data_(g.size(), value) {}

ComplexField::ComplexField(const Grid2D& g, std::vector<std::complex<double>> values)
    : grid_(g), data_(std::move(values)) {
    require(data_.size() == g.size(), "complex field size does not match grid");
}

ComplexField ComplexField::sample(const Grid2D& g, const std::function<std::complex<double>(Vec2)>& f) {
    ComplexField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out[g.index(i, j)] = f(g.point(i, j));
    return out;
}

bool ComplexField::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const std::complex<double>& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

} // namespace pinflow
