#pragma once

/// @file grid.hpp
/// @brief Uniform periodic grids and the scalar, vector and complex fields living on them

#include "pinflow/vec2.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace pinflow {

/// Uniform cell-vertex grid on the box [x0, x0 + Lx) x [y0, y0 + Ly)
///
/// Node (i, j) sits at (x0 + i*hx, y0 + j*hy). Storage is row-major with
/// x fastest: index = j*nx + i.
class Grid2D {
public:
    Grid2D(int nx, int ny, double lx, double ly, Vec2 origin = {0.0, 0.0});

    /// Unit torus [-1/2, 1/2)^2 sampled n x n
    static Grid2D unit_torus(int n);
    /// Square box of side L centered at the origin
    static Grid2D centered_box(int n, double L);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return lx_ / nx_; }
    double hy() const { return ly_ / ny_; }
    double cell_area() const { return hx() * hy(); }
    Vec2 origin() const { return origin_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

    double x(int i) const { return origin_.x + i * hx(); }
    double y(int j) const { return origin_.y + j * hy(); }
    Vec2 point(int i, int j) const { return {x(i), y(j)}; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    /// Index with periodic wrap of i and j
    std::size_t wrap_index(int i, int j) const;

    bool operator==(const Grid2D& o) const;
    bool operator!=(const Grid2D& o) const { return !(*this == o); }

private:
    int nx_, ny_;
    double lx_, ly_;
    Vec2 origin_;
};

/// Real scalar samples on a grid
class ScalarField {
public:
    explicit ScalarField(const Grid2D& g, double value = 0.0);
    ScalarField(const Grid2D& g, std::vector<double> values);

    /// Samples f at every grid node
    static ScalarField sample(const Grid2D& g, const std::function<double(Vec2)>& f);

    const Grid2D& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }
    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }
    double& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
    double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    /// Riemann sum over the box (spectrally accurate for periodic integrands)
    double integral() const;
    double mean() const;
    double min() const;
    double max() const;
    double max_abs() const;
    /// Discrete L2 norm sqrt(sum f^2 * cell area)
    double l2_norm() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    /// this += s * o
    ScalarField& axpy(double s, const ScalarField& o);

private:
    Grid2D grid_;
    std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Real 2-vector samples, stored as two component arrays
class VectorField {
public:
    explicit VectorField(const Grid2D& g, Vec2 value = {});
    VectorField(ScalarField x, ScalarField y);

    static VectorField sample(const Grid2D& g, const std::function<Vec2(Vec2)>& f);

    const Grid2D& grid() const { return x_.grid(); }
    std::size_t size() const { return x_.size(); }
    ScalarField& x() { return x_; }
    ScalarField& y() { return y_; }
    const ScalarField& x() const { return x_; }
    const ScalarField& y() const { return y_; }
    Vec2 operator[](std::size_t k) const { return {x_[k], y_[k]}; }
    Vec2 operator()(int i, int j) const { return (*this)[grid().index(i, j)]; }
    void set(std::size_t k, Vec2 v) { x_[k] = v.x; y_[k] = v.y; }

    double max_norm() const;
    double l2_norm() const;
    bool all_finite() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);

private:
    ScalarField x_, y_;
};

/// Pointwise J rotation of a vector field
VectorField perp(const VectorField& v);
/// Pointwise (alpha I - beta J) applied to a vector field
VectorField mixedflow_apply(double alpha, double beta, const VectorField& g);
/// Pointwise scaling of a vector field by a scalar field
VectorField scale(const ScalarField& s, const VectorField& v);

/// Complex samples (order parameters)
class ComplexField {
public:
    explicit ComplexField(const Grid2D& g, std::complex<double> value = {0.0, 0.0});
    ComplexField(const Grid2D& g, std::vector<std::complex<double>> values);

    static ComplexField sample(const Grid2D& g, const std::function<std::complex<double>(Vec2)>& f);

    const Grid2D& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }
    std::complex<double>& operator[](std::size_t k) { return data_[k]; }
    const std::complex<double>& operator[](std::size_t k) const { return data_[k]; }
    std::complex<double> operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
    std::vector<std::complex<double>>& values() { return data_; }
    const std::vector<std::complex<double>>& values() const { return data_; }
    bool all_finite() const;

private:
    Grid2D grid_;
    std::vector<std::complex<double>> data_;
};

} // namespace pinflow
