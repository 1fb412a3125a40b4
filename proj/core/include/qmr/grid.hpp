#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>

#include <Eigen/Core>

namespace qmr {

using cplx = std::complex<double>;

/// Phase-space coordinates never exceed four components, so they live on
/// the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

/// Uniform periodic grid on [origin, origin + period)^dim with N points per
/// axis (N a power of two). Flat indices are row-major: the last axis is
/// contiguous, matching FFTW's layout.
class PeriodicGrid {
public:
    PeriodicGrid(int dim, int points_per_axis, double period = 2.0 * std::numbers::pi);
    PeriodicGrid(int dim, int points_per_axis, double period, double origin);

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    double period() const { return period_; }
    double origin() const { return origin_; }
    double spacing() const { return period_ / n_; }
    double cell_volume() const;
    std::size_t size() const { return size_; }

    double coordinate(int index) const { return origin_ + index * spacing(); }
    /// Angular wavenumber 2*pi*m/L of FFT bin `index` (m in [-N/2, N/2)).
    double wavenumber(int index) const;
    /// Largest resolved semiclassical frequency pi*N*h/L.
    double nyquist(double h) const;

    std::array<int, 3> multi_index(std::size_t flat) const;
    std::size_t flat_index(const std::array<int, 3>& idx) const;
    Vec point(std::size_t flat) const;
    Vec wavevector(std::size_t flat) const;

    /// Nearest grid index of coordinate x on one axis, or -1 when x is
    /// farther than tol from a node.
    int node_index(double x, double tol = 1e-12) const;

    friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b);

private:
    int dim_;
    int n_;
    double period_;
    double origin_;
    std::size_t size_;
};

/// Complex samples of a function on a periodic grid, tagged with h.
class GridFunction {
public:
    GridFunction(PeriodicGrid grid, double h);
    GridFunction(PeriodicGrid grid, double h, Eigen::VectorXcd values);

    const PeriodicGrid& grid() const { return grid_; }
    double h() const { return h_; }
    Eigen::VectorXcd& values() { return values_; }
    const Eigen::VectorXcd& values() const { return values_; }
    cplx& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }
    cplx operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    /// Grid-quadrature L^p norm; p = +inf gives the max modulus.
    double lp_norm(double p) const;
    double l2_norm() const { return lp_norm(2.0); }
    cplx inner(const GridFunction& other) const;
    GridFunction& normalize();

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(cplx s);

private:
    PeriodicGrid grid_;
    double h_;
    Eigen::VectorXcd values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);

/// f sampled at every grid point.
GridFunction sample(const PeriodicGrid& grid, double h, const std::function<cplx(const Vec&)>& f);

/// Throws DimensionError unless the two functions share grid and h.
void require_compatible(const GridFunction& a, const GridFunction& b);

/// Smallest power of two >= n.
int next_pow2(int n);

}  // namespace qmr
