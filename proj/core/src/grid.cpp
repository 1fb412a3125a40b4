#include "qmr/grid.hpp"

#include <cmath>
#include <string>

#include "qmr/errors.hpp"

namespace qmr {

PeriodicGrid::PeriodicGrid(int dim, int points_per_axis, double period)
    : PeriodicGrid(dim, points_per_axis, period, -0.5 * period) {}

PeriodicGrid::PeriodicGrid(int dim, int points_per_axis, double period, double origin)
    : dim_(dim), n_(points_per_axis), period_(period), origin_(origin), size_(1) {
    if (dim < 1 || dim > 3) throw DimensionError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (points_per_axis < 2 || (points_per_axis & (points_per_axis - 1)) != 0)
        throw DimensionError("points per axis must be a power of two >= 2, got " + std::to_string(points_per_axis));
    if (!(period > 0.0)) throw DomainError("grid period must be positive");
    for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points_per_axis);
}

double PeriodicGrid::cell_volume() const { return std::pow(spacing(), dim_); }

double PeriodicGrid::wavenumber(int index) const {
    const int m = index < n_ / 2 ? index : index - n_;
    return 2.0 * std::numbers::pi * m / period_;
}

double PeriodicGrid::nyquist(double h) const { return std::numbers::pi * n_ * h / period_; }

std::array<int, 3> PeriodicGrid::multi_index(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
        flat /= static_cast<std::size_t>(n_);
    }
    return idx;
}

std::size_t PeriodicGrid::flat_index(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) {
        const int i = ((idx[static_cast<std::size_t>(a)] % n_) + n_) % n_;
        flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return flat;
}

Vec PeriodicGrid::point(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Vec x(dim_);
    for (int a = 0; a < dim_; ++a) x[a] = coordinate(idx[static_cast<std::size_t>(a)]);
    return x;
}

Vec PeriodicGrid::wavevector(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Vec k(dim_);
    for (int a = 0; a < dim_; ++a) k[a] = wavenumber(idx[static_cast<std::size_t>(a)]);
    return k;
}

int PeriodicGrid::node_index(double x, double tol) const {
    const double s = (x - origin_) / spacing();
    const double r = std::round(s);
    if (std::abs(s - r) * spacing() > tol) return -1;
    return ((static_cast<int>(r) % n_) + n_) % n_;
}

bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.period_ == b.period_ && a.origin_ == b.origin_;
}

GridFunction::GridFunction(PeriodicGrid grid, double h)
    : grid_(grid), h_(h), values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()))) {
    if (!(h > 0.0)) throw DomainError("semiclassical parameter h must be positive");
}

GridFunction::GridFunction(PeriodicGrid grid, double h, Eigen::VectorXcd values)
    : grid_(grid), h_(h), values_(std::move(values)) {
    if (!(h > 0.0)) throw DomainError("semiclassical parameter h must be positive");
    if (values_.size() != static_cast<Eigen::Index>(grid_.size()))
        throw DimensionError("value count " + std::to_string(values_.size()) + " does not match grid size " +
                             std::to_string(grid_.size()));
}

double GridFunction::lp_norm(double p) const {
    if (std::isinf(p)) return values_.cwiseAbs().maxCoeff();
    if (p < 1.0) throw DomainError("lp_norm requires p >= 1");
    double sum = 0.0;
    if (p == 2.0) {
        sum = values_.squaredNorm();
    } else {
        for (const auto& v : values_) sum += std::pow(std::abs(v), p);
    }
    return std::pow(sum * grid_.cell_volume(), 1.0 / p);
}

cplx GridFunction::inner(const GridFunction& other) const {
    require_compatible(*this, other);
    return values_.dot(other.values_) * grid_.cell_volume();
}

GridFunction& GridFunction::normalize() {
    const double n = l2_norm();
    if (!(n > 0.0)) throw DataError("cannot normalize the zero function");
    values_ /= n;
    return *this;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_compatible(*this, o);
    values_ += o.values_;
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_compatible(*this, o);
    values_ -= o.values_;
    return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
    values_ *= s;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

GridFunction sample(const PeriodicGrid& grid, double h, const std::function<cplx(const Vec&)>& f) {
    GridFunction u(grid, h);
    for (std::size_t i = 0; i < grid.size(); ++i) u[i] = f(grid.point(i));
    return u;
}

void require_compatible(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) throw DimensionError("grid functions live on different grids");
    if (std::abs(a.h() - b.h()) > 1e-14 * a.h()) throw DimensionError("grid functions carry different h");
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace qmr
