#include "qmr/restriction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qmr/errors.hpp"
#include "qmr/fft.hpp"

namespace qmr::restriction {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_sphere_kind(SubmanifoldKind k) {
    return k == SubmanifoldKind::great_circle || k == SubmanifoldKind::geodesic_s3;
}

// Free axes of a coordinate slice, in increasing order.
std::vector<int> free_axes(const Submanifold& y) {
    std::vector<int> out;
    for (int a = 0; a < y.ambient_dim; ++a)
        if (std::find(y.fixed_axes.begin(), y.fixed_axes.end(), a) == y.fixed_axes.end()) out.push_back(a);
    return out;
}

}  // namespace

const char* to_string(SubmanifoldKind k) {
    switch (k) {
        case SubmanifoldKind::coordinate_slice: return "coordinate_slice";
        case SubmanifoldKind::grid_line: return "grid_line";
        case SubmanifoldKind::great_circle: return "great_circle";
        case SubmanifoldKind::geodesic_s3: return "geodesic_s3";
    }
    return "?";
}

Submanifold Submanifold::coordinate_slice(const PeriodicGrid& grid, std::vector<int> fixed_axes,
                                          std::vector<double> fixed_values) {
    if (fixed_axes.size() != fixed_values.size()) throw DimensionError("each fixed axis needs a coordinate");
    if (fixed_axes.empty()) throw DimensionError("a coordinate slice must fix at least one axis");
    std::set<int> seen;
    for (int a : fixed_axes) {
        if (a < 0 || a >= grid.dim()) throw DimensionError("fixed axis " + std::to_string(a) + " out of range");
        if (!seen.insert(a).second) throw DimensionError("fixed axis listed twice");
    }
    Submanifold y;
    y.kind = SubmanifoldKind::coordinate_slice;
    y.ambient_dim = grid.dim();
    y.dim = grid.dim() - static_cast<int>(fixed_axes.size());
    y.fixed_axes = std::move(fixed_axes);
    y.fixed_values = std::move(fixed_values);
    std::size_t nodes = 1;
    for (int a = 0; a < y.dim; ++a) nodes *= static_cast<std::size_t>(grid.points_per_axis());
    const double w = std::pow(grid.spacing(), y.dim);
    y.weights.assign(nodes, w);
    y.measure = std::pow(grid.period(), y.dim);
    return y;
}

Submanifold Submanifold::grid_line(const PeriodicGrid& grid, std::array<int, 3> anchor, std::array<int, 3> direction) {
    double len2 = 0.0;
    bool any = false;
    for (int a = 0; a < grid.dim(); ++a) {
        const int d = direction[static_cast<std::size_t>(a)];
        if (d < -1 || d > 1) throw DimensionError("grid line directions must have entries in {-1, 0, 1}");
        any = any || d != 0;
        len2 += d * d;
    }
    if (!any) throw DimensionError("grid line direction is zero");
    if (grid.dim() < 2) throw DimensionError("grid lines need an ambient dimension of at least 2");
    Submanifold y;
    y.kind = SubmanifoldKind::grid_line;
    y.ambient_dim = grid.dim();
    y.dim = 1;
    y.anchor = anchor;
    y.direction = direction;
    const double step = grid.spacing() * std::sqrt(len2);
    y.weights.assign(static_cast<std::size_t>(grid.points_per_axis()), step);
    y.measure = step * grid.points_per_axis();
    return y;
}

Submanifold Submanifold::great_circle(double inclination, int nodes) {
    if (nodes < 3) throw DomainError("a great circle needs at least 3 nodes");
    Submanifold y;
    y.kind = SubmanifoldKind::great_circle;
    y.ambient_dim = 2;
    y.dim = 1;
    y.inclination = inclination;
    const auto rule = quad::periodic_trapezoid(nodes, 2 * kPi);
    const double ca = std::cos(inclination), sa = std::sin(inclination);
    for (double s : rule.nodes) {
        Eigen::VectorXd p(3);
        p << std::cos(s), std::sin(s) * ca, std::sin(s) * sa;
        y.points.push_back(p);
    }
    y.weights = rule.weights;
    y.measure = 2 * kPi;
    return y;
}

Submanifold Submanifold::geodesic_s3(int nodes) {
    if (nodes < 3) throw DomainError("a geodesic needs at least 3 nodes");
    Submanifold y;
    y.kind = SubmanifoldKind::geodesic_s3;
    y.ambient_dim = 3;
    y.dim = 1;
    const auto rule = quad::periodic_trapezoid(nodes, 2 * kPi);
    for (double s : rule.nodes) {
        Eigen::VectorXd p(4);
        p << std::cos(s), 0.0, 0.0, std::sin(s);
        y.points.push_back(p);
    }
    y.weights = rule.weights;
    y.measure = 2 * kPi;
    return y;
}

std::size_t Submanifold::node_count() const { return weights.size(); }

RestrictionSample::RestrictionSample(Eigen::VectorXcd values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
    if (values_.size() != static_cast<Eigen::Index>(weights_.size()))
        throw DimensionError("restriction values and weights differ in length");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DataError("non-finite restricted value");
}

double RestrictionSample::lp_norm(double p) const {
    if (p < 1.0) throw DomainError("restricted L^p norms need p >= 1");
    if (auto it = cache_.find(p); it != cache_.end()) return it->second;
    double out = 0.0;
    if (std::isinf(p)) {
        out = values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0;
    } else {
        // Factor out the maximum so that large p cannot overflow.
        const double top = values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0;
        if (top > 0.0) {
            double sum = 0.0;
            for (Eigen::Index i = 0; i < values_.size(); ++i)
                sum += weights_[static_cast<std::size_t>(i)] * std::pow(std::abs(values_[i]) / top, p);
            out = top * std::pow(sum, 1.0 / p);
        }
    }
    cache_.emplace(p, out);
    return out;
}

double nodes_per_wavelength(const Submanifold& y, double h) {
    return static_cast<double>(y.node_count()) * 2 * kPi * h / y.measure;
}

RestrictionSample restrict_to(const modes::SphereHarmonic& u, const Submanifold& y) {
    if (!is_sphere_kind(y.kind)) throw DimensionError("sphere harmonics restrict only to sphere submanifolds");
    if (y.ambient_dim != u.sphere_dim())
        throw DimensionError("submanifold lives on S^" + std::to_string(y.ambient_dim) + " but the harmonic on S^" +
                             std::to_string(u.sphere_dim()));
    const double density = nodes_per_wavelength(y, u.h());
    if (density < 10.0 * (1.0 - 1e-12))
        throw ResolutionError("degree " + std::to_string(u.degree()) + " needs at least 10 nodes per wavelength; " +
                              std::to_string(y.node_count()) + " nodes give " + std::to_string(density));
    Eigen::VectorXcd v(static_cast<Eigen::Index>(y.points.size()));
    for (std::size_t i = 0; i < y.points.size(); ++i) v[static_cast<Eigen::Index>(i)] = u(y.points[i]);
    return RestrictionSample(std::move(v), y.weights);
}

RestrictionSample restrict_to(const GridFunction& u, const Submanifold& y) {
    const auto& grid = u.grid();
    if (y.ambient_dim != grid.dim()) throw DimensionError("submanifold and grid dimensions differ");
    const int N = grid.points_per_axis();

    if (y.kind == SubmanifoldKind::grid_line) {
        Eigen::VectorXcd v(N);
        for (int t = 0; t < N; ++t) {
            std::array<int, 3> idx{0, 0, 0};
            for (int a = 0; a < grid.dim(); ++a) {
                const auto ua = static_cast<std::size_t>(a);
                idx[ua] = y.anchor[ua] + t * y.direction[ua];
            }
            v[t] = u[grid.flat_index(idx)];
        }
        return RestrictionSample(std::move(v), y.weights);
    }
    if (y.kind != SubmanifoldKind::coordinate_slice) throw DimensionError("grid functions restrict only to grid submanifolds");

    const auto frees = free_axes(y);
    std::size_t nodes = 1;
    for (std::size_t i = 0; i < frees.size(); ++i) nodes *= static_cast<std::size_t>(N);

    // Grid indices of the frozen coordinates, or -1 when off-grid.
    std::vector<int> fixed_index;
    bool on_grid = true;
    for (double v : y.fixed_values) {
        fixed_index.push_back(grid.node_index(v, 1e-12 * grid.period()));
        on_grid = on_grid && fixed_index.back() >= 0;
    }

    Eigen::VectorXcd out(static_cast<Eigen::Index>(nodes));
    if (on_grid) {
        for (std::size_t n = 0; n < nodes; ++n) {
            std::array<int, 3> idx{0, 0, 0};
            std::size_t rest = n;
            for (int f = static_cast<int>(frees.size()) - 1; f >= 0; --f) {
                idx[static_cast<std::size_t>(frees[static_cast<std::size_t>(f)])] = static_cast<int>(rest % static_cast<std::size_t>(N));
                rest /= static_cast<std::size_t>(N);
            }
            for (std::size_t i = 0; i < y.fixed_axes.size(); ++i)
                idx[static_cast<std::size_t>(y.fixed_axes[i])] = fixed_index[i];
            out[static_cast<Eigen::Index>(n)] = u[grid.flat_index(idx)];
        }
        return RestrictionSample(std::move(out), y.weights);
    }

    // Band-limited interpolant: u(x) = N^{-n} sum_m U_m prod_a e_a(m_a), with
    // the Nyquist mode split symmetrically into a cosine.
    Eigen::VectorXcd spec = u.values();
    fft::forward(grid, spec);
    spec /= static_cast<double>(grid.size());
    auto mode_factor = [&](int m_index, double offset) -> cplx {
        const int m = m_index < N / 2 ? m_index : m_index - N;
        const double k = 2 * kPi / grid.period();
        if (2 * m_index == N) return std::cos(k * (N / 2) * offset);
        return std::polar(1.0, k * m * offset);
    };
    for (std::size_t n = 0; n < nodes; ++n) {
        std::array<int, 3> jdx{0, 0, 0};
        std::size_t rest = n;
        for (int f = static_cast<int>(frees.size()) - 1; f >= 0; --f) {
            jdx[static_cast<std::size_t>(frees[static_cast<std::size_t>(f)])] = static_cast<int>(rest % static_cast<std::size_t>(N));
            rest /= static_cast<std::size_t>(N);
        }
        cplx acc = 0.0;
        for (std::size_t m = 0; m < grid.size(); ++m) {
            const auto mi = grid.multi_index(m);
            cplx term = spec[static_cast<Eigen::Index>(m)];
            for (int a = 0; a < grid.dim(); ++a) {
                const auto ua = static_cast<std::size_t>(a);
                const auto it = std::find(y.fixed_axes.begin(), y.fixed_axes.end(), a);
                const double offset = it == y.fixed_axes.end()
                                          ? jdx[ua] * grid.spacing()
                                          : y.fixed_values[static_cast<std::size_t>(it - y.fixed_axes.begin())] - grid.origin();
                term *= mode_factor(mi[ua], offset);
            }
            acc += term;
        }
        out[static_cast<Eigen::Index>(n)] = acc;
    }
    return RestrictionSample(std::move(out), y.weights);
}

double lp_norm(const RestrictionSample& s, const ExtRational& p) { return s.lp_norm(p); }

double mixed_norm(const GridFunction& u, const std::vector<int>& y_axes, const std::vector<int>& z_axes, double outer,
                  double inner) {
    const auto& grid = u.grid();
    std::vector<int> all(y_axes);
    all.insert(all.end(), z_axes.begin(), z_axes.end());
    std::sort(all.begin(), all.end());
    std::vector<int> expect(static_cast<std::size_t>(grid.dim()));
    for (int a = 0; a < grid.dim(); ++a) expect[static_cast<std::size_t>(a)] = a;
    if (all != expect) throw DimensionError("y- and z-axes must partition the grid axes");
    if (inner < 1.0 || outer < 1.0) throw DomainError("mixed norm exponents must be >= 1");

    const int N = grid.points_per_axis();
    std::size_t zcount = 1;
    for (std::size_t i = 0; i < z_axes.size(); ++i) zcount *= static_cast<std::size_t>(N);
    std::vector<double> slice(zcount, 0.0);
    const double dy = std::pow(grid.spacing(), static_cast<double>(y_axes.size()));
    const double dz = std::pow(grid.spacing(), static_cast<double>(z_axes.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.multi_index(i);
        std::size_t z = 0;
        for (int a : z_axes) z = z * static_cast<std::size_t>(N) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
        const double m = std::abs(u[i]);
        slice[z] = std::isinf(inner) ? std::max(slice[z], m) : slice[z] + std::pow(m, inner);
    }
    for (double& s : slice) s = std::isinf(inner) ? s : std::pow(s * dy, 1.0 / inner);
    if (z_axes.empty()) return slice[0];
    if (std::isinf(outer)) return *std::max_element(slice.begin(), slice.end());
    double sum = 0.0;
    for (double s : slice) sum += std::pow(s, outer);
    return std::pow(sum * dz, 1.0 / outer);
}

}  // namespace qmr::restriction
