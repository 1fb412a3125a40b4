#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qmr/grid.hpp"
#include "qmr/quadrature.hpp"
#include "qmr/quasimodes.hpp"
#include "qmr/rational.hpp"

namespace qmr::restriction {

enum class SubmanifoldKind { coordinate_slice, grid_line, great_circle, geodesic_s3 };
const char* to_string(SubmanifoldKind k);

/// A k-dimensional submanifold carrying a quadrature rule. Grid kinds store
/// which axes are fixed; sphere kinds store unit-vector nodes.
struct Submanifold {
    SubmanifoldKind kind = SubmanifoldKind::coordinate_slice;
    int dim = 0;          // k
    int ambient_dim = 0;  // n

    // coordinate_slice: these axes are frozen at these coordinates.
    std::vector<int> fixed_axes;
    std::vector<double> fixed_values;
    // grid_line: nodes anchor + t * direction (grid index units), t = 0..N-1.
    std::array<int, 3> anchor{0, 0, 0};
    std::array<int, 3> direction{0, 0, 0};
    // sphere kinds
    double inclination = 0.0;
    std::vector<Eigen::VectorXd> points;

    std::vector<double> weights;
    double measure = 0.0;  // length / volume of Y

    static Submanifold coordinate_slice(const PeriodicGrid& grid, std::vector<int> fixed_axes,
                                        std::vector<double> fixed_values);
    static Submanifold grid_line(const PeriodicGrid& grid, std::array<int, 3> anchor, std::array<int, 3> direction);
    /// Great circle of S^2 tilted from the equator by `inclination`
    /// (0 = equator, pi/2 = a meridian circle through both poles).
    static Submanifold great_circle(double inclination, int nodes);
    /// Great circle of S^3 through the poles (+-e_4).
    static Submanifold geodesic_s3(int nodes);

    std::size_t node_count() const;
};

/// Values on Y's nodes with the quadrature weights and cached norms.
class RestrictionSample {
public:
    RestrictionSample(Eigen::VectorXcd values, std::vector<double> weights);
    const Eigen::VectorXcd& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }
    /// (sum w |v|^p)^{1/p}; max |v| for p = inf.
    double lp_norm(double p) const;
    double lp_norm(const ExtRational& p) const { return lp_norm(p.is_infinite() ? HUGE_VAL : p.to_double()); }

private:
    Eigen::VectorXcd values_;
    std::vector<double> weights_;
    mutable std::map<double, double> cache_;
};

/// Nodes per wavelength 2 pi h along a curve of the given measure.
double nodes_per_wavelength(const Submanifold& y, double h);

/// Exact harmonic values at the nodes of a sphere submanifold. Throws
/// ResolutionError below 10 nodes per wavelength.
RestrictionSample restrict_to(const modes::SphereHarmonic& u, const Submanifold& y);

/// Grid slices are exact at grid nodes; off-grid frozen coordinates use
/// trigonometric interpolation.
RestrictionSample restrict_to(const GridFunction& u, const Submanifold& y);

double lp_norm(const RestrictionSample& s, const ExtRational& p);

/// (sum_z dz (sum_y dy |u|^inner)^{outer/inner})^{1/outer}; outer = inf
/// gives the sup over z-slices of the L^inner_y norm.
double mixed_norm(const GridFunction& u, const std::vector<int>& y_axes, const std::vector<int>& z_axes,
                  double outer = HUGE_VAL, double inner = 2.0);

}  // namespace qmr::restriction
