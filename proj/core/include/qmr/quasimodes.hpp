#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "qmr/grid.hpp"
#include "qmr/symbol.hpp"

namespace qmr::modes {

enum class HarmonicKind { zonal, highest_weight };
const char* to_string(HarmonicKind k);

/// L^2-normalized spherical harmonic of degree l on S^2 or S^3, evaluated at
/// unit vectors of R^3 / R^4. Zonal harmonics are symmetric about the last
/// coordinate axis; the highest-weight harmonic is c_l (x_1 + i x_2)^l.
class SphereHarmonic {
public:
    SphereHarmonic(HarmonicKind kind, int degree, int sphere_dim);

    HarmonicKind kind() const { return kind_; }
    int degree() const { return degree_; }
    int sphere_dim() const { return sphere_dim_; }
    /// 1 / sqrt(l (l + n_s - 1)), so that h^2 Delta u = u.
    double h() const;
    /// Normalizing constant, fixed by Gaussian quadrature.
    double normalization() const { return norm_; }
    /// |h^2 l(l + n_s - 1) - 1|: the defect of the exact eigenvalue relation.
    double eigen_defect() const;

    cplx operator()(const Eigen::VectorXd& unit_point) const;
    /// Unnormalized zonal profile: P_l(c) on S^2, U_l(c) on S^3.
    double zonal_profile(double cos_theta) const;

    /// L^2 norm recomputed by an independent product rule over the sphere
    /// (trapezoid in longitude, Gauss in latitude). Used as a check.
    double quadrature_l2_norm() const;

private:
    HarmonicKind kind_;
    int degree_;
    int sphere_dim_;
    double norm_ = 1.0;
};

/// Strictly decreasing h values, optionally generated by sphere degrees.
struct HLadder {
    std::vector<double> values;
    std::vector<int> degrees;  // empty unless built from degrees
    std::string provenance;

    static HLadder from_degrees(const std::vector<int>& degrees, int sphere_dim);
    /// Degrees first, first*2, ..., up to last (inclusive).
    static HLadder doubling_degrees(int first, int last, int sphere_dim);
    /// h = 2^{-j} for j = j_min..j_max in steps of `step` (may be fractional).
    static HLadder dyadic(double j_min, double j_max, double step = 1.0);
    static HLadder geometric(double h_max, double ratio, int count);

    std::size_t size() const { return values.size(); }
    /// Throws DomainError unless strictly decreasing and positive.
    void validate() const;
    /// validate() plus at least `min_rungs` rungs.
    void validate_for_fit(std::size_t min_rungs = 6) const;
};

/// Degree-k eigenfunction of h^2 D^2 + x^2 (eigenvalue (2k+1) h) centered at
/// x = 0, on a 1D grid. Throws DomainError when the grid cuts the tail above
/// 1e-8.
GridFunction oscillator_mode(int k, double h, const PeriodicGrid& grid);

/// Hermite index whose oscillator energy (2k+1)h is closest to `energy`.
int oscillator_index(double energy, double h);

/// Normalized (pi h)^{-n/4} e^{i<x, xi0>/h} e^{-|x - x0|^2 / 2h}. Throws
/// PlacementError when more than 1e-10 of the mass lies past the seam or the
/// frequency sits outside the resolved band.
GridFunction coherent_state(const Vec& x0, const Vec& xi0, double h, const PeriodicGrid& grid);

/// ||sym^w(x, hD) u||_{L^2}.
double quasimode_defect(const SymbolField& sym, const GridFunction& u);

}  // namespace qmr::modes
