#pragma once

// Evolution e^{-itA/h} for A = a^w(x, hD): the solution operator of
// hD_t u + A u = 0. The matching eikonal equation is
//   d_t phi + a(x, d_x phi) = 0,   phi(0, x, eta) = <x, eta>.

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qmr/grid.hpp"
#include "qmr/symbol.hpp"

namespace qmr::prop {

/// 2d x 2d phase-space matrices (d <= 3) kept off the heap.
using PhaseMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

/// State of one characteristic with its full variational matrix
/// d(x, xi) / d(x0, eta).
struct FlowState {
    Vec x, xi;
    double phase = 0.0;  // phi along the ray, starting at <x0, eta>
    PhaseMat jacobian;

    Mat dx_dx0() const;
};

/// Hamilton's equations x' = d_xi a, xi' = -d_x a, phi' = <xi, d_xi a> - a,
/// integrated by classical RK4 with step <= dt.
class HamiltonianFlow {
public:
    HamiltonianFlow(SymbolField a, double dt, double t_max);

    const SymbolField& hamiltonian() const { return a_; }
    double dt() const { return dt_; }
    double t_max() const { return t_max_; }

    FlowState start(const Vec& x0, const Vec& eta) const;
    /// Advances `s` by `span` (split into equal steps of at most dt).
    void advance(FlowState& s, double span) const;
    FlowState evolve(const Vec& x0, const Vec& eta, double t, int steps = 0) const;

    /// max |J^T Omega J - Omega| of the flow map at time t.
    double symplectic_drift(const Vec& x0, const Vec& eta, double t) const;

private:
    void rk4_step(FlowState& s, double h) const;

    SymbolField a_;
    double dt_;
    double t_max_;
};

/// phi, d_x phi, d_eta phi and the leading amplitude on a (t, eta, x)
/// lattice; x runs over every grid point.
struct PhaseTable {
    SymbolField a;
    PeriodicGrid grid;
    double h = 0.0;  // the lattice eta = h k_m that the table was built for
    std::vector<double> times;
    std::vector<Vec> etas;
    std::vector<int> eta_bins;  // FFT bin of each eta
    // Per time: rows index eta, columns index grid points.
    std::vector<Eigen::MatrixXd> phase;
    std::vector<Eigen::MatrixXd> amplitude;
    std::vector<std::vector<Eigen::MatrixXd>> grad_x;    // [time][component]
    std::vector<std::vector<Eigen::MatrixXd>> grad_eta;  // [time][component]
    double eikonal_residual = 0.0;  // max over sampled lattice points
    double resample_error = 0.0;    // table vs direct ray inversion
    double min_singular_value = 0.0;

    std::size_t time_index(double t) const;
};

/// Caustic threshold on the smallest singular value of dx/dx0.
inline constexpr double kCausticThreshold = 1e-3;

/// Semiclassical frequencies h k_m of `grid` lying in [lo, hi] per axis.
std::vector<int> eta_bins_in_box(const PeriodicGrid& grid, double h, const Vec& lo, const Vec& hi);

/// Characteristics from every grid point for every eta bin, resampled to the
/// grid by inverting x0 -> x(t). Throws CausticError / DomainEscapeError.
PhaseTable solve_eikonal(const SymbolField& a, const std::vector<double>& times, const PeriodicGrid& grid, double h,
                         const std::vector<int>& eta_bins, double dt = 0.005);

/// phi(t, x, eta) by Newton inversion of a single characteristic, using
/// `steps` RK4 steps (0: derived from the flow's dt).
double phase_at(const HamiltonianFlow& flow, double t, const Vec& x, const Vec& eta, const Vec& seed_x0,
                int steps = 0, Vec* x0_out = nullptr);

/// (2 pi h)^{-d} int int e^{i(phi - w.eta)/h} b u0(w) dw deta on the grid.
GridFunction apply_parametrix(const PhaseTable& table, const GridFunction& u0, double t);

/// High-accuracy e^{-itA/h}u0: Strang splitting when a = K(xi) + V(x)
/// (exact when a is x-independent), otherwise dense eigendecomposition of
/// the Weyl matrix.
GridFunction reference_propagator(const SymbolField& a, const GridFunction& u0, double t, int steps);

using Source = std::function<GridFunction(double)>;

/// u(t) = U(t)u0 + i int_0^t U(t - s) f(s) ds, the solution of
/// hD_t u + A u = h f, by the composite midpoint rule with `intervals`
/// sub-intervals; each U is a reference_propagator call.
GridFunction duhamel_solve(const SymbolField& a, const GridFunction& u0, const Source& f, double t, int intervals,
                           int steps_per_unit_time = 200);

}  // namespace qmr::prop
