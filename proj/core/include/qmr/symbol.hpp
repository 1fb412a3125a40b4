#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qmr/grid.hpp"

namespace qmr {

/// Axis-aligned phase-space box; an infinite bound leaves that coordinate
/// unconstrained.
struct PhaseBox {
    Vec x_lo, x_hi, xi_lo, xi_hi;

    static PhaseBox unbounded(int x_dim, int xi_dim);
    static PhaseBox cube(int x_dim, int xi_dim, double x_half, double xi_half);
    bool contains(const Vec& x, const Vec& xi) const;
    /// Largest |xi_i| over the box (infinite if unbounded in xi).
    double max_frequency() const;
    bool xi_bounded() const;
};

/// One summand spatial(x) * frequency(xi) of a separable symbol. An empty
/// factor stands for the constant 1.
struct SeparableTerm {
    std::function<cplx(const Vec&)> spatial;
    std::function<cplx(const Vec&)> frequency;
};

using SymbolEval = std::function<cplx(const Vec& x, const Vec& xi)>;
using SymbolGrad = std::function<Vec(const Vec& x, const Vec& xi)>;
using SymbolHess = std::function<Mat(const Vec& x, const Vec& xi)>;

/// A phase-space symbol p(x, xi). Derivative callables refer to the real part
/// and may be left empty; with_numeric_derivatives fills the gaps.
struct SymbolField {
    std::string name;
    int x_dim = 1;
    int xi_dim = 1;
    SymbolEval eval;
    SymbolGrad grad_x;
    SymbolGrad grad_xi;
    SymbolHess hess_xi;
    SymbolHess hess_x;     // optional
    SymbolHess hess_x_xi;  // optional, (i, j) = d^2 / dx_i dxi_j
    std::optional<PhaseBox> support;
    bool is_real = true;
    std::vector<SeparableTerm> terms;  // empty: no separable structure known

    cplx operator()(const Vec& x, const Vec& xi) const { return eval(x, xi); }
    double real(const Vec& x, const Vec& xi) const { return eval(x, xi).real(); }

    bool is_separable() const { return !terms.empty(); }
    /// Separable and every term lacks a spatial factor.
    bool is_x_independent() const;
    /// Separable and every term is purely spatial or purely frequency.
    bool is_split() const;
};

/// Central-difference completion of missing derivative callables.
SymbolField with_numeric_derivatives(SymbolField s, double step = 1e-5);

/// Largest discrepancy between the analytic derivatives of s and central
/// differences of eval at the given phase-space points.
double derivative_mismatch(const SymbolField& s, const std::vector<std::pair<Vec, Vec>>& points,
                           double step = 1e-4);

SymbolField product(const SymbolField& a, const SymbolField& b);

/// Smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity in between.
double smooth_step(double t);
double smooth_step_derivative(double t);

/// C-infinity bump equal to 1 on [inner_lo, inner_hi] and 0 outside
/// (outer_lo, outer_hi).
double plateau(double v, double inner_lo, double inner_hi, double outer_lo, double outer_hi);

namespace symbols {

/// c |xi|^2.
SymbolField kinetic(int dim, double c = 1.0);
/// c |xi|^2 + V(x); grad and hess of V optional (numeric if absent).
SymbolField kinetic_plus_potential(int dim, double c, std::function<double(const Vec&)> potential,
                                   std::function<Vec(const Vec&)> grad = {},
                                   std::function<Mat(const Vec&)> hess = {});
/// |xi|^2 - 1.
SymbolField sphere(int dim);
/// xi_1^2 - xi_2^2 - 1.
SymbolField hyperbola();
/// xi_1 on an n-dimensional phase space.
SymbolField flat(int dim);
/// xi_axis as a pure frequency coordinate.
SymbolField frequency_coordinate(int dim, int axis);
/// xi_2^2.
SymbolField degenerate();
/// xi_1 - (0.5 xi_2^2 + 0.3 sin x_1): already solved along axis 0.
SymbolField affine();
/// <v, xi>.
SymbolField transport(const Vec& velocity);
/// |xi|^2 / 2.
SymbolField free_particle(int dim);
/// xi^2 / 2 + cos x.
SymbolField pendulum();
/// xi_1^2 - xi_2^2.
SymbolField saddle();
/// xi^2 + x^2 - energy (1D).
SymbolField oscillator(double energy);
/// V(x) as a symbol.
SymbolField potential(int dim, std::function<double(const Vec&)> v);
/// Constant symbol.
SymbolField constant(int x_dim, int xi_dim, cplx value);

/// Built-in symbols addressable by name from the CLI.
SymbolField by_name(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace symbols

}  // namespace qmr
