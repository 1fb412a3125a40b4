#pragma once

// Exact exponent algebra for restriction estimates of semiclassical
// quasimodes: the delta(n, k, p) table, the two-bound Strichartz relations,
// the interpolation anchors and the weak non-degeneracy region.
//
// Every quantity is an exact rational; p = infinity is represented exactly
// by ExtRational and enters only through 1/p = 0.

#include <span>
#include <string>
#include <vector>

#include "qmr/rational.hpp"

namespace qmr::theory {

/// Ambient dimension n, submanifold dimension k and Lebesgue exponent p.
struct ExponentQuery {
    int n = 2;
    int k = 1;
    ExtRational p = 2;

    /// Throws DomainError naming the violated bound.
    void validate() const;
};

/// ||u||_{L^p(Y)} <~ h^{-power}, times log^{1/2}(1/h) when log_half_power.
struct DeltaResult {
    Rational power{0};
    bool log_half_power = false;

    friend bool operator==(const DeltaResult&, const DeltaResult&) = default;
    std::string str() const;
};

DeltaResult delta(const ExponentQuery& q);
inline DeltaResult delta(int n, int k, ExtRational p) { return delta(ExponentQuery{n, k, p}); }

/// Whole-manifold exponent (n-1)/2 - n/p above p = 2(n+1)/(n-1), and
/// (n-1)/2 (1/2 - 1/p) below it. Used only as the comparison curve.
Rational full_manifold_delta(int n, ExtRational p);

/// Interpolated decay power 2(sigma_2 - sigma_inf)/p + sigma_inf.
Rational beta(ExtRational p, Rational sigma_inf, Rational sigma_2);

/// Exponents of the kernel bounds
///   ||W(t)W*(s)||_{L1->Linf} <~ h^{-mu_inf} (h+|t-s|)^{-sigma_inf}
///   ||W(t)W*(s)||_{L2->L2}   <~ h^{-mu_2}   (h+|t-s|)^{-sigma_2}
struct StrichartzAssumptions {
    Rational mu_inf{0};
    Rational sigma_inf{0};
    Rational mu_2{0};
    Rational sigma_2{0};

    /// Requires sigma_inf > sigma_2 >= 0.
    void validate() const;
};

/// The restricted-propagator bounds for a k-dimensional submanifold of an
/// n-manifold: mu = sigma = (n-1)/2 and (n-k)/2.
StrichartzAssumptions restricted_kernel_assumptions(int n, int k);

struct StrichartzPair {
    ExtRational r;
    ExtRational p;
};

/// Whether 2/r + 2(sigma_inf - sigma_2)/p == sigma_inf holds exactly.
bool satisfies_governing(const StrichartzAssumptions& a, const StrichartzPair& pair);

/// Time exponent r with 2/r = beta(p, sigma_inf, sigma_2).
/// beta < 0 -> NoSolutionError; r <= 2 -> EndpointError; beta == 0 gives r = inf.
ExtRational solve_governing(const StrichartzAssumptions& a, ExtRational p);

/// The exponent p with (r, p) = (p, p) admissible, ignoring the r > 2
/// restriction: p = 2(1 + sigma_inf - sigma_2) / sigma_inf.
Rational solve_diagonal(const StrichartzAssumptions& a);

/// Power of 1/h in the mixed-norm Strichartz bound for time exponent r.
Rational strichartz_h_exponent(const StrichartzAssumptions& a, ExtRational r);

enum class DiagonalKind { value, endpoint, none };

struct DiagonalPair {
    DiagonalKind kind = DiagonalKind::none;
    Rational p{0};  // meaningful for value and endpoint
};

/// p = 2(k+1)/(n-1): a genuine pair when p > 2, the endpoint when p == 2,
/// none when p < 2.
DiagonalPair diagonal_pair(int n, int k);

/// A point (1/p, delta) of the piecewise-linear exponent curve.
struct Anchor {
    Rational inv_p{0};
    Rational delta{0};
    bool log_half_power = false;

    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// Interpolation anchors sorted by 1/p: the L^inf point, the Strichartz
/// point for hypersurfaces and the L^2 point.
std::vector<Anchor> anchor_points(int n, int k);

/// Piecewise-linear interpolation of delta in 1/p; the log flag of an
/// anchor does not propagate to p > 2.
Rational interpolate_delta(std::span<const Anchor> anchors, ExtRational p);

/// Whether the estimate survives when (A2) is weakened to non-degeneracy.
bool weak_a2_region(int n, int k, ExtRational p);

}  // namespace qmr::theory
