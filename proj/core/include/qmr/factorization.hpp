#pragma once

#include <vector>

#include "qmr/symbol.hpp"

namespace qmr::quant {

/// p(x, xi) = e(x, xi) (xi_axis - a(x, xi')) near a characteristic point.
/// `a` takes the frequency vector with the solved component removed.
struct FactorizationResult {
    SymbolField a;
    SymbolField elliptic_factor;
    int axis = 0;
    PhaseBox valid_box;
    Vec x0, xi0;
    double scale = 1.0;
};

/// Tolerance scale max(1, |grad_xi p| |xi|) at a point.
double symbol_scale(const SymbolField& sym, const Vec& x, const Vec& xi);

/// Solves p = 0 for xi_axis near (x0, xi0) by Newton (50 iterations) with a
/// sign-change bisection fallback.
FactorizationResult symbol_factor(const SymbolField& sym, const Vec& x0, const Vec& xi0, int axis);

/// Remove / reinsert the solved component of a frequency vector.
Vec drop_axis(const Vec& xi, int axis);
Vec insert_axis(const Vec& xi_rest, int axis, double value);

enum class Curvature { positive_definite, non_degenerate, degenerate };
const char* to_string(Curvature c);

struct AdmissibilityPoint {
    Vec x, xi;
    bool a1 = false;       // |grad_xi p| above threshold
    int axis = 0;          // frequency axis solved for
    Mat second_form;       // -sign(d_axis p) d^2 a / d xi'^2
    Vec eigenvalues;
    Curvature curvature = Curvature::degenerate;
};

struct AdmissibilityReport {
    std::vector<AdmissibilityPoint> points;
    bool all_a1() const;
    bool all_positive() const;
};

/// Checks (A1) and the definiteness of the characteristic surface's second
/// fundamental form at each sample. Samples off {p = 0} raise DomainError.
AdmissibilityReport admissibility_check(const SymbolField& sym, const std::vector<std::pair<Vec, Vec>>& samples);

}  // namespace qmr::quant
