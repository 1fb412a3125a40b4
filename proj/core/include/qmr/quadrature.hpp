#pragma once

#include <vector>

namespace qmr::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; exact for degree 2n - 1.
Rule gauss_legendre(int n);

/// n-point Gauss-Chebyshev rule of the second kind: integrates
/// f(x) sqrt(1 - x^2) on [-1, 1], exact for polynomial f of degree 2n - 1.
Rule gauss_chebyshev_second(int n);

/// Trapezoid rule for a closed curve of given length with n nodes.
Rule periodic_trapezoid(int n, double length);

}  // namespace qmr::quad
