#include "qmr/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <numbers>

#include "qmr/errors.hpp"

namespace qmr::quad {

Rule gauss_legendre(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
    // Boost returns the non-negative zeros in increasing order.
    const auto zeros = boost::math::legendre_p_zeros<double>(n);
    Rule r;
    r.nodes.reserve(static_cast<std::size_t>(n));
    r.weights.reserve(static_cast<std::size_t>(n));
    auto weight = [n](double x) {
        const double d = boost::math::legendre_p_prime<double>(n, x);
        return 2.0 / ((1.0 - x * x) * d * d);
    };
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        if (*it == 0.0) continue;
        r.nodes.push_back(-*it);
        r.weights.push_back(weight(*it));
    }
    for (double z : zeros) {
        r.nodes.push_back(z);
        r.weights.push_back(weight(z));
    }
    return r;
}

Rule gauss_chebyshev_second(int n) {
    if (n < 1) throw DomainError("Gauss-Chebyshev rule needs at least one node");
    Rule r;
    for (int i = n; i >= 1; --i) {
        const double t = i * std::numbers::pi / (n + 1);
        r.nodes.push_back(std::cos(t));
        r.weights.push_back(std::numbers::pi / (n + 1) * std::sin(t) * std::sin(t));
    }
    return r;
}

Rule periodic_trapezoid(int n, double length) {
    if (n < 1) throw DomainError("trapezoid rule needs at least one node");
    Rule r;
    for (int i = 0; i < n; ++i) {
        r.nodes.push_back(length * i / n);
        r.weights.push_back(length / n);
    }
    return r;
}

}  // namespace qmr::quad
