#include <doctest.h>

#include <cmath>

#include "qmr/errors.hpp"
#include "qmr/symbol.hpp"

using namespace qmr;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("every built-in symbol is constructible by name") {
    for (const auto& name : symbols::builtin_names()) {
        const auto s = symbols::by_name(name);
        CHECK(s.name.size() > 0);
        CHECK(static_cast<bool>(s.eval));
    }
    CHECK_THROWS_AS(symbols::by_name("no-such-symbol"), DomainError);
}

TEST_CASE("analytic derivatives agree with central differences") {
    std::vector<std::pair<Vec, Vec>> pts2{{v2(0.1, -0.3), v2(0.7, 0.2)}, {v2(-1.0, 0.4), v2(-0.5, 1.3)}};
    for (const char* name : {"sphere", "hyperbola", "flat", "degenerate", "affine", "free2", "saddle"}) {
        INFO(name);
        CHECK(derivative_mismatch(with_numeric_derivatives(symbols::by_name(name)), pts2) < 1e-6);
    }
    std::vector<std::pair<Vec, Vec>> pts1{{Vec::Constant(1, 0.3), Vec::Constant(1, 0.8)},
                                          {Vec::Constant(1, -1.2), Vec::Constant(1, -0.4)}};
    for (const char* name : {"free", "pendulum", "oscillator"}) {
        INFO(name);
        CHECK(derivative_mismatch(with_numeric_derivatives(symbols::by_name(name)), pts1) < 1e-6);
    }
}

TEST_CASE("symbol values") {
    CHECK(symbols::sphere(2).real(v2(0, 0), v2(0.6, 0.8)) == doctest::Approx(0.0));
    CHECK(symbols::hyperbola().real(v2(0, 0), v2(2, 1)) == doctest::Approx(2.0));
    CHECK(symbols::pendulum().real(Vec::Constant(1, 0.0), Vec::Constant(1, 2.0)) == doctest::Approx(3.0));
    CHECK(symbols::oscillator(1.0).real(Vec::Constant(1, 0.6), Vec::Constant(1, 0.8)) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("structure flags") {
    CHECK(symbols::free_particle(1).is_x_independent());
    CHECK(symbols::saddle().is_x_independent());
    CHECK_FALSE(symbols::pendulum().is_x_independent());
    CHECK(symbols::pendulum().is_split());
}

TEST_CASE("product multiplies pointwise") {
    const auto p = product(symbols::sphere(2), symbols::flat(2));
    const Vec x = v2(0.2, 0.1), xi = v2(1.5, 0.5);
    CHECK(p.real(x, xi) == doctest::Approx(symbols::sphere(2).real(x, xi) * symbols::flat(2).real(x, xi)));
}

TEST_CASE("smooth step and plateau") {
    CHECK(smooth_step(-0.1) == 0.0);
    CHECK(smooth_step(1.2) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
        const double s = smooth_step(i / 100.0);
        CHECK(s >= prev);
        prev = s;
    }
    CHECK(plateau(0.0, -1, 1, -2, 2) == 1.0);
    CHECK(plateau(1.0, -1, 1, -2, 2) == 1.0);
    CHECK(plateau(2.0, -1, 1, -2, 2) == 0.0);
    const double mid = plateau(1.5, -1, 1, -2, 2);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    // derivative vs difference quotient
    const double t = 0.3, e = 1e-6;
    CHECK(smooth_step_derivative(t) == doctest::Approx((smooth_step(t + e) - smooth_step(t - e)) / (2 * e)).epsilon(1e-5));
}

TEST_CASE("phase boxes") {
    const auto b = PhaseBox::cube(1, 1, 0.5, 2.0);
    CHECK(b.contains(Vec::Constant(1, 0.4), Vec::Constant(1, -1.9)));
    CHECK_FALSE(b.contains(Vec::Constant(1, 0.6), Vec::Constant(1, 0.0)));
    CHECK(b.max_frequency() == doctest::Approx(2.0));
    CHECK_FALSE(PhaseBox::unbounded(1, 1).xi_bounded());
}
