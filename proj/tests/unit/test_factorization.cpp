#include <doctest.h>

#include <cmath>

#include "qmr/errors.hpp"
#include "qmr/factorization.hpp"

using namespace qmr;
using namespace qmr::quant;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec v1(double a) { return Vec::Constant(1, a); }

}  // namespace

TEST_CASE("sphere factors as the upper hemisphere graph") {
    const auto sym = with_numeric_derivatives(symbols::sphere(2));
    const auto f = symbol_factor(sym, v2(0, 0), v2(1, 0), 0);
    for (double eta : {-0.3, -0.1, 0.0, 0.2, 0.35}) {
        const double a = std::sqrt(1 - eta * eta);
        CHECK(f.a.real(v2(0, 0), v1(eta)) == doctest::Approx(a).epsilon(1e-10));
        // e = p / (xi_1 - a) = xi_1 + a near xi_1 = a.
        for (double xi1 : {a - 0.1, a + 0.05}) {
            CHECK(f.elliptic_factor.real(v2(0, 0), v2(xi1, eta)) == doctest::Approx(xi1 + a).epsilon(1e-8));
        }
        // The removable singularity is filled by d p / d xi_1 = 2a.
        CHECK(f.elliptic_factor.real(v2(0, 0), v2(a, eta)) == doctest::Approx(2 * a).epsilon(1e-6));
    }
    CHECK(f.valid_box.contains(v2(0, 0), v2(1, 0)));
}

TEST_CASE("affine symbol factors exactly with e = 1") {
    const auto sym = with_numeric_derivatives(symbols::affine());
    const auto f = symbol_factor(sym, v2(0, 0), v2(0.5, 1.0), 0);
    for (double x1 : {-0.2, 0.0, 0.3})
        for (double eta : {0.8, 1.0, 1.2}) {
            const double a0 = 0.5 * eta * eta + 0.3 * std::sin(x1);
            CHECK(f.a.real(v2(x1, 0), v1(eta)) == doctest::Approx(a0).epsilon(1e-12));
            CHECK(f.elliptic_factor.real(v2(x1, 0), v2(a0 + 0.1, eta)) == doctest::Approx(1.0).epsilon(1e-10));
        }
}

TEST_CASE("degenerate direction raises a degeneracy error") {
    const auto sym = with_numeric_derivatives(symbols::degenerate());
    CHECK_THROWS_AS(symbol_factor(sym, v2(0, 0), v2(0, 0), 1), DegenerateError);
}

TEST_CASE("admissibility of the three model surfaces") {
    const auto sphere = with_numeric_derivatives(symbols::sphere(2));
    std::vector<std::pair<Vec, Vec>> circle;
    for (int i = 0; i < 12; ++i) {
        const double t = 2 * M_PI * i / 12 + 0.1;
        circle.push_back({v2(0, 0), v2(std::cos(t), std::sin(t))});
    }
    const auto rs = admissibility_check(sphere, circle);
    CHECK(rs.all_a1());
    CHECK(rs.all_positive());

    const auto hyp = with_numeric_derivatives(symbols::hyperbola());
    const auto rh = admissibility_check(hyp, {{v2(0, 0), v2(1, 0)}, {v2(0, 0), v2(std::sqrt(2.0), 1)}});
    CHECK(rh.all_a1());
    for (const auto& p : rh.points) CHECK(p.curvature == Curvature::non_degenerate);
    // a = sqrt(1 + xi_2^2), a'' = (1 + xi_2^2)^{-3/2} > 0, form = -a'' < 0.
    CHECK(rh.points[0].eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(rh.points[1].eigenvalues[0] == doctest::Approx(-std::pow(2.0, -1.5)).epsilon(1e-4));

    const auto flat = with_numeric_derivatives(symbols::flat(2));
    const auto rf = admissibility_check(flat, {{v2(0, 0), v2(0, 1)}});
    CHECK(rf.all_a1());
    CHECK(rf.points[0].curvature == Curvature::degenerate);
}

TEST_CASE("off-characteristic sample is a domain error") {
    const auto sphere = with_numeric_derivatives(symbols::sphere(2));
    CHECK_THROWS_AS(admissibility_check(sphere, {{v2(0, 0), v2(0.5, 0)}}), DomainError);
}

TEST_CASE("drop and insert axis are inverse") {
    Vec xi(3);
    xi << 1, 2, 3;
    for (int axis = 0; axis < 3; ++axis) {
        const Vec rest = drop_axis(xi, axis);
        CHECK(rest.size() == 2);
        CHECK((insert_axis(rest, axis, xi[axis]) - xi).norm() == 0.0);
    }
}
