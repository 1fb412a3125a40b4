#include <doctest.h>

#include <cmath>

#include "experiments.hpp"
#include "qmr/errors.hpp"
#include "qmr/fft.hpp"
#include "qmr/grid.hpp"

using namespace qmr;
using experiments::kPi;

TEST_CASE("grid geometry") {
    const PeriodicGrid g(1, 16);
    CHECK(g.coordinate(0) == doctest::Approx(-kPi));
    CHECK(g.spacing() == doctest::Approx(2 * kPi / 16));
    CHECK(g.wavenumber(3) == doctest::Approx(3.0));
    CHECK(g.wavenumber(8) == doctest::Approx(-8.0));
    CHECK(g.wavenumber(15) == doctest::Approx(-1.0));
    CHECK(g.nyquist(0.1) == doctest::Approx(0.8));
    CHECK(g.node_index(g.coordinate(5)) == 5);
    CHECK(g.node_index(g.coordinate(5) + 0.01) == -1);
}

TEST_CASE("grid rejects bad shapes") {
    CHECK_THROWS_AS(PeriodicGrid(1, 12), DimensionError);
    CHECK_THROWS_AS(PeriodicGrid(4, 8), DimensionError);
    CHECK_THROWS_AS(PeriodicGrid(1, 8, -1.0), DomainError);
}

TEST_CASE("flat and multi indices round-trip") {
    const PeriodicGrid g(3, 8);
    for (std::size_t i = 0; i < g.size(); i += 7) CHECK(g.flat_index(g.multi_index(i)) == i);
    CHECK(g.flat_index({-1, 0, 0}) == g.flat_index({7, 0, 0}));
}

TEST_CASE("forward then backward scales by N^d") {
    for (int dim = 1; dim <= 3; ++dim) {
        const PeriodicGrid g(dim, 16);
        Eigen::VectorXcd v = experiments::random_vector(g.size(), 7u + static_cast<unsigned>(dim));
        const Eigen::VectorXcd orig = v;
        fft::forward(g, v);
        fft::backward(g, v);
        CHECK((v / static_cast<double>(g.size()) - orig).norm() < 1e-12 * orig.norm());
    }
}

TEST_CASE("plane wave lands in a single bin") {
    const PeriodicGrid g(1, 32);
    Eigen::VectorXcd v(32);
    for (int j = 0; j < 32; ++j) v[j] = std::exp(cplx(0, 5 * g.coordinate(j)));
    fft::forward(g, v);
    for (int m = 0; m < 32; ++m) {
        if (m == 5)
            CHECK(std::abs(v[m]) == doctest::Approx(32.0));
        else
            CHECK(std::abs(v[m]) < 1e-10);
    }
}

TEST_CASE("non power of two 1D transform matches the direct sum") {
    Eigen::VectorXcd v = experiments::random_vector(12, 3);
    Eigen::VectorXcd direct = Eigen::VectorXcd::Zero(12);
    for (int m = 0; m < 12; ++m)
        for (int j = 0; j < 12; ++j) direct[m] += v[j] * std::exp(cplx(0, -2 * kPi * m * j / 12.0));
    fft::forward_1d(v);
    CHECK((v - direct).norm() < 1e-12 * direct.norm());
}

TEST_CASE("frequency multiplier acts by h k on a plane wave") {
    const double h = 0.1;
    const PeriodicGrid g(1, 64);
    const auto u = sample(g, h, [](const Vec& x) { return std::exp(cplx(0, 7 * x[0])); });
    const auto v = fft::apply_multiplier(u, [](const Vec& xi) { return cplx(xi[0] * xi[0]); });
    CHECK((v - cplx(0.49) * u).l2_norm() < 1e-12);
}

TEST_CASE("grid norms") {
    const PeriodicGrid g(1, 64);
    const auto one = sample(g, 0.1, [](const Vec&) { return cplx(1.0); });
    CHECK(one.l2_norm() == doctest::Approx(std::sqrt(2 * kPi)));
    CHECK(one.lp_norm(HUGE_VAL) == doctest::Approx(1.0));
    CHECK(one.lp_norm(4) == doctest::Approx(std::pow(2 * kPi, 0.25)));
    auto u = one;
    u.normalize();
    CHECK(u.l2_norm() == doctest::Approx(1.0));
    CHECK(u.inner(u).real() == doctest::Approx(1.0));
    CHECK_THROWS_AS(one.lp_norm(0.5), DomainError);
}

TEST_CASE("incompatible grid functions are refused") {
    const auto a = GridFunction(PeriodicGrid(1, 16), 0.1);
    const auto b = GridFunction(PeriodicGrid(1, 32), 0.1);
    const auto c = GridFunction(PeriodicGrid(1, 16), 0.2);
    CHECK_THROWS_AS(a + b, DimensionError);
    CHECK_THROWS_AS(a + c, DimensionError);
    CHECK_THROWS_AS(GridFunction(PeriodicGrid(1, 16), 0.1, Eigen::VectorXcd::Zero(8)), DimensionError);
    CHECK_THROWS_AS(GridFunction(PeriodicGrid(1, 16), 0.0), DomainError);
}

TEST_CASE("next_pow2") {
    CHECK(next_pow2(1) == 1);
    CHECK(next_pow2(5) == 8);
    CHECK(next_pow2(64) == 64);
}
