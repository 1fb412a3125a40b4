#include <doctest.h>

#include <cmath>

#include "experiments.hpp"
#include "oracle_values.hpp"
#include "qmr/errors.hpp"
#include "qmr/quantization.hpp"
#include "qmr/quasimodes.hpp"
#include "qmr/restriction.hpp"

using namespace qmr;
using namespace qmr::modes;
using experiments::kPi;
using experiments::vec1;

namespace {

Eigen::VectorXd unit3(double theta, double phi) {
    Eigen::VectorXd v(3);
    v << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
    return v;
}

}  // namespace

TEST_CASE("zonal harmonic peaks at the pole with the addition-theorem value") {
    const SphereHarmonic z(HarmonicKind::zonal, 100, 2);
    CHECK(std::abs(z(unit3(0, 0))) == doctest::Approx(oracle::kZonalSupDegree100).epsilon(1e-10));
    CHECK(std::abs(z(unit3(0, 0))) == doctest::Approx(std::sqrt(201 / (4 * kPi))).epsilon(1e-10));
    // Unnormalized profile is P_l with P_l(1) = 1.
    CHECK(z.zonal_profile(1.0) == doctest::Approx(1.0));
    CHECK(z.zonal_profile(-1.0) == doctest::Approx(1.0));  // even degree
    // Symmetric about the polar axis.
    CHECK(std::abs(z(unit3(0.7, 0.0)) - z(unit3(0.7, 2.1))) < 1e-12);
}

TEST_CASE("harmonics are normalized and satisfy the eigenvalue relation") {
    for (int l : {1, 7, 64, 300}) {
        for (auto kind : {HarmonicKind::zonal, HarmonicKind::highest_weight}) {
            const SphereHarmonic u(kind, l, 2);
            CHECK(u.quadrature_l2_norm() == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(u.eigen_defect() < 1e-12);
            CHECK(u.h() == doctest::Approx(1.0 / std::sqrt(l * (l + 1.0))));
        }
        const SphereHarmonic s3(HarmonicKind::zonal, l, 3);
        CHECK(s3.quadrature_l2_norm() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s3.h() == doctest::Approx(1.0 / std::sqrt(l * (l + 2.0))));
    }
    CHECK_THROWS_AS(SphereHarmonic(HarmonicKind::zonal, 0, 2), DomainError);
    CHECK_THROWS_AS(SphereHarmonic(HarmonicKind::zonal, 3, 4), DomainError);
    CHECK_THROWS_AS(SphereHarmonic(HarmonicKind::highest_weight, 3, 3), DomainError);
}

TEST_CASE("highest-weight constants match the oracle and grow like l^(1/4)") {
    std::vector<double> ls, cs;
    for (const auto& e : oracle::kHighestWeightConstant) {
        const SphereHarmonic u(HarmonicKind::highest_weight, e.degree, 2);
        CHECK(u.normalization() == doctest::Approx(e.value).epsilon(1e-9));
        if (e.degree >= 64) {
            ls.push_back(e.degree);
            cs.push_back(e.value);
        }
    }
    // decay_slope measures against 1/h, here against l directly.
    std::vector<double> inv;
    for (double l : ls) inv.push_back(1.0 / l);
    CHECK(-experiments::decay_slope(inv, cs) == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("highest-weight modulus is constant along the equator") {
    const SphereHarmonic u(HarmonicKind::highest_weight, 200, 2);
    double lo = 1e300, hi = 0;
    for (int i = 0; i < 97; ++i) {
        const double m = std::abs(u(unit3(kPi / 2, 2 * kPi * i / 97)));
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    CHECK((hi - lo) / hi < 1e-10);
    CHECK(hi == doctest::Approx(u.normalization()).epsilon(1e-12));
}

TEST_CASE("zonal sup growth has slope 1/2") {
    std::vector<double> hs, sups;
    for (int l = 32; l <= 2048; l *= 2) {
        const SphereHarmonic z(HarmonicKind::zonal, l, 2);
        hs.push_back(z.h());
        sups.push_back(std::abs(z(unit3(0, 0))));
    }
    CHECK(-experiments::decay_slope(hs, sups) == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("Hermite functions match the oracle samples") {
    const PeriodicGrid g(1, 1024, 12.8, -6.4);
    for (const auto& e : oracle::kHermite) {
        const auto u = oscillator_mode(e.k, e.h, g);
        const int idx = g.node_index(e.x, 1e-9);
        REQUIRE(idx >= 0);
        CHECK(u[static_cast<std::size_t>(idx)].real() == doctest::Approx(e.value).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("oscillator modes are orthonormal quasimodes") {
    const double h = 0.05;
    const PeriodicGrid g(1, 512, 12.0);
    std::vector<GridFunction> modes;
    for (int k : {0, 1, 2, 9, 10}) modes.push_back(oscillator_mode(k, h, g));
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = 0; j < modes.size(); ++j)
            CHECK(std::abs(modes[i].inner(modes[j]) - (i == j ? 1.0 : 0.0)) < 1e-10);
    // h^2 D^2 + x^2 - (2k+1)h annihilates the k-th mode.
    for (int k : {0, 3, 10}) {
        const double e = (2 * k + 1) * h;
        CHECK(quasimode_defect(symbols::oscillator(e), oscillator_mode(k, h, g)) < 1e-9);
    }
    CHECK(oscillator_index(1.0, h) == 10);
    CHECK_THROWS_AS(oscillator_mode(40, 0.1, PeriodicGrid(1, 256, 4.0)), DomainError);
}

TEST_CASE("coherent states: norm, peak and placement") {
    for (double h : {0.1, 0.02}) {
        const PeriodicGrid g1(1, experiments::points_for(4.0, h));
        const auto u = coherent_state(vec1(0.2), vec1(1.0), h, g1);
        CHECK(u.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(u.lp_norm(HUGE_VAL) == doctest::Approx(std::pow(kPi * h, -0.25)).epsilon(1e-3));
    }
    const double h = 0.05;
    const PeriodicGrid g2(2, 128);
    Vec x0(2), xi0(2);
    x0 << 0.0, 0.3;
    xi0 << 0.5, -0.5;
    const auto u2 = coherent_state(x0, xi0, h, g2);
    CHECK(u2.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u2.lp_norm(HUGE_VAL) == doctest::Approx(std::pow(kPi * h, -0.5)).epsilon(1e-3));
    const PeriodicGrid g(1, 256);
    CHECK_THROWS_AS(coherent_state(vec1(3.0), vec1(0.0), 0.1, g), PlacementError);
    CHECK_THROWS_AS(coherent_state(vec1(0.0), vec1(20.0), 0.1, g), PlacementError);
}

TEST_CASE("quasimode defects of the sphere families are exact") {
    // The ladder of each family is built from exact eigenfunctions, so the
    // relative eigenvalue defect is at roundoff on every rung.
    for (int l = 16; l <= 4096; l *= 4) {
        CHECK(SphereHarmonic(HarmonicKind::zonal, l, 2).eigen_defect() < 1e-12);
        CHECK(SphereHarmonic(HarmonicKind::zonal, l, 3).eigen_defect() < 1e-12);
    }
}

TEST_CASE("localisation defect of coherent states decays along the ladder") {
    std::vector<double> hs, ds;
    for (double h : {1.0 / 8, 1.0 / 12, 1.0 / 16, 1.0 / 24}) {
        const PeriodicGrid g(1, experiments::points_for(3.0, h));
        const auto u = coherent_state(vec1(0.0), vec1(1.0), h, g);
        hs.push_back(h);
        ds.push_back(quant::localisation_defect(u, quant::frequency_cutoff(1, 1.5, 2.5)));
    }
    CHECK(experiments::decay_slope(hs, ds) >= 3.0);
}

TEST_CASE("h-ladders") {
    const auto d = HLadder::doubling_degrees(64, 2048, 2);
    CHECK(d.size() == 6);
    CHECK(d.degrees.back() == 2048);
    CHECK(d.values.front() == doctest::Approx(1.0 / std::sqrt(64.0 * 65)));
    CHECK_NOTHROW(d.validate_for_fit());
    CHECK_THROWS_AS(HLadder::doubling_degrees(64, 1024, 2).validate_for_fit(), DomainError);

    const auto y = HLadder::dyadic(5, 9);
    REQUIRE(y.size() == 5);
    CHECK(y.values[0] == 1.0 / 32);
    CHECK(y.values[4] == 1.0 / 512);
    CHECK(HLadder::dyadic(3, 4, 0.5).size() == 3);

    const auto geo = HLadder::geometric(0.1, 0.5, 7);
    CHECK(geo.size() == 7);
    CHECK(geo.values[6] == doctest::Approx(0.1 / 64));

    HLadder bad;
    bad.values = {0.1, 0.1, 0.05};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.values = {0.1, -0.05};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(HLadder{}.validate(), DomainError);
    CHECK_THROWS_AS(HLadder::doubling_degrees(0, 8, 2), DomainError);
}
