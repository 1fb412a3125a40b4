#include <doctest.h>

#include <cmath>
#include <random>

#include "experiments.hpp"
#include "qmr/errors.hpp"
#include "qmr/quantization.hpp"
#include "qmr/quasimodes.hpp"

using namespace qmr;
using experiments::kPi;
using experiments::vec1;

namespace {

// Sum of three Gaussian bumps in phase space: real, smooth, not separable.
SymbolField random_bump_symbol(std::mt19937& rng) {
    std::uniform_real_distribution<double> pos(-2.0, 2.0), amp(-1.0, 1.0), wid(0.2, 0.8);
    struct Bump {
        double a, x0, k0, sx, sk;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < 3; ++i) bumps.push_back({amp(rng), pos(rng), pos(rng), wid(rng), wid(rng)});
    SymbolField s;
    s.name = "bumps";
    s.eval = [bumps](const Vec& x, const Vec& xi) {
        double v = 0.0;
        for (const auto& b : bumps)
            v += b.a * std::exp(-std::pow(x[0] - b.x0, 2) / b.sx - std::pow(xi[0] - b.k0, 2) / b.sk);
        return cplx(v);
    };
    return with_numeric_derivatives(s);
}

}  // namespace

TEST_CASE("Weyl matrices of 50 random real symbols are Hermitian") {
    std::mt19937 rng(20240611);
    const PeriodicGrid g(1, 32);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = random_bump_symbol(rng);
        const Eigen::MatrixXcd w = quant::weyl_matrix(s, 0.25, g);
        const double rel = (w - w.adjoint()).norm() / w.norm();
        CHECK(rel < 1e-10);
    }
}

TEST_CASE("left quantization of an x-independent symbol is the Fourier multiplier") {
    const auto sym = symbols::free_particle(1);
    for (int n : {16, 32, 64, 128, 256}) {
        const double h = 0.05;
        const PeriodicGrid g(1, n);
        GridFunction u(g, h, experiments::random_vector(g.size(), static_cast<unsigned>(n)));
        const auto a = quant::quantize_left(sym, h, u);
        const auto b = fft::apply_multiplier(u, [](const Vec& xi) { return cplx(0.5 * xi.squaredNorm()); });
        CHECK((a - b).l2_norm() <= 1e-12 * b.l2_norm());
    }
}

TEST_CASE("multiplication symbols act pointwise") {
    const PeriodicGrid g(1, 64);
    const double h = 0.1;
    const auto v = symbols::potential(1, [](const Vec& x) { return std::cos(x[0]); });
    GridFunction u(g, h, experiments::random_vector(g.size(), 5));
    const auto a = quant::quantize_left(v, h, u);
    const auto b = quant::quantize_weyl(v, h, u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(a[i] - std::cos(g.point(i)[0]) * u[i]) < 1e-12);
        CHECK(std::abs(b[i] - a[i]) < 1e-12);
    }
}

TEST_CASE("dense left quantization agrees with the separable path") {
    // coupled_symbol carries no separable terms, so it goes through the
    // dense double sum; compare against the same symbol written as terms.
    const PeriodicGrid g(1, 32);
    const double h = 0.2;
    GridFunction u(g, h, experiments::random_vector(g.size(), 9));
    SymbolField sep = experiments::coupled_symbol();
    sep.terms = {{[](const Vec& x) { return cplx(1.0 + 0.3 * std::cos(x[0])); },
                  [](const Vec& xi) { return cplx(xi[0] * xi[0] / 2); }},
                 {[](const Vec& x) { return cplx(std::sin(x[0])); }, [](const Vec& xi) { return cplx(xi[0]); }}};
    const auto dense = quant::quantize_left(experiments::coupled_symbol(), h, u);
    const auto fast = quant::quantize_left(sep, h, u);
    CHECK((dense - fast).l2_norm() < 1e-10 * fast.l2_norm());
}

TEST_CASE("dense matrices respect the budget") {
    CHECK_THROWS_AS(quant::weyl_matrix(experiments::coupled_symbol(), 0.1, PeriodicGrid(1, 8192)), BudgetError);
    CHECK_THROWS_AS(quant::left_matrix(experiments::coupled_symbol(), 0.1, PeriodicGrid(1, 64), 32), BudgetError);
}

TEST_CASE("aliasing is detected") {
    const auto chi = quant::frequency_cutoff(1, 1.0, 2.0);
    CHECK_THROWS_AS(quant::check_resolution(chi.chi, PeriodicGrid(1, 16), 0.1), AliasingError);
    CHECK_NOTHROW(quant::check_resolution(chi.chi, PeriodicGrid(1, 256), 0.1));
}

TEST_CASE("coherent state Sobolev ratio has the closed form pi^{-1/4} h^{1/4}") {
    for (double h : {1.0 / 16, 1.0 / 64, 1.0 / 256}) {
        const PeriodicGrid g(1, experiments::points_for(0.5 + 8 * std::sqrt(h), h));
        const auto u = modes::coherent_state(vec1(0.0), vec1(0.5), h, g);
        const double r = quant::sobolev_ratio(u, ExtRational::infinity(), 2);
        CHECK(r == doctest::Approx(std::pow(kPi, -0.25) * std::pow(h, 0.25)).epsilon(1e-6));
    }
    const PeriodicGrid g(1, 64);
    const auto u = modes::coherent_state(vec1(0.0), vec1(0.0), 0.1, g);
    CHECK_THROWS_AS(quant::sobolev_ratio(u, 2, 4), DomainError);
}

TEST_CASE("localised coherent state has a negligible localisation defect") {
    const double h = 1.0 / 64;
    const PeriodicGrid g(1, experiments::points_for(3.0, h));
    const auto u = modes::coherent_state(vec1(0.0), vec1(0.5), h, g);
    CHECK(quant::localisation_defect(u, quant::frequency_cutoff(1, 2.0, 2.5)) < 1e-12);
    // A cutoff that misses the packet removes almost everything.
    CHECK(quant::localisation_defect(u, quant::frequency_cutoff(1, 0.05, 0.1)) > 0.9);
}

TEST_CASE("composition defect shrinks at least linearly in h") {
    const auto a = experiments::one_term("cos-bump", [](double x) { return std::cos(x); },
                                         [](double xi) { return std::exp(-xi * xi); });
    const auto b = experiments::one_term("sin-xi", [](double x) { return std::sin(x); }, [](double xi) { return xi; });
    std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64}, ds;
    for (double h : hs) ds.push_back(experiments::composition_defect(a, b, h));
    CHECK(experiments::decay_slope(hs, ds) >= 0.9);
}

TEST_CASE("elliptic inversion refuses a symbol vanishing on the cutoff support") {
    const double h = 1.0 / 32;
    const PeriodicGrid g(1, 256, 12.0);
    const auto u = modes::oscillator_mode(modes::oscillator_index(1.0, h), h, g);
    PhaseBox in = PhaseBox::cube(1, 1, 0.5, 0.5), out = PhaseBox::cube(1, 1, 0.8, 1.2);
    const auto chi = quant::make_cutoff(in, out);
    CHECK_THROWS_AS(quant::elliptic_localize_defect(symbols::oscillator(1.0), chi, u), EllipticityError);
}
