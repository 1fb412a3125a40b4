#include <doctest.h>

#include <cmath>

#include "qmr/errors.hpp"
#include "qmr/exponents.hpp"
#include "qmr/scaling.hpp"

using namespace qmr;
using namespace qmr::scaling;

namespace {

std::vector<TableRow> synthetic(double (*norm)(double), int rungs = 8) {
    std::vector<TableRow> rows;
    for (int i = 0; i < rungs; ++i) {
        TableRow r;
        r.rung = static_cast<std::size_t>(i);
        r.h = std::exp2(-4.0 - i);
        r.p = ExtRational(4);
        r.norm = norm(r.h);
        rows.push_back(r);
    }
    return rows;
}

ExperimentSpec small_zonal() {
    ExperimentSpec s;
    s.name = "zonal";
    s.family = {"zonal", 2};
    s.submanifold = {"great_circle", 1.5707963267948966, 16};
    s.p_list = {4, ExtRational::infinity()};
    s.ladder = modes::HLadder::doubling_degrees(8, 256, 2);
    return s;
}

theory::DeltaResult power(Rational r, bool log = false) {
    theory::DeltaResult d;
    d.power = r;
    d.log_half_power = log;
    return d;
}

}  // namespace

TEST_CASE("pure power laws are fitted exactly") {
    const auto fit = fit_power_law(synthetic([](double h) { return 3.0 * std::pow(h, -0.5); }), false);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.residual < 1e-12);
    CHECK(fit.rungs_trimmed == 0);
    CHECK(fit.rungs_used == 8);
}

TEST_CASE("log-corrected data recovers the power and the log exponent") {
    const auto rows = synthetic([](double h) { return std::pow(h, -0.5) * std::sqrt(std::log(1 / h)); });
    const auto fit = fit_power_law(rows, true);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(fit.log_coefficient == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fit.residual_with_log < 1e-6);
    CHECK(fit.residual_without_log > fit.residual_with_log);
    // The log-case verdict sees the smaller with-log residual.
    const auto v = verdict(fit, power(Rational(1, 2), true), 0.1);
    CHECK(v.log_case);
    CHECK(v.outcome == Outcome::pass);
}

TEST_CASE("preasymptotic rungs are trimmed") {
    auto rows = synthetic([](double h) { return std::pow(h, -0.25); });
    rows[0].norm *= 3.0;
    rows[1].norm *= 1.5;
    const auto fit = fit_power_law(rows, false);
    CHECK(fit.rungs_trimmed == 2);
    CHECK(fit.slope == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("verdict bands") {
    ScalingFit f;
    f.slope = 0.26;
    CHECK(verdict(f, power(Rational(1, 4)), 0.03).outcome == Outcome::pass);
    f.slope = 0.40;
    const auto v = verdict(f, power(Rational(1, 4)), 0.03);
    CHECK(v.outcome == Outcome::fail);
    CHECK(!v.passed());
    CHECK(v.detail.find("0.400000") != std::string::npos);

    // Log case with residuals within 10%: inconclusive, which still passes.
    ScalingFit g;
    g.slope_without_log = 0.5;
    g.residual_without_log = 1.0e-3;
    g.residual_with_log = 0.95e-3;
    g.log_variant_available = true;
    const auto w = verdict(g, power(Rational(1, 2), true), 0.05);
    CHECK(w.outcome == Outcome::inconclusive);
    CHECK(w.passed());
    g.residual_with_log = 2e-3;
    CHECK(verdict(g, power(Rational(1, 2), true), 0.05).outcome == Outcome::fail);
    CHECK(std::string(to_string(Outcome::inconclusive)) == "inconclusive");
}

TEST_CASE("experiments are deterministic") {
    const auto spec = small_zonal();
    const auto a = run_experiment(spec);
    const auto b = run_experiment(spec);
    REQUIRE(a.rows.size() == 12);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].rung == b.rows[i].rung);
        CHECK(a.rows[i].p == b.rows[i].p);
        CHECK(a.rows[i].norm == b.rows[i].norm);  // bit-identical
    }
    CHECK(a.spec_hash == spec.hash());
    // Ordered by rung, then by position in p_list.
    CHECK(a.rows[0].p == ExtRational(4));
    CHECK(a.rows[1].p.is_infinite());
    CHECK(a.rows[2].rung == 1);
}

TEST_CASE("no fitted slope exceeds the theorem") {
    const auto spec = small_zonal();
    const auto t = run_experiment(spec);
    for (const auto& p : spec.p_list) {
        const auto fit = fit_power_law(t, p, false);
        CHECK(fit.slope <= to_double(theory::delta(2, 1, p).power) + spec.tolerance);
    }
}

TEST_CASE("constant family has zero slope") {
    ExperimentSpec s = small_zonal();
    s.family.name = "constant";
    const auto t = run_experiment(s);
    const auto fit = fit_power_law(t, ExtRational(4), false);
    CHECK(fit.slope == doctest::Approx(0.0).scale(1.0));
    CHECK(verdict(fit, theory::delta(2, 1, 4), 0.05).outcome == Outcome::fail);
}

TEST_CASE("experiment spec validation") {
    auto s = small_zonal();
    CHECK_NOTHROW(s.validate());
    auto bad = s;
    bad.ladder = modes::HLadder::doubling_degrees(8, 128, 2);
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("ladder"), ConfigError);
    bad = s;
    bad.tolerance = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.p_list = {ExtRational(3, 2)};
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("below 2"), ConfigError);
    bad = s;
    bad.family.name = "banana";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.submanifold.kind = "geodesic_s3";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.submanifold.samples_per_degree = 4;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = s;
    bad.family = {"highest_weight", 3};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("spec hash is stable and sensitive") {
    const auto s = small_zonal();
    CHECK(s.hash() == small_zonal().hash());
    CHECK(s.hash().size() == 16);
    auto t = s;
    t.tolerance = 0.051;
    CHECK(t.hash() != s.hash());
    t = s;
    t.seed = 1;
    CHECK(t.hash() != s.hash());
    CHECK(s.canonical().find("p=4,inf") != std::string::npos);
}

TEST_CASE("fits need six valid rungs") {
    CHECK_THROWS_AS(fit_power_law(synthetic([](double h) { return 1 / h; }, 5), false), DataError);
    auto rows = synthetic([](double h) { return 1 / h; });
    rows[3].norm = 0.0;
    CHECK_THROWS_AS(fit_power_law(rows, false), DataError);
    rows[3].norm = NAN;
    CHECK_THROWS_AS(fit_power_law(rows, false), DataError);
    // With-log fits need log(1/h) > 1 on every rung.
    auto coarse = synthetic([](double h) { return 1 / h; });
    coarse[0].h = 0.5;
    coarse[0].norm = 2.0;
    CHECK_THROWS_AS(fit_power_law(coarse, true), DataError);
}

TEST_CASE("planned nodes resolve the degree") {
    SubmanifoldSpec s;
    CHECK(planned_nodes(s, 8) == 256);
    CHECK(planned_nodes(s, 1000) == 16000);
    s.samples_per_degree = 13;
    CHECK(planned_nodes(s, 101) % 4 == 0);
    CHECK(planned_nodes(s, 101) >= 1313);
}
