#include <doctest.h>

#include "qmr/errors.hpp"
#include "qmr/rational.hpp"

using qmr::ExtRational;
using qmr::Rational;

TEST_CASE("parse accepts integers, fractions, decimals and infinity") {
    CHECK(ExtRational::parse("4") == ExtRational(4));
    CHECK(ExtRational::parse(" 5/2 ") == ExtRational(5, 2));
    CHECK(ExtRational::parse("2.5") == ExtRational(5, 2));
    CHECK(ExtRational::parse("10/4") == ExtRational(5, 2));
    for (const char* s : {"inf", "infinity", "oo", "Inf"}) CHECK(ExtRational::parse(s).is_infinite());
}

TEST_CASE("parse rejects garbage") {
    for (const char* s : {"", "abc", "1/0", "2/x", "3..1", "1.0000000000001"})
        CHECK_THROWS_AS(ExtRational::parse(s), qmr::DomainError);
}

TEST_CASE("str round-trips through parse") {
    for (const auto& x : {ExtRational(2), ExtRational(8, 3), ExtRational(12, 5), ExtRational::infinity()})
        CHECK(ExtRational::parse(x.str()) == x);
    CHECK(ExtRational(8, 3).str() == "8/3");
    CHECK(ExtRational::infinity().str() == "inf");
}

TEST_CASE("reciprocal of infinity is exactly zero") {
    CHECK(ExtRational::infinity().reciprocal() == Rational(0));
    CHECK(ExtRational(6).reciprocal() == Rational(1, 6));
    CHECK_THROWS_AS(ExtRational(0).reciprocal(), qmr::DomainError);
    CHECK_THROWS_AS(ExtRational::infinity().value(), qmr::DomainError);
}

TEST_CASE("ordering puts infinity above every finite value") {
    CHECK(ExtRational(1000000) < ExtRational::infinity());
    CHECK(ExtRational(5, 2) < ExtRational(3));
    CHECK(ExtRational(6, 4) == ExtRational(3, 2));
    CHECK(ExtRational::infinity() == ExtRational::infinity());
    CHECK_FALSE(ExtRational::infinity() < ExtRational::infinity());
}

TEST_CASE("decimal conversion") {
    CHECK(ExtRational(1, 4).to_double() == doctest::Approx(0.25));
    CHECK(qmr::to_string(Rational(-3, 6)) == "-1/2");
    CHECK(qmr::to_string(Rational(4, 2)) == "2");
}
