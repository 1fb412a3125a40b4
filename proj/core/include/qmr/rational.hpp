#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace qmr {

// Careful: with C++20 rewritten comparisons, boost 1.74's rational == int
// and rational != int recurse forever. Compare against Rational(n).
using Rational = boost::rational<std::int64_t>;

/// A rational number or +infinity. Lebesgue exponents live here: p = inf is
/// an exact value and 1/inf = 0.
class ExtRational {
public:
    ExtRational() = default;
    ExtRational(std::int64_t n) : value_(n) {}  // NOLINT(implicit)
    ExtRational(std::int64_t num, std::int64_t den) : value_(num, den) {}
    ExtRational(Rational r) : value_(r) {}  // NOLINT(implicit)

    static ExtRational infinity();

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }

    /// Finite value; throws DomainError on infinity.
    Rational value() const;
    /// 1/x with 1/inf = 0; throws DomainError on zero.
    Rational reciprocal() const;
    double to_double() const;

    /// "inf", an integer, or "num/den".
    std::string str() const;
    /// Accepts "inf"/"infinity"/"oo", integers, "a/b" and finite decimals ("2.5").
    static ExtRational parse(std::string_view text);

    friend bool operator==(const ExtRational& a, const ExtRational& b);
    friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

private:
    Rational value_{0};
    bool infinite_ = false;
};

std::ostream& operator<<(std::ostream& os, const ExtRational& x);

/// "num/den" or "num" for a plain rational.
std::string to_string(const Rational& r);
double to_double(const Rational& r);

}  // namespace qmr
