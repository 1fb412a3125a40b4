#include "qmr/rational.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "qmr/errors.hpp"

namespace qmr {

ExtRational ExtRational::infinity() {
    ExtRational x;
    x.infinite_ = true;
    return x;
}

Rational ExtRational::value() const {
    if (infinite_) throw DomainError("exponent is infinite; no finite value");
    return value_;
}

Rational ExtRational::reciprocal() const {
    if (infinite_) return Rational(0);
    if (value_.numerator() == 0) throw DomainError("reciprocal of zero exponent");
    return Rational(1) / value_;
}

double ExtRational::to_double() const {
    if (infinite_) return std::numeric_limits<double>::infinity();
    return qmr::to_double(value_);
}

std::string ExtRational::str() const {
    if (infinite_) return "inf";
    return to_string(value_);
}

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DomainError("cannot parse exponent '" + std::string(whole) + "'");
    return v;
}

}  // namespace

ExtRational ExtRational::parse(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw DomainError("empty exponent");
    if (text == "inf" || text == "infinity" || text == "oo" || text == "Inf") return infinity();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = parse_int(text.substr(0, slash), text);
        auto den = parse_int(text.substr(slash + 1), text);
        if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
        return ExtRational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto frac = text.substr(dot + 1);
        if (frac.size() > 12) throw DomainError("too many decimals in '" + std::string(text) + "'");
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        std::string digits(text.substr(0, dot));
        digits += frac;
        return ExtRational(parse_int(digits, text), scale);
    }
    return ExtRational(parse_int(text, text));
}

bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
    if (a.infinite_) return std::strong_ordering::greater;
    if (b.infinite_) return std::strong_ordering::less;
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ == b.value_) return std::strong_ordering::equal;
    return std::strong_ordering::greater;
}

std::ostream& operator<<(std::ostream& os, const ExtRational& x) { return os << x.str(); }

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace qmr
