#include "pqbbh/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "pqbbh/errors.hpp"

namespace pqbbh {

std::string_view to_string(ArithmeticMode mode)
{
    return mode == ArithmeticMode::Float ? "float" : "rational";
}

ArithmeticMode parse_mode(std::string_view text)
{
    if (text == "float") {
        return ArithmeticMode::Float;
    }
    if (text == "rational") {
        return ArithmeticMode::Rational;
    }
    throw UnknownNameError("unknown arithmetic mode '" + std::string(text) + "' (expected float|rational)");
}

namespace {

// "a/b", "-1.25", "3", "1e-3" -> exact rational.
Rational parse_rational(std::string_view text)
{
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) {
        throw std::invalid_argument("empty numeric literal");
    }
    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) {
            throw std::invalid_argument("zero denominator in '" + s + "'");
        }
        Rational r = num / den;
        r.canonicalize();
        return r;
    }
    std::int64_t exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        const std::string exp_part = s.substr(e + 1);
        auto [ptr, ec] = std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), exponent);
        if (ec != std::errc{} || ptr != exp_part.data() + exp_part.size()) {
            throw std::invalid_argument("bad exponent in '" + s + "'");
        }
        s.resize(e);
    }
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.erase(0, 1);
    }
    std::string digits;
    std::int64_t frac_digits = 0;
    bool seen_point = false;
    for (char c : s) {
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            frac_digits += seen_point ? 1 : 0;
        } else {
            throw std::invalid_argument("bad numeric literal '" + std::string(text) + "'");
        }
    }
    if (digits.empty()) {
        throw std::invalid_argument("bad numeric literal '" + std::string(text) + "'");
    }
    Rational r(mpz_class(digits, 10));
    r *= ipow<Rational>(Rational(10), exponent - frac_digits);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

} // namespace

double to_double(const Rational& v)
{
    const double d = v.get_d();
    if (!std::isfinite(d) || Rational(d) == v) {
        return d;
    }
    const double next = std::nextafter(d, v > 0 ? HUGE_VAL : -HUGE_VAL);
    if (!std::isfinite(next)) {
        return d;
    }
    const Rational below = abs(Rational(v - d));
    const Rational above = abs(Rational(next - v));
    if (below != above) {
        return below < above ? d : next;
    }
    std::uint64_t bits = 0;
    std::memcpy(&bits, &d, sizeof bits);
    return (bits & 1U) == 0 ? d : next;
}

template <> double scalar_from_string<double>(std::string_view text)
{
    return to_double(parse_rational(text));
}

template <> Rational scalar_from_string<Rational>(std::string_view text)
{
    return parse_rational(text);
}

double relative_gap(double a, double b)
{
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

Rational relative_gap(const Rational& a, const Rational& b)
{
    const Rational scale = std::max(Rational(abs(a)), Rational(abs(b)));
    if (scale == 0) {
        return 0;
    }
    Rational r = abs(a - b) / scale;
    r.canonicalize();
    return r;
}

} // namespace pqbbh
