#pragma once

// Arithmetic backends shared by every module: binary64 and exact rationals.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace pqbbh {

using Rational = mpq_class;

template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

enum class ArithmeticMode { Float, Rational };

template <Scalar T>
inline constexpr ArithmeticMode mode_of = std::same_as<T, double> ? ArithmeticMode::Float
                                                                   : ArithmeticMode::Rational;

std::string_view to_string(ArithmeticMode mode);
ArithmeticMode parse_mode(std::string_view text);

inline double to_double(double v) { return v; }
/// Nearest binary64, ties to even (mpq get_d alone truncates).
double to_double(const Rational& v);

/// Converts a double or an exact decimal/fraction literal ("9/10", "0.95") into T.
template <Scalar T> T scalar_from_string(std::string_view text);

template <Scalar T> T scalar_from_double(double v)
{
    if constexpr (std::same_as<T, double>) {
        return v;
    } else {
        return Rational(v);
    }
}

template <Scalar T> T abs_value(const T& v)
{
    if constexpr (std::same_as<T, double>) {
        return std::fabs(v);
    } else {
        return abs(v);
    }
}

/// Integer power with exact semantics for rationals; negative exponents allowed.
template <Scalar T> T ipow(const T& base, std::int64_t e)
{
    if constexpr (std::same_as<T, double>) {
        return std::pow(base, static_cast<double>(e));
    } else {
        if (e < 0) {
            if (base == 0) {
                throw std::domain_error("ipow: zero to a negative power");
            }
            Rational inv = 1 / base;
            return ipow<Rational>(inv, -e);
        }
        Rational result = 1;
        Rational b = base;
        auto k = static_cast<std::uint64_t>(e);
        while (k != 0) {
            if (k & 1U) {
                result *= b;
            }
            k >>= 1U;
            if (k != 0) {
                b *= b;
            }
        }
        result.canonicalize();
        return result;
    }
}

/// Neumaier's variant of Kahan summation.
class CompensatedSum
{
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double init) : sum_(init) {}

    void add(double value)
    {
        const double t = sum_ + value;
        if (std::fabs(sum_) >= std::fabs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double value)
    {
        add(value);
        return *this;
    }

    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/// Exact accumulation for rationals, compensated accumulation for doubles.
template <Scalar T> class Accumulator;

template <> class Accumulator<double>
{
public:
    Accumulator& operator+=(double v)
    {
        sum_.add(v);
        return *this;
    }
    double value() const { return sum_.value(); }

private:
    CompensatedSum sum_;
};

template <> class Accumulator<Rational>
{
public:
    Accumulator& operator+=(const Rational& v)
    {
        sum_ += v;
        return *this;
    }
    Rational value() const { return sum_; }

private:
    Rational sum_ = 0;
};

/// Relative gap |a - b| / max(|a|, |b|); zero when both vanish.
double relative_gap(double a, double b);
Rational relative_gap(const Rational& a, const Rational& b);

} // namespace pqbbh
