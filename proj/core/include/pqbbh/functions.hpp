#pragma once

// Named test functions on [0, inf).  Every registry entry is bounded and
// continuous, and carries a modulus bound in the transformed variable
// u = t/(1+t) so that grid-based sup estimates can quote an honest slack.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqbbh/scalar.hpp"

namespace pqbbh {

/// u(t) = t / (1 + t), the variable in which the operators' metric lives.
template <Scalar T> T to_u(const T& t)
{
    return t / (1 + t);
}

/// Inverse of to_u on [0, 1).
template <Scalar T> T from_u(const T& u)
{
    return u / (1 - u);
}

class RealFunction
{
public:
    using FloatEval = std::function<double(double)>;
    using ExactEval = std::function<Rational(const Rational&)>;
    /// h -> sup{|f(t) - f(x)| : |u(t) - u(x)| <= h}, or an upper bound for it.
    using UModulus = std::function<double(double)>;

    RealFunction(std::string name, FloatEval eval, ExactEval exact, UModulus modulus);

    const std::string& name() const { return name_; }

    double operator()(double t) const { return eval_(t); }

    /// Throws DomainError when the function has no exact-rational form.
    Rational operator()(const Rational& t) const;

    bool has_exact() const { return static_cast<bool>(exact_); }

    double u_modulus(double h) const { return modulus_(h); }

    /// Grid slack 2 * modulus(1/resolution) used by the bound checks.
    double grid_slack(int resolution) const;

    /// a * this + b * other, exact when both parts are.
    RealFunction combine(double a, const RealFunction& other, double b) const;

private:
    std::string name_;
    FloatEval eval_;
    ExactEval exact_;
    UModulus modulus_;
};

template <Scalar T> T evaluate(const RealFunction& f, const T& t)
{
    return f(t);
}

RealFunction make_constant(const Rational& c);
/// u^power for a nonnegative integer power.
RealFunction make_upow(int power);
RealFunction make_u();
RealFunction make_u_squared();
/// M * u^alpha, which satisfies |f(t) - f(x)| <= M |u(t) - u(x)|^alpha.
RealFunction make_lip(double alpha, double M);
RealFunction make_sinu();
RealFunction make_expneg();

/// Parses a registry name: const(c), u, u2, upow(k), lip(alpha,M), sinu, expneg.
/// Throws UnknownNameError for anything else.
RealFunction function_from_name(std::string_view name);

/// Names accepted by function_from_name, in canonical form, for help text.
std::vector<std::string> registry_examples();

} // namespace pqbbh
