#include "pqbbh/functions.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <utility>

#include "pqbbh/errors.hpp"

namespace pqbbh {

RealFunction::RealFunction(std::string name, FloatEval eval, ExactEval exact, UModulus modulus)
    : name_(std::move(name)), eval_(std::move(eval)), exact_(std::move(exact)), modulus_(std::move(modulus))
{
}

Rational RealFunction::operator()(const Rational& t) const
{
    if (!exact_) {
        throw DomainError("function '" + name_ + "' has no exact rational evaluation");
    }
    return exact_(t);
}

double RealFunction::grid_slack(int resolution) const
{
    return 2.0 * modulus_(1.0 / static_cast<double>(resolution));
}

RealFunction RealFunction::combine(double a, const RealFunction& other, double b) const
{
    std::ostringstream name;
    name << a << '*' << name_ << '+' << b << '*' << other.name_;
    ExactEval exact;
    if (exact_ && other.exact_) {
        const Rational ra(a);
        const Rational rb(b);
        exact = [ra, rb, f = exact_, g = other.exact_](const Rational& t) -> Rational {
            return ra * f(t) + rb * g(t);
        };
    }
    return RealFunction(
        name.str(), [a, b, f = eval_, g = other.eval_](double t) { return a * f(t) + b * g(t); }, std::move(exact),
        [a, b, f = modulus_, g = other.modulus_](double h) { return std::fabs(a) * f(h) + std::fabs(b) * g(h); });
}

RealFunction make_constant(const Rational& c)
{
    const double cd = to_double(c);
    std::ostringstream name;
    name << "const(" << c.get_str() << ')';
    return RealFunction(
        name.str(), [cd](double) { return cd; }, [c](const Rational&) { return c; }, [](double) { return 0.0; });
}

RealFunction make_upow(int power)
{
    if (power < 0) {
        throw PreconditionError("upow: power must be nonnegative");
    }
    if (power == 0) {
        return make_constant(Rational(1));
    }
    return RealFunction(
        power == 1 ? "u" : (power == 2 ? "u2" : "upow(" + std::to_string(power) + ")"),
        [power](double t) { return std::pow(t / (1.0 + t), power); },
        [power](const Rational& t) { return ipow<Rational>(to_u(t), power); },
        [power](double h) { return static_cast<double>(power) * h; });
}

RealFunction make_u() { return make_upow(1); }

RealFunction make_u_squared() { return make_upow(2); }

RealFunction make_lip(double alpha, double M)
{
    if (!(alpha > 0.0 && alpha <= 1.0) || !(M > 0.0)) {
        throw PreconditionError("lip: need 0 < alpha <= 1 and M > 0");
    }
    std::ostringstream name;
    name << "lip(" << alpha << ',' << M << ')';
    RealFunction::ExactEval exact;
    if (alpha == 1.0) {
        const Rational rm(M);
        exact = [rm](const Rational& t) -> Rational { return rm * to_u(t); };
    }
    return RealFunction(
        name.str(), [alpha, M](double t) { return M * std::pow(t / (1.0 + t), alpha); }, std::move(exact),
        [alpha, M](double h) { return M * std::pow(h, alpha); });
}

RealFunction make_sinu()
{
    return RealFunction(
        "sinu", [](double t) { return std::sin(t / (1.0 + t)); }, {}, [](double h) { return h; });
}

RealFunction make_expneg()
{
    // d/du exp(-u/(1-u)) = -exp(-t)(1+t)^2, maximal at t = 1.
    const double lip = 4.0 / std::exp(1.0);
    return RealFunction(
        "expneg", [](double t) { return std::exp(-t); }, {}, [lip](double h) { return lip * h; });
}

namespace {

std::string strip(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(c);
        }
    }
    return out;
}

// "head(a,b)" -> {"a","b"}; nullopt if s does not have that shape.
std::optional<std::vector<std::string>> call_args(const std::string& s, std::string_view head)
{
    if (s.size() < head.size() + 2 || s.compare(0, head.size(), head) != 0 || s[head.size()] != '(' ||
        s.back() != ')') {
        return std::nullopt;
    }
    std::vector<std::string> args;
    std::string current;
    for (std::size_t i = head.size() + 1; i + 1 < s.size(); ++i) {
        if (s[i] == ',') {
            args.push_back(current);
            current.clear();
        } else {
            current.push_back(s[i]);
        }
    }
    args.push_back(current);
    return args;
}

} // namespace

RealFunction function_from_name(std::string_view raw)
{
    const std::string s = strip(raw);
    try {
        if (s == "u") {
            return make_u();
        }
        if (s == "u2") {
            return make_u_squared();
        }
        if (s == "sinu") {
            return make_sinu();
        }
        if (s == "expneg") {
            return make_expneg();
        }
        if (auto args = call_args(s, "const"); args && args->size() == 1) {
            return make_constant(scalar_from_string<Rational>((*args)[0]));
        }
        if (auto args = call_args(s, "upow"); args && args->size() == 1) {
            return make_upow(std::stoi((*args)[0]));
        }
        if (auto args = call_args(s, "lip"); args && args->size() == 2) {
            return make_lip(scalar_from_string<double>((*args)[0]), scalar_from_string<double>((*args)[1]));
        }
    } catch (const std::invalid_argument& e) {
        throw UnknownNameError("bad function '" + s + "': " + e.what());
    }
    throw UnknownNameError("unknown function '" + s + "'");
}

std::vector<std::string> registry_examples()
{
    return {"const(c)", "u", "u2", "upow(k)", "lip(alpha,M)", "sinu", "expneg"};
}

} // namespace pqbbh
