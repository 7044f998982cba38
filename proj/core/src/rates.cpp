#include "pqbbh/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pqbbh/errors.hpp"

namespace pqbbh {

namespace {

void require_resolution(int resolution, const char* where)
{
    if (resolution < 2) {
        throw PreconditionError(std::string(where) + ": resolution must be at least 2");
    }
}

template <Scalar T> void canonical(T& v)
{
    if constexpr (std::same_as<T, Rational>) {
        v.canonicalize();
    }
}

void finish(BoundReport& report)
{
    report.pass = true;
    report.worst_margin = report.points.empty() ? 0.0 : report.points.front().margin;
    for (const auto& pt : report.points) {
        report.worst_margin = std::min(report.worst_margin, pt.margin);
        report.pass = report.pass && pt.pass;
    }
}

} // namespace

std::vector<double> u_grid(int resolution)
{
    require_resolution(resolution, "u_grid");
    std::vector<double> us(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        us[static_cast<std::size_t>(i)] = static_cast<double>(i) / resolution;
    }
    return us;
}

std::vector<double> x_grid(int resolution)
{
    auto xs = u_grid(resolution);
    for (double& v : xs) {
        v = v / (1.0 - v);
    }
    return xs;
}

ModulusTable::ModulusTable(const RealFunction& f, int resolution)
    : resolution_(resolution), slack_(0.0)
{
    require_resolution(resolution, "ModulusTable");
    slack_ = f.grid_slack(resolution);
    const auto xs = x_grid(resolution);
    std::vector<double> fs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fs[i] = f(xs[i]);
    }
    const std::size_t R = xs.size();
    prefix_max_.assign(R, 0.0);
    for (std::size_t m = 1; m < R; ++m) {
        double best = 0.0;
        for (std::size_t i = 0; i + m < R; ++i) {
            best = std::max(best, std::fabs(fs[i + m] - fs[i]));
        }
        prefix_max_[m] = std::max(prefix_max_[m - 1], best);
    }
}

double ModulusTable::operator()(double delta) const
{
    if (!(delta >= 0.0)) {
        throw PreconditionError("modulus: delta must be nonnegative");
    }
    const double lag = std::floor(delta * resolution_ + 1e-9);
    const auto m = static_cast<std::size_t>(std::min(lag, static_cast<double>(resolution_ - 1)));
    return prefix_max_[m];
}

double modulus_tilde(const RealFunction& f, double delta, int resolution)
{
    return ModulusTable(f, resolution)(delta);
}

ModulusEstimate modulus_estimate(const RealFunction& f, double delta, int resolution)
{
    return {f.name(), delta, modulus_tilde(f, delta, resolution), resolution};
}

template <Scalar T> T delta_n(const T& x, std::int64_t n, const PQParams<T>& params)
{
    if (n < 1 || !(x >= 0)) {
        throw PreconditionError("delta_n: need n >= 1 and x >= 0");
    }
    const T& p = params.p();
    const T& q = params.q();
    const T n0 = pq_integer(n, params);
    const T n1 = pq_integer(n + 1, params);
    const T nm = pq_integer(n - 1, params);
    const T u = to_u(x);
    T result = u * u * (p * p * q * q * q * n0 * nm / (n1 * n1) * (1 + x) / (p + q * x) - 2 * p * q * n0 / n1 + 1) +
               ipow(p, n + 2) * q * n0 / (n1 * n1) * u;
    canonical(result);
    return result;
}

template <Scalar T> T central_second_moment(const T& x, std::int64_t n, const PQParams<T>& params)
{
    params.require_strict("central_second_moment");
    const NodeWeightTable<T> table(n, params);
    const T u = to_u(x);
    std::vector<T> values(table.unodes().size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const T d = table.unodes()[k] - u;
        values[k] = d * d;
    }
    return table.apply(std::span<const T>(values), x);
}

template <Scalar T> T central_second_moment_closed(const T& x, std::int64_t n, const PQParams<T>& params)
{
    const T u = to_u(x);
    T result = moment_closed(2, n, x, params, MomentVariant::OracleConsistent) -
               2 * u * moment_closed(1, n, x, params, MomentVariant::OracleConsistent) +
               params.p() * params.q() * u * u;
    canonical(result);
    return result;
}

template <Scalar T> T delta_n_excess(const T& x, std::int64_t n, const PQParams<T>& params)
{
    const T& p = params.p();
    const T& q = params.q();
    const T n0 = pq_integer(n, params);
    const T n1 = pq_integer(n + 1, params);
    const T nm = pq_integer(n - 1, params);
    const T u = to_u(x);
    T result = (1 - p) * p * p * q * q * q * n0 * nm / (n1 * n1) * u * u * (1 + x) / (p + q * x) +
               u * u * ((1 - p * q) - 2 * p * q * (1 - p) * n0 / n1);
    canonical(result);
    return result;
}

BoundReport rate_bound_check(const RealFunction& f, std::int64_t n, const PQParams<double>& params,
                             std::span<const double> xs, int resolution)
{
    params.require_strict("rate_bound_check");
    const NodeWeightTable<double> table(n, params);
    const ModulusTable modulus(f, resolution);
    BoundReport report;
    report.points.reserve(xs.size());
    for (double x : xs) {
        BoundPoint pt;
        pt.x = x;
        pt.lhs = std::fabs(table.apply(f, x) - f(x));
        pt.rhs = 2.0 * modulus(std::sqrt(std::max(0.0, delta_n(x, n, params))));
        pt.slack = modulus.slack();
        pt.margin = pt.rhs - pt.lhs;
        pt.pass = pt.margin >= -pt.slack;
        report.points.push_back(pt);
    }
    finish(report);
    return report;
}

double theorem32_bound(const LipschitzSpec& spec, std::int64_t n, const PQParams<double>& params, double x)
{
    spec.validate();
    const double d = distance_to_set(x, spec.E);
    return spec.M * (std::pow(std::max(0.0, delta_n(x, n, params)), spec.alpha / 2.0) + 2.0 * std::pow(d, spec.alpha));
}

double corollary31_bound(const LipschitzSpec& spec, std::int64_t n, const PQParams<double>& params, double x)
{
    spec.validate();
    return spec.M * std::pow(std::max(0.0, delta_n(x, n, params)), spec.alpha / 2.0);
}

BoundReport theorem32_bound_check(const LipschitzSpec& spec, const RealFunction& f, std::int64_t n,
                                  const PQParams<double>& params, std::span<const double> xs)
{
    params.require_strict("theorem32_bound_check");
    const NodeWeightTable<double> table(n, params);
    BoundReport report;
    report.points.reserve(xs.size());
    for (double x : xs) {
        BoundPoint pt;
        pt.x = x;
        pt.lhs = std::fabs(table.apply(f, x) - f(x));
        pt.rhs = theorem32_bound(spec, n, params, x);
        pt.slack = 1e-12;
        pt.margin = pt.rhs - pt.lhs;
        pt.pass = pt.margin >= -pt.slack;
        report.points.push_back(pt);
    }
    finish(report);
    return report;
}

template <Scalar T> T divided_difference(std::span<const T> points, const RealFunction& f)
{
    auto first = [&f](const T& a, const T& b) -> T {
        if (a == b) {
            throw PreconditionError("divided_difference: coincident points");
        }
        T v = (f(b) - f(a)) / (b - a);
        canonical(v);
        return v;
    };
    if (points.size() == 2) {
        return first(points[0], points[1]);
    }
    if (points.size() == 3) {
        if (points[0] == points[2]) {
            throw PreconditionError("divided_difference: coincident points");
        }
        T v = (first(points[1], points[2]) - first(points[0], points[1])) / (points[2] - points[0]);
        canonical(v);
        return v;
    }
    throw PreconditionError("divided_difference: need 2 or 3 points");
}

template <Scalar T>
RepresentationResidual<T> representation_residual(const RealFunction& f, std::int64_t n, const T& x,
                                                  const PQParams<T>& params)
{
    params.require_strict("representation_residual");
    if (!(x > 0)) {
        throw DomainError("representation_residual: x must be positive");
    }
    const NodeWeightTable<T> table(n, params);
    const auto nodes = table.nodes();
    for (const T& t : nodes) {
        bool hit = false;
        if constexpr (std::same_as<T, Rational>) {
            hit = t == x;
        } else {
            hit = relative_gap(t, x) <= 1e-12;
        }
        if (hit) {
            throw DomainError("representation_residual: x is an excluded node");
        }
    }
    const T& p = params.p();
    const T& q = params.q();
    const T a = p * x / q;
    const T ell = euler_product(n, x, params);
    const auto row = pq_binomial_row(n, params);

    std::vector<T> pair(2);
    auto bracket = [&](const T& b) {
        pair[0] = a;
        pair[1] = b;
        try {
            return divided_difference<T>(std::span<const T>(pair), f);
        } catch (const PreconditionError&) {
            throw DomainError("representation_residual: px/q coincides with a divided-difference point");
        }
    };

    Accumulator<T> rhs;
    const T end_point = p * pq_integer(n, params) / ipow(q, n);
    rhs += -ipow(x, n + 1) / ell * bracket(end_point) * p * ipow(q, n * (n - 1) / 2 - n);
    T x_pow = T(1);
    for (std::int64_t k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        rhs += x / ell * bracket(nodes[ku]) / pq_integer(n - k, params) *
               ipow(p, (n - k) * (n - k - 1) / 2 - (k - n) - 1) * ipow(q, k * (k - 1) / 2 - k) * row[ku] * x_pow;
        x_pow *= x;
    }
    RepresentationResidual<T> out;
    out.lhs = table.apply(f, x) - f(a);
    out.rhs = rhs.value();
    canonical(out.lhs);
    canonical(out.rhs);
    out.residual = abs_value<T>(out.lhs - out.rhs);
    return out;
}

double sup_norm(const std::function<double(double)>& g, int resolution)
{
    double best = 0.0;
    for (double x : x_grid(resolution)) {
        best = std::max(best, std::fabs(g(x)));
    }
    return best;
}

#define PQBBH_INSTANTIATE(T)                                                                          \
    template T delta_n<T>(const T&, std::int64_t, const PQParams<T>&);                                \
    template T central_second_moment<T>(const T&, std::int64_t, const PQParams<T>&);                  \
    template T central_second_moment_closed<T>(const T&, std::int64_t, const PQParams<T>&);           \
    template T delta_n_excess<T>(const T&, std::int64_t, const PQParams<T>&);                         \
    template T divided_difference<T>(std::span<const T>, const RealFunction&);                        \
    template struct RepresentationResidual<T>;                                                        \
    template RepresentationResidual<T> representation_residual<T>(const RealFunction&, std::int64_t, \
                                                                  const T&, const PQParams<T>&);

PQBBH_INSTANTIATE(double)
PQBBH_INSTANTIATE(Rational)

#undef PQBBH_INSTANTIATE

} // namespace pqbbh
