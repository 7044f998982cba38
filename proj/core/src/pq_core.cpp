#include "pqbbh/pq_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pqbbh/errors.hpp"

namespace pqbbh {

namespace {

template <Scalar T> std::string describe(const T& v)
{
    if constexpr (std::same_as<T, double>) {
        return std::to_string(v);
    } else {
        return v.get_str();
    }
}

void require_nonnegative(std::int64_t n, const char* what)
{
    if (n < 0) {
        throw PreconditionError(std::string(what) + ": n must be nonnegative");
    }
}

} // namespace

template <Scalar T> PQParams<T>::PQParams(T p, T q) : p_(std::move(p)), q_(std::move(q))
{
    if constexpr (std::same_as<T, Rational>) {
        p_.canonicalize();
        q_.canonicalize();
    } else {
        if (!std::isfinite(p_) || !std::isfinite(q_)) {
            throw DomainError("PQParams: p and q must be finite");
        }
    }
    if (!(q_ > 0 && q_ <= p_ && p_ <= 1)) {
        throw DomainError("PQParams: need 0 < q <= p <= 1, got p=" + describe(p_) + " q=" + describe(q_));
    }
}

template <Scalar T> void PQParams<T>::require_strict(const char* where) const
{
    if (!strict()) {
        throw DomainError(std::string(where) + ": requires q < p, got p=" + describe(p_) + " q=" + describe(q_));
    }
}

template class PQParams<double>;
template class PQParams<Rational>;

PQParams<double> to_float(const PQParams<Rational>& params)
{
    return PQParams<double>(to_double(params.p()), to_double(params.q()));
}

template <Scalar T> T pq_integer(std::int64_t n, const PQParams<T>& params)
{
    require_nonnegative(n, "pq_integer");
    if constexpr (std::same_as<T, double>) {
        CompensatedSum sum;
        for (std::int64_t i = 0; i < n; ++i) {
            sum += std::pow(params.p(), static_cast<double>(n - 1 - i)) * std::pow(params.q(), static_cast<double>(i));
        }
        return sum.value();
    } else {
        if (n == 0) {
            return Rational(0);
        }
        // Horner in q with p-powers: ((p + q) p + q^2) ... evaluated exactly.
        Rational sum = 0;
        Rational p_pow = 1;
        Rational q_pow = ipow(params.q(), n - 1);
        const Rational q_inv = 1 / params.q();
        for (std::int64_t i = n - 1; i >= 0; --i) {
            sum += p_pow * q_pow;
            p_pow *= params.p();
            q_pow *= q_inv;
        }
        sum.canonicalize();
        return sum;
    }
}

template <Scalar T> T pq_factorial(std::int64_t n, const PQParams<T>& params)
{
    require_nonnegative(n, "pq_factorial");
    T result = T(1);
    for (std::int64_t i = 1; i <= n; ++i) {
        result *= pq_integer(i, params);
    }
    return result;
}

template <Scalar T> std::vector<T> pq_binomial_row(std::int64_t n, const PQParams<T>& params)
{
    require_nonnegative(n, "pq_binomial_row");
    std::vector<T> ints(static_cast<std::size_t>(n) + 1);
    for (std::int64_t m = 0; m <= n; ++m) {
        ints[static_cast<std::size_t>(m)] = pq_integer(m, params);
    }
    std::vector<T> row(static_cast<std::size_t>(n) + 1);
    row[0] = T(1);
    for (std::int64_t k = 1; k <= n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        row[ku] = row[ku - 1] * ints[static_cast<std::size_t>(n - k + 1)] / ints[ku];
    }
    // The row is symmetric; mirroring halves the recurrence's rounding drift.
    if constexpr (std::same_as<T, double>) {
        for (std::int64_t k = n / 2 + 1; k <= n; ++k) {
            row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(n - k)];
        }
    }
    return row;
}

template <Scalar T> T pq_binomial(std::int64_t n, std::int64_t k, const PQParams<T>& params)
{
    if (n < 0 || k < 0 || k > n) {
        return T(0);
    }
    const std::int64_t kk = std::min(k, n - k);
    T result = T(1);
    for (std::int64_t j = 1; j <= kk; ++j) {
        result = result * pq_integer(n - j + 1, params) / pq_integer(j, params);
    }
    return result;
}

template <Scalar T> T euler_product(std::int64_t n, const T& x, const PQParams<T>& params)
{
    require_nonnegative(n, "euler_product");
    if (x < 0) {
        throw PreconditionError("euler_product: x must be nonnegative");
    }
    T result = T(1);
    T p_pow = T(1);
    T q_pow = T(1);
    for (std::int64_t s = 0; s < n; ++s) {
        result *= p_pow + q_pow * x;
        p_pow *= params.p();
        q_pow *= params.q();
    }
    return result;
}

template <Scalar T> T euler_sum(std::int64_t n, const T& x, const PQParams<T>& params)
{
    require_nonnegative(n, "euler_sum");
    if (x < 0) {
        throw PreconditionError("euler_sum: x must be nonnegative");
    }
    const auto row = pq_binomial_row(n, params);
    Accumulator<T> acc;
    T x_pow = T(1);
    for (std::int64_t k = 0; k <= n; ++k) {
        const T w = ipow(params.p(), (n - k) * (n - k - 1) / 2) * ipow(params.q(), k * (k - 1) / 2);
        acc += w * row[static_cast<std::size_t>(k)] * x_pow;
        x_pow *= x;
    }
    return acc.value();
}

template <Scalar T> T shift_relation_residual(std::int64_t n, std::int64_t k, const PQParams<T>& params)
{
    if (k < 0 || k > n) {
        throw PreconditionError("shift_relation_residual: need 0 <= k <= n");
    }
    const T lhs = ipow(params.q(), k) * pq_integer(n - k + 1, params);
    const T rhs = pq_integer(n + 1, params) - ipow(params.p(), n - k + 1) * pq_integer(k, params);
    return lhs - rhs;
}

template <Scalar T> T square_decomposition_residual(std::int64_t k, const PQParams<T>& params)
{
    if (k < 1) {
        throw PreconditionError("square_decomposition_residual: need k >= 1");
    }
    const T kk = pq_integer(k, params);
    return kk * kk - (params.q() * kk * pq_integer(k - 1, params) + ipow(params.p(), k - 1) * kk);
}

template <Scalar T> T step_relation_residual(std::int64_t k, const PQParams<T>& params)
{
    if (k < 1) {
        throw PreconditionError("step_relation_residual: need k >= 1");
    }
    return pq_integer(k, params) - (ipow(params.p(), k - 1) + params.q() * pq_integer(k - 1, params));
}

double q_integer_closed(std::int64_t n, double q)
{
    return (1.0 - std::pow(q, static_cast<double>(n))) / (1.0 - q);
}

namespace {

std::vector<double> reduced_integers(std::int64_t n, double r)
{
    // [m]_r = sum_{i<m} r^i for m = 0..n
    std::vector<double> ints(static_cast<std::size_t>(n) + 1, 0.0);
    CompensatedSum sum;
    for (std::int64_t m = 1; m <= n; ++m) {
        sum += std::pow(r, static_cast<double>(m - 1));
        ints[static_cast<std::size_t>(m)] = sum.value();
    }
    return ints;
}

} // namespace

std::vector<double> log_reduced_binomial_row(std::int64_t n, const PQParams<double>& params)
{
    require_nonnegative(n, "log_reduced_binomial_row");
    const auto ints = reduced_integers(n, params.ratio());
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
    CompensatedSum acc;
    for (std::int64_t k = 1; k <= n; ++k) {
        acc += std::log(ints[static_cast<std::size_t>(n - k + 1)]);
        acc += -std::log(ints[static_cast<std::size_t>(k)]);
        row[static_cast<std::size_t>(k)] = acc.value();
    }
    for (std::int64_t k = n / 2 + 1; k <= n; ++k) {
        row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(n - k)];
    }
    return row;
}

double euler_product_log_reduced(std::int64_t n, double x, const PQParams<double>& params)
{
    require_nonnegative(n, "euler_product_log_reduced");
    const double r = params.ratio();
    CompensatedSum acc;
    for (std::int64_t s = 0; s < n; ++s) {
        acc += std::log1p(std::pow(r, static_cast<double>(s)) * x);
    }
    return acc.value();
}

double euler_sum_log_reduced(std::int64_t n, double x, const PQParams<double>& params)
{
    require_nonnegative(n, "euler_sum_log_reduced");
    if (x == 0.0 || n == 0) {
        return 0.0;
    }
    const auto lb = log_reduced_binomial_row(n, params);
    const double log_r = std::log(params.ratio());
    const double log_x = std::log(x);
    std::vector<double> logs(static_cast<std::size_t>(n) + 1);
    double top = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k <= n; ++k) {
        const double v = static_cast<double>(k * (k - 1) / 2) * log_r + lb[static_cast<std::size_t>(k)] +
                         static_cast<double>(k) * log_x;
        logs[static_cast<std::size_t>(k)] = v;
        top = std::max(top, v);
    }
    CompensatedSum acc;
    for (double v : logs) {
        acc += std::exp(v - top);
    }
    return top + std::log(acc.value());
}

double euler_identity_relative_error(std::int64_t n, double x, const PQParams<double>& params)
{
    return std::fabs(std::expm1(euler_sum_log_reduced(n, x, params) - euler_product_log_reduced(n, x, params)));
}

#define PQBBH_INSTANTIATE(T)                                                                  \
    template T pq_integer<T>(std::int64_t, const PQParams<T>&);                               \
    template T pq_factorial<T>(std::int64_t, const PQParams<T>&);                             \
    template T pq_binomial<T>(std::int64_t, std::int64_t, const PQParams<T>&);                \
    template std::vector<T> pq_binomial_row<T>(std::int64_t, const PQParams<T>&);             \
    template T euler_product<T>(std::int64_t, const T&, const PQParams<T>&);                  \
    template T euler_sum<T>(std::int64_t, const T&, const PQParams<T>&);                      \
    template T shift_relation_residual<T>(std::int64_t, std::int64_t, const PQParams<T>&);    \
    template T square_decomposition_residual<T>(std::int64_t, const PQParams<T>&);            \
    template T step_relation_residual<T>(std::int64_t, const PQParams<T>&);

PQBBH_INSTANTIATE(double)
PQBBH_INSTANTIATE(Rational)

#undef PQBBH_INSTANTIATE

} // namespace pqbbh
