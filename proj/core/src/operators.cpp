#include "pqbbh/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pqbbh/errors.hpp"

namespace pqbbh {

namespace {

void require_degree(std::int64_t n, const char* where)
{
    if (n < 1) {
        throw PreconditionError(std::string(where) + ": n must be at least 1");
    }
}

template <Scalar T> void require_point(const T& x, const char* where)
{
    if (!(x >= 0)) {
        throw PreconditionError(std::string(where) + ": x must be nonnegative");
    }
}

// [m]_r for m = 0..n, r = q/p.
std::vector<double> reduced_integers(std::int64_t n, double r)
{
    std::vector<double> ints(static_cast<std::size_t>(n) + 1, 0.0);
    CompensatedSum sum;
    double r_pow = 1.0;
    for (std::int64_t m = 1; m <= n; ++m) {
        sum += r_pow;
        r_pow *= r;
        ints[static_cast<std::size_t>(m)] = sum.value();
    }
    return ints;
}

// Normalizes a vector of log-terms against a log-denominator.
std::vector<double> exp_normalized(const std::vector<double>& logs, double log_denominator)
{
    std::vector<double> out(logs.size());
    for (std::size_t k = 0; k < logs.size(); ++k) {
        out[k] = std::exp(logs[k] - log_denominator);
    }
    return out;
}

constexpr double kDirectPathMaxX = 1e3;

} // namespace

template <Scalar T> NodeWeightTable<T>::NodeWeightTable(std::int64_t n, PQParams<T> params)
    : n_(n), params_(std::move(params))
{
    require_degree(n, "NodeWeightTable");
    const auto size = static_cast<std::size_t>(n) + 1;
    nodes_.resize(size);
    unodes_.resize(size);
    if constexpr (std::same_as<T, Rational>) {
        const T& p = params_.p();
        const T& q = params_.q();
        std::vector<Rational> ints(size + 1);
        for (std::int64_t m = 0; m <= n + 1; ++m) {
            ints[static_cast<std::size_t>(m)] = pq_integer(m, params_);
        }
        const auto row = pq_binomial_row(n, params_);
        exact_weights_.resize(size);
        for (std::int64_t k = 0; k <= n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            Rational t = ipow(p, n - k + 1) * ints[ku] / (ints[static_cast<std::size_t>(n - k + 1)] * ipow(q, k));
            t.canonicalize();
            nodes_[ku] = t;
            unodes_[ku] = to_u(t);
            unodes_[ku].canonicalize();
            Rational w = ipow(p, (n - k) * (n - k - 1) / 2) * ipow(q, k * (k - 1) / 2) * row[ku];
            w.canonicalize();
            exact_weights_[ku] = w;
        }
        log_weights_.resize(size);
        const Rational scale = ipow(p, n * (n - 1) / 2);
        for (std::size_t k = 0; k < size; ++k) {
            // Divide out p^{n(n-1)/2} exactly before leaving the rationals.
            const double w = to_double(Rational(exact_weights_[k] / scale));
            log_weights_[k] = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
        }
    } else {
        // t_k = [k]_r / ([n-k+1]_r r^k), u(t_k) = [k]_r / [n+1]_r.
        const double r = params_.ratio();
        const auto ints = reduced_integers(n + 1, r);
        for (std::int64_t k = 0; k <= n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            nodes_[ku] = ints[ku] / (ints[static_cast<std::size_t>(n - k + 1)] * std::pow(r, static_cast<double>(k)));
            unodes_[ku] = ints[ku] / ints[static_cast<std::size_t>(n + 1)];
        }
        const auto lb = log_reduced_binomial_row(n, params_);
        const double log_r = std::log(r);
        log_weights_.resize(size);
        reduced_weights_.resize(size);
        for (std::int64_t k = 0; k <= n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            log_weights_[ku] = static_cast<double>(k * (k - 1) / 2) * log_r + lb[ku];
            reduced_weights_[ku] = std::exp(log_weights_[ku]);
        }
    }
}

template <Scalar T> std::vector<T> NodeWeightTable<T>::basis(const T& x) const
{
    require_point(x, "NodeWeightTable::basis");
    const auto size = static_cast<std::size_t>(n_) + 1;
    std::vector<T> out(size, T(0));
    if (x == 0) {
        out[0] = T(1);
        return out;
    }
    if constexpr (std::same_as<T, Rational>) {
        const Rational ell = euler_product(n_, x, params_);
        Rational x_pow = 1;
        for (std::size_t k = 0; k < size; ++k) {
            out[k] = exact_weights_[k] * x_pow / ell;
            out[k].canonicalize();
            x_pow *= x;
        }
    } else {
        const double r = params_.ratio();
        if (n_ <= kLogDomainDegree && x <= kDirectPathMaxX) {
            double ell = 1.0;
            double r_pow = 1.0;
            for (std::int64_t s = 0; s < n_; ++s) {
                ell *= 1.0 + r_pow * x;
                r_pow *= r;
            }
            double x_pow = 1.0;
            for (std::size_t k = 0; k < size; ++k) {
                out[k] = reduced_weights_[k] * x_pow / ell;
                x_pow *= x;
            }
        } else {
            const double log_x = std::log(x);
            std::vector<double> logs(size);
            for (std::size_t k = 0; k < size; ++k) {
                logs[k] = log_weights_[k] + static_cast<double>(k) * log_x;
            }
            out = exp_normalized(logs, euler_product_log_reduced(n_, x, params_));
        }
    }
    return out;
}

template <Scalar T> T NodeWeightTable<T>::apply(std::span<const T> values, const T& x) const
{
    if (values.size() != nodes_.size()) {
        throw PreconditionError("NodeWeightTable::apply: need one value per node");
    }
    const auto b = basis(x);
    Accumulator<T> acc;
    for (std::size_t k = 0; k < b.size(); ++k) {
        acc += values[k] * b[k];
    }
    T result = params_.p() * params_.q() * acc.value();
    if constexpr (std::same_as<T, Rational>) {
        result.canonicalize();
    }
    return result;
}

template <Scalar T> T NodeWeightTable<T>::apply(const RealFunction& f, const T& x) const
{
    std::vector<T> values(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        values[k] = f(nodes_[k]);
    }
    return apply(std::span<const T>(values), x);
}

template class NodeWeightTable<double>;
template class NodeWeightTable<Rational>;

template <Scalar T> T bbh_classical(const RealFunction& f, std::int64_t n, const T& x)
{
    require_degree(n, "bbh_classical");
    require_point(x, "bbh_classical");
    if (x == 0) {
        return f(T(0));
    }
    if constexpr (std::same_as<T, Rational>) {
        Accumulator<Rational> acc;
        Rational binom = 1;
        Rational x_pow = 1;
        for (std::int64_t k = 0; k <= n; ++k) {
            acc += f(Rational(mpz_class(static_cast<long>(k)), mpz_class(static_cast<long>(n - k + 1)))) * binom * x_pow;
            binom = binom * (n - k) / (k + 1);
            x_pow *= x;
        }
        Rational result = acc.value() / ipow<Rational>(Rational(1 + x), n);
        result.canonicalize();
        return result;
    } else {
        // C(n,k) u^k (1-u)^{n-k} with u = x/(1+x), in logs.
        const double log_u = std::log(x) - std::log1p(x);
        const double log_v = -std::log1p(x);
        const double nd = static_cast<double>(n);
        CompensatedSum acc;
        for (std::int64_t k = 0; k <= n; ++k) {
            const double kd = static_cast<double>(k);
            const double log_w = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                                 kd * log_u + (nd - kd) * log_v;
            acc += f(kd / (nd - kd + 1.0)) * std::exp(log_w);
        }
        return acc.value();
    }
}

template <Scalar T> T bbh_q(const RealFunction& f, std::int64_t n, const T& x, const T& q)
{
    require_degree(n, "bbh_q");
    require_point(x, "bbh_q");
    if (!(q > 0 && q < 1)) {
        throw DomainError("bbh_q: need 0 < q < 1");
    }
    const auto size = static_cast<std::size_t>(n) + 1;
    // q-integers [m]_q = 1 + q + ... + q^{m-1}
    std::vector<T> ints(size + 1, T(0));
    {
        Accumulator<T> acc;
        T q_pow = T(1);
        for (std::size_t m = 1; m <= size; ++m) {
            acc += q_pow;
            q_pow *= q;
            ints[m] = acc.value();
        }
    }
    std::vector<T> nodes(size);
    for (std::size_t k = 0; k < size; ++k) {
        nodes[k] = ints[k] / (ints[size - k] * ipow(q, static_cast<std::int64_t>(k)));
    }
    if (x == 0) {
        return f(nodes[0]);
    }
    if constexpr (std::same_as<T, Rational>) {
        Rational ell = 1;
        Rational q_pow = 1;
        for (std::int64_t s = 0; s < n; ++s) {
            ell *= 1 + q_pow * x;
            q_pow *= q;
        }
        Accumulator<Rational> acc;
        Rational binom = 1;
        Rational x_pow = 1;
        for (std::size_t k = 0; k < size; ++k) {
            if (k > 0) {
                binom = binom * ints[size - k] / ints[k];
            }
            const auto kk = static_cast<std::int64_t>(k);
            acc += f(nodes[k]) * ipow(q, kk * (kk - 1) / 2) * binom * x_pow;
            x_pow *= x;
        }
        Rational result = acc.value() / ell;
        result.canonicalize();
        return result;
    } else {
        const double log_q = std::log(q);
        const double log_x = std::log(x);
        CompensatedSum log_ell;
        double q_pow = 1.0;
        for (std::int64_t s = 0; s < n; ++s) {
            log_ell += std::log1p(q_pow * x);
            q_pow *= q;
        }
        CompensatedSum log_binom;
        CompensatedSum acc;
        for (std::size_t k = 0; k < size; ++k) {
            if (k > 0) {
                log_binom += std::log(ints[size - k]) - std::log(ints[k]);
            }
            const double kd = static_cast<double>(k);
            const double log_term = 0.5 * kd * (kd - 1.0) * log_q + log_binom.value() + kd * log_x - log_ell.value();
            acc += f(nodes[k]) * std::exp(log_term);
        }
        return acc.value();
    }
}

template <Scalar T> T bbh_pq(const RealFunction& f, std::int64_t n, const T& x, const PQParams<T>& params)
{
    params.require_strict("bbh_pq");
    require_degree(n, "bbh_pq");
    require_point(x, "bbh_pq");
    return NodeWeightTable<T>(n, params).apply(f, x);
}

template <Scalar T> T brute_force_moment(int nu, std::int64_t n, const T& x, const PQParams<T>& params)
{
    if (nu < 0) {
        throw PreconditionError("brute_force_moment: nu must be nonnegative");
    }
    return bbh_pq(make_upow(nu), n, x, params);
}

std::string_view to_string(MomentVariant variant)
{
    return variant == MomentVariant::PaperPrinted ? "printed" : "oracle";
}

template <Scalar T>
T moment_closed(int nu, std::int64_t n, const T& x, const PQParams<T>& params, MomentVariant variant)
{
    require_degree(n, "moment_closed");
    require_point(x, "moment_closed");
    const T& p = params.p();
    const T& q = params.q();
    T result;
    switch (nu) {
    case 0:
        result = p * q;
        break;
    case 1:
        result = p * p * q * pq_integer(n, params) / pq_integer(n + 1, params) * to_u(x);
        break;
    case 2: {
        const T n0 = pq_integer(n, params);
        const T n1 = pq_integer(n + 1, params);
        const T coeff = variant == MomentVariant::PaperPrinted ? T(p * p * q * q * q) : T(p * p * p * q * q * q);
        const T first = coeff * n0 * pq_integer(n - 1, params) / (n1 * n1) * x * x / ((1 + x) * (p + q * x));
        const T second = ipow(p, n + 2) * q * n0 / (n1 * n1) * to_u(x);
        result = first + second;
        break;
    }
    default:
        throw PreconditionError("moment_closed: nu must be 0, 1 or 2");
    }
    if constexpr (std::same_as<T, Rational>) {
        result.canonicalize();
    }
    return result;
}

template <Scalar T> T GeneralizedSpec<T>::b(std::int64_t n, std::int64_t k, const PQParams<T>& params) const
{
    if (b_rule) {
        return b_rule(n, k, params);
    }
    return ipow(params.q(), k) * pq_integer(n - k + 1, params) + beta;
}

template <Scalar T> T GeneralizedSpec<T>::c(std::int64_t n, const PQParams<T>& params) const
{
    return b(n, 0, params);
}

template <Scalar T> void GeneralizedSpec<T>::validate(std::int64_t n, const PQParams<T>& params) const
{
    require_degree(n, "GeneralizedSpec");
    const T cn = c(n, params);
    for (std::int64_t k = 0; k <= n; ++k) {
        const T bk = b(n, k, params);
        if (!(bk > 0)) {
            throw DomainError("GeneralizedSpec: b_{n,k} must be positive (k=" + std::to_string(k) + ")");
        }
        const T lhs = ipow(params.p(), n - k + 1) * pq_integer(k, params) + bk;
        bool consistent = false;
        if constexpr (std::same_as<T, Rational>) {
            consistent = lhs == cn;
        } else {
            consistent = relative_gap(lhs, cn) <= 1e-12;
        }
        if (!consistent) {
            throw DomainError("GeneralizedSpec: p^{n-k+1}[k] + b_{n,k} != c_n at k=" + std::to_string(k));
        }
    }
}

template <Scalar T>
T bbh_pq_generalized(const RealFunction& f, std::int64_t n, const T& x, const PQParams<T>& params,
                     const GeneralizedSpec<T>& spec)
{
    params.require_strict("bbh_pq_generalized");
    require_degree(n, "bbh_pq_generalized");
    require_point(x, "bbh_pq_generalized");
    spec.validate(n, params);
    const NodeWeightTable<T> table(n, params);
    std::vector<T> values(static_cast<std::size_t>(n) + 1);
    for (std::int64_t k = 0; k <= n; ++k) {
        T node = (ipow(params.p(), n - k + 1) * pq_integer(k, params) + spec.gamma) / spec.b(n, k, params);
        if (node < 0) {
            throw DomainError("bbh_pq_generalized: negative node at k=" + std::to_string(k));
        }
        values[static_cast<std::size_t>(k)] = f(node);
    }
    return table.apply(std::span<const T>(values), x);
}

template <Scalar T>
GeneralizedBound theorem41_bound(const LipschitzSpec& f_spec, std::int64_t n, const PQParams<T>& params,
                                 const GeneralizedSpec<T>& spec)
{
    f_spec.validate();
    require_degree(n, "theorem41_bound");
    const double a = f_spec.alpha;
    const double p = to_double(params.p());
    const double q = to_double(params.q());
    const double n0 = to_double(pq_integer(n, params));
    const double n1 = to_double(pq_integer(n + 1, params));
    const double nm = to_double(pq_integer(n - 1, params));
    const double g = to_double(spec.gamma);
    const double cg = to_double(spec.c(n, params)) + g;
    GeneralizedBound out;
    out.terms[0] = std::pow(n0 / cg, a) * std::pow(std::fabs(g) / n0, a);
    out.terms[1] = std::pow(std::fabs(1.0 - n1 / cg), a) * std::pow(p * q * n0 / n1, a);
    out.terms[2] = 1.0 - 2.0 * p * q * n0 / n1 + p * q * n0 * nm / (n1 * n1);
    out.value = 3.0 * f_spec.M * *std::max_element(out.terms.begin(), out.terms.end());
    return out;
}

#define PQBBH_INSTANTIATE(T)                                                                                     \
    template T bbh_classical<T>(const RealFunction&, std::int64_t, const T&);                                    \
    template T bbh_q<T>(const RealFunction&, std::int64_t, const T&, const T&);                                  \
    template T bbh_pq<T>(const RealFunction&, std::int64_t, const T&, const PQParams<T>&);                       \
    template T brute_force_moment<T>(int, std::int64_t, const T&, const PQParams<T>&);                           \
    template T moment_closed<T>(int, std::int64_t, const T&, const PQParams<T>&, MomentVariant);                 \
    template struct GeneralizedSpec<T>;                                                                          \
    template T bbh_pq_generalized<T>(const RealFunction&, std::int64_t, const T&, const PQParams<T>&,            \
                                     const GeneralizedSpec<T>&);                                                 \
    template GeneralizedBound theorem41_bound<T>(const LipschitzSpec&, std::int64_t, const PQParams<T>&,         \
                                                 const GeneralizedSpec<T>&);

PQBBH_INSTANTIATE(double)
PQBBH_INSTANTIATE(Rational)

#undef PQBBH_INSTANTIATE

} // namespace pqbbh
