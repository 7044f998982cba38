#pragma once

// (p,q)-integers, factorials, binomials and the (p,q)-Euler identity.
//
// [n]_{p,q} is always evaluated in the sum form  sum_{i<n} p^{n-1-i} q^i,
// which is continuous at p = q (value n p^{n-1}) and free of the cancellation
// in (p^n - q^n)/(p - q).  Hence p == q is accepted here even though the
// operators built on top require q < p.

#include <cstdint>
#include <vector>

#include "pqbbh/scalar.hpp"

namespace pqbbh {

/// The deformation pair (p, q) with 0 < q <= p <= 1.
template <Scalar T> class PQParams
{
public:
    /// Throws DomainError unless 0 < q <= p <= 1.
    PQParams(T p, T q);

    const T& p() const { return p_; }
    const T& q() const { return q_; }

    /// True when q < p, the condition the operators need.
    bool strict() const { return q_ < p_; }

    /// Throws DomainError when q >= p.
    void require_strict(const char* where) const;

    /// q / p, the base of the reduced (q-type) form used by the Float backend.
    T ratio() const { return q_ / p_; }

    static constexpr ArithmeticMode mode = mode_of<T>;

    friend bool operator==(const PQParams&, const PQParams&) = default;

private:
    T p_;
    T q_;
};

/// Maps rational parameters onto their nearest binary64 counterparts.
PQParams<double> to_float(const PQParams<Rational>& params);

template <Scalar T> T pq_integer(std::int64_t n, const PQParams<T>& params);

/// [1][2]...[n], 1 for n = 0.
template <Scalar T> T pq_factorial(std::int64_t n, const PQParams<T>& params);

/// [n]! / ([k]! [n-k]!) for 0 <= k <= n, zero otherwise.  Uses the
/// multiplicative recurrence binom(n,k) = binom(n,k-1) [n-k+1]/[k].
template <Scalar T> T pq_binomial(std::int64_t n, std::int64_t k, const PQParams<T>& params);

/// All of binom(n, 0..n) in one pass of the recurrence.
template <Scalar T> std::vector<T> pq_binomial_row(std::int64_t n, const PQParams<T>& params);

/// prod_{s=0}^{n-1} (p^s + q^s x).
template <Scalar T> T euler_product(std::int64_t n, const T& x, const PQParams<T>& params);

/// sum_{k=0}^{n} p^{(n-k)(n-k-1)/2} q^{k(k-1)/2} binom(n,k) x^k.
template <Scalar T> T euler_sum(std::int64_t n, const T& x, const PQParams<T>& params);

/// q^k [n-k+1] - ([n+1] - p^{n-k+1} [k]); identically zero.
template <Scalar T> T shift_relation_residual(std::int64_t n, std::int64_t k, const PQParams<T>& params);

/// [k]^2 - (q [k][k-1] + p^{k-1} [k]), k >= 1.
template <Scalar T> T square_decomposition_residual(std::int64_t k, const PQParams<T>& params);

/// [k] - (p^{k-1} + q [k-1]), k >= 1.
template <Scalar T> T step_relation_residual(std::int64_t k, const PQParams<T>& params);

/// The q-integer (1 - q^n)/(1 - q) in closed form, for cross-checks at p = 1.
double q_integer_closed(std::int64_t n, double q);

// Float-only log-domain forms.
//
// With r = q/p every weight factors exactly as
//   p^{(n-k)(n-k-1)/2} q^{k(k-1)/2} binom_{p,q}(n,k) = p^{n(n-1)/2} r^{k(k-1)/2} binom_r(n,k)
// and the product as prod (p^s + q^s x) = p^{n(n-1)/2} prod (1 + r^s x).
// Dropping the shared p^{n(n-1)/2} keeps every logarithm O(n log(1+x)) instead of O(n^2).

/// log of binom_r(n, k) for k = 0..n, r = q/p, accumulated with compensation.
std::vector<double> log_reduced_binomial_row(std::int64_t n, const PQParams<double>& params);

/// log( euler_product(n, x) / p^{n(n-1)/2} ).
double euler_product_log_reduced(std::int64_t n, double x, const PQParams<double>& params);

/// log( euler_sum(n, x) / p^{n(n-1)/2} ), log-sum-exp over the k terms.
double euler_sum_log_reduced(std::int64_t n, double x, const PQParams<double>& params);

/// Relative discrepancy |sum/product - 1| of the Euler identity, computed from the reduced logs.
double euler_identity_relative_error(std::int64_t n, double x, const PQParams<double>& params);

} // namespace pqbbh
