#pragma once

// The Bleimann-Butzer-Hahn family: classical, q-, (p,q)- and the generalized
// Stancu-type (p,q) operator, plus closed-form moments of the (p,q) operator.
//
// The (p,q) operator is
//
//   L_n(f; x) = pq / l_n(x) * sum_{k=0}^{n} f(t_{n,k}) p^{(n-k)(n-k-1)/2} q^{k(k-1)/2} binom(n,k) x^k,
//   t_{n,k}  = p^{n-k+1} [k] / ([n-k+1] q^k),   l_n(x) = prod_{s<n} (p^s + q^s x),
//
// so L_n(1; x) = pq rather than 1.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pqbbh/functions.hpp"
#include "pqbbh/lipschitz.hpp"
#include "pqbbh/pq_core.hpp"

namespace pqbbh {

/// Float evaluation switches to log-domain weights above this degree.
inline constexpr std::int64_t kLogDomainDegree = 64;

/// Nodes and x-independent weights of the degree-n (p,q) operator.
///
/// Rational tables hold the exact weights.  Float tables hold the reduced
/// log-weights  lambda_k = log(weight_k / p^{n(n-1)/2}) = k(k-1)/2 log r + log binom_r(n,k)
/// with r = q/p; basis() removes the same factor from l_n(x), so nothing of
/// size p^{n^2/2} is ever formed.
template <Scalar T> class NodeWeightTable
{
public:
    /// Requires n >= 1.  p == q is accepted (the table is well defined);
    /// operators check strictness themselves.
    NodeWeightTable(std::int64_t n, PQParams<T> params);

    std::int64_t degree() const { return n_; }
    const PQParams<T>& params() const { return params_; }

    /// t_{n,k}, k = 0..n.
    std::span<const T> nodes() const { return nodes_; }

    /// u(t_{n,k}) = p^{n+1-k}[k]/[n+1]; exact for Rational, [k]_r/[n+1]_r for Float.
    std::span<const T> unodes() const { return unodes_; }

    /// Reduced log-weights lambda_k (see class comment).
    std::span<const double> log_weights() const { return log_weights_; }

    /// Exact weights p^{(n-k)(n-k-1)/2} q^{k(k-1)/2} binom(n,k); Rational tables only.
    std::span<const Rational> exact_weights() const { return exact_weights_; }

    /// weight_k x^k / l_n(x) for k = 0..n.  Sums to 1 by the Euler identity.
    std::vector<T> basis(const T& x) const;

    /// pq * sum_k values[k] * basis_k(x), accumulated in ascending k.
    T apply(std::span<const T> values, const T& x) const;

    /// pq * sum_k f(t_{n,k}) basis_k(x).
    T apply(const RealFunction& f, const T& x) const;

private:
    std::int64_t n_;
    PQParams<T> params_;
    std::vector<T> nodes_;
    std::vector<T> unodes_;
    std::vector<double> log_weights_;
    std::vector<Rational> exact_weights_;
    // Float direct path: exp(lambda_k), and r^s for the product.
    std::vector<double> reduced_weights_;
};

/// (1+x)^{-n} sum_k f(k/(n-k+1)) C(n,k) x^k.
template <Scalar T> T bbh_classical(const RealFunction& f, std::int64_t n, const T& x);

/// The q-operator: 1/l_n(x) sum_k f([k]/([n-k+1] q^k)) q^{k(k-1)/2} binom_q(n,k) x^k, 0 < q < 1.
template <Scalar T> T bbh_q(const RealFunction& f, std::int64_t n, const T& x, const T& q);

/// The (p,q) operator; DomainError when q >= p.
template <Scalar T> T bbh_pq(const RealFunction& f, std::int64_t n, const T& x, const PQParams<T>& params);

/// bbh_pq with f(t) = u(t)^nu by direct summation.  This is the ground truth
/// the closed-form moments are checked against.
template <Scalar T> T brute_force_moment(int nu, std::int64_t n, const T& x, const PQParams<T>& params);

enum class MomentVariant { PaperPrinted, OracleConsistent };

std::string_view to_string(MomentVariant variant);

/// Closed forms of L_n(u^nu; x) for nu = 0, 1, 2:
///   nu = 0: pq
///   nu = 1: p^2 q [n]/[n+1] u(x)
///   nu = 2: C [n][n-1]/[n+1]^2 x^2/((1+x)(p+qx)) + p^{n+2} q [n]/[n+1]^2 u(x)
/// with C = p^2 q^3 as printed and C = p^3 q^3 in the form that matches
/// direct summation.  At n = 1 the first nu = 2 term vanishes ([0] = 0).
template <Scalar T>
T moment_closed(int nu, std::int64_t n, const T& x, const PQParams<T>& params, MomentVariant variant);

/// Stancu-type generalization: nodes (p^{n-k+1}[k] + gamma) / b_{n,k} with
/// p^{n-k+1}[k] + b_{n,k} = c_n for all k.
template <Scalar T> struct GeneralizedSpec
{
    using BRule = std::function<T(std::int64_t n, std::int64_t k, const PQParams<T>&)>;

    T gamma = T(0);
    T beta = T(0);
    /// Empty means the default b_{n,k} = q^k [n-k+1] + beta.
    BRule b_rule;

    T b(std::int64_t n, std::int64_t k, const PQParams<T>& params) const;
    /// c_n read off at k = 0, where the node term vanishes.
    T c(std::int64_t n, const PQParams<T>& params) const;

    /// Throws DomainError if some b_{n,k} <= 0 or the consistency condition
    /// fails (exactly in Rational mode, to 1e-12 relative in Float).
    void validate(std::int64_t n, const PQParams<T>& params) const;
};

template <Scalar T>
T bbh_pq_generalized(const RealFunction& f, std::int64_t n, const T& x, const PQParams<T>& params,
                     const GeneralizedSpec<T>& spec);

struct GeneralizedBound
{
    /// The three candidates of the max, in the order they are displayed.
    std::array<double, 3> terms{};
    double value = 0.0;
};

/// 3M max{ ([n]/(c_n+g))^a (g/[n])^a, |1 - [n+1]/(c_n+g)|^a (pq[n]/[n+1])^a,
///          1 - 2pq[n]/[n+1] + pq[n][n-1]/[n+1]^2 }.
template <Scalar T>
GeneralizedBound theorem41_bound(const LipschitzSpec& f_spec, std::int64_t n, const PQParams<T>& params,
                                 const GeneralizedSpec<T>& spec);

} // namespace pqbbh
